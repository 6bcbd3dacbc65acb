#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "textcausal/data/dataset.hpp"
#include "textcausal/learners/gbt.hpp"
#include "textcausal/learners/text_triple.hpp"
#include "textcausal/text/embedding_client.hpp"
#include "textcausal/text/featurizer.hpp"

namespace textcausal {

enum class LearnerKind { kGbt, kElasticNet, kOls, kTextTriple };

const char* to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct ElasticNetParams {
  double l1 = 1e-3;
  double l2 = 0.0;
  int max_iter = 10000;
  double tol = 1e-8;
};

struct TextLearnerParams {
  TextTrainParams train;
  FeaturizerConfig featurizer;
  // When set, texts are embedded by the remote provider instead of hashed.
  std::optional<EmbeddingProviderConfig> embedding;
};

// Outcome learner choice. The tabular propensity model is always a logistic
// GBT configured by CrossfitConfig::propensity.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::kGbt;
  GbtParams gbt;
  ElasticNetParams elastic_net;
  TextLearnerParams text;
};

// Shallower and more strongly regularized than the outcome default; deep
// propensity trees push estimates toward the clipping bounds.
inline GbtParams default_propensity_params() {
  GbtParams p;
  p.n_trees = 100;
  p.max_depth = 2;
  p.min_leaf = 100;
  return p;
}

struct CrossfitConfig {
  int k_folds = 5;
  LearnerSpec learner;
  GbtParams propensity = default_propensity_params();
  Modality modality = Modality::kTabular;  // kTabular or kText
  double propensity_eps = 0.01;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  bool blp_centered = true;
  std::size_t min_group_size = 30;
  std::size_t threads = 0;  // 0: machine parallelism; results do not depend on it
  std::string model_dir;     // when non-empty, fitted models are saved here

  void validate() const;
};

// Serialization used for the manifest echo and the run-config loader. The
// thread count and model directory are operational and left out of the echo.
nlohmann::json to_json(const CrossfitConfig& config);
CrossfitConfig crossfit_config_from_json(const nlohmann::json& j,
                                         const std::string& path = "crossfit");

nlohmann::json to_json(const GbtParams& params);
GbtParams gbt_params_from_json(const nlohmann::json& j, GbtParams base = {},
                               const std::string& path = "gbt");

}  // namespace textcausal
