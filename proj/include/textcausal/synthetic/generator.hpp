#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/crossfit/crossfit.hpp"
#include "textcausal/data/dataset.hpp"

namespace textcausal {

enum class EffectKind { kConstant, kLinear, kGroup };
const char* to_string(EffectKind kind);
EffectKind effect_kind_from_string(const std::string& name);

struct EffectSpec {
  EffectKind kind = EffectKind::kGroup;
  double tau = -0.01;  // constant effect; intercept of the linear effect
  double slope = 0.1;  // linear: theta = tau + slope*(x0-.5) - slope/2*(x2-.5)
  // group: effects spread evenly over [group_low, group_high] and permuted
  // across groups, unless group_effects is given explicitly (one per group).
  double group_low = -0.10;
  double group_high = 0.0;
  std::vector<double> group_effects;
};

struct SyntheticConfig {
  std::size_t n_units = 20000;
  int n_features = 6;
  EffectSpec effect;
  double confounding_strength = 1.0;
  double noise_sd = 0.05;
  int n_groups = 10;
  std::uint64_t text_template_seed = 0;
  std::uint64_t seed = 0;
  bool shared_noise = true;  // one noise draw enters both potential outcomes
  void validate() const;
};

struct SyntheticTruth {
  std::vector<double> true_g1;
  std::vector<double> true_g0;
  std::vector<double> true_mu;
  std::vector<double> true_theta;
  std::vector<double> y1;
  std::vector<double> y0;
};

struct SyntheticSample {
  Dataset dataset;
  SyntheticTruth truth;
  std::vector<double> group_effects;  // per group index (group effect spec only)
};

// Features x_j ~ U(0, 1) plus an integer group code column; the text column
// renders the binned features and the group name as template phrases.
SyntheticSample generate(const SyntheticConfig& config, std::size_t threads = 1);

inline constexpr int kTextBins = 5;
int feature_bin(double x);
const std::vector<std::string>& group_names(int n_groups);

// Parses a rendered description back to (feature bins, group name).
struct DecodedText {
  std::vector<int> bins;  // -1 where a feature phrase is absent
  std::string group;
};
DecodedText decode_template(std::string_view text, int n_features);

struct OracleEstimands {
  double ate = 0.0;
  double atet = 0.0;
  std::map<std::string, double> gate;
  std::vector<double> cate;
};

OracleEstimands oracle_estimands(const SyntheticTruth& truth, const Dataset& dataset);

enum class CorruptionMode { kNone, kPropensityShift, kOutcomeShift, kBoth };
const char* to_string(CorruptionMode mode);

struct CorruptionSpec {
  CorruptionMode mode = CorruptionMode::kNone;
  double propensity_delta = 0.2;  // mu + delta, clipped to [eps, 1 - eps]
  double outcome_delta = 0.1;     // g1 + delta and g0 + delta
  double eps = 0.01;
};

// Nuisance values for inject_nuisances; kNone returns the truth.
NuisanceProvider corrupt_nuisances(const SyntheticTruth& truth, const Dataset& dataset,
                                   const CorruptionSpec& spec);

std::string truth_to_csv(const SyntheticTruth& truth, const Dataset& dataset);
void write_truth(const SyntheticTruth& truth, const Dataset& dataset,
                 const std::filesystem::path& path);
// Reads truth.csv back into a provider keyed by unit id (true g1, g0, mu)
// together with the per-unit true effect.
struct TruthTable {
  NuisanceProvider nuisances;
  std::map<std::string, double> theta;
};
TruthTable read_truth(const std::filesystem::path& path);

nlohmann::json to_json(const SyntheticConfig& config);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);

}  // namespace textcausal
