#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "textcausal/text/featurizer.hpp"

namespace textcausal {

struct TextTrainParams {
  double lambda = 1.0;  // weight of the propensity BCE term
  int epochs = 20;
  int batch_size = 64;
  double learning_rate = 0.005;
  std::uint64_t seed = 0;
};

// Linear head over the shared feature space.
struct LinearHead {
  std::vector<double> weights;
  double bias = 0.0;

  double apply(const SparseVector& x) const;
};

// Where the shared feature vectors come from: the built-in hashed n-gram
// featurizer, or precomputed dense rows (e.g. a remote embedding provider).
enum class FeatureSource { kHashed, kExternal };

// Three heads sharing one feature space: treated outcome, control outcome
// and a logistic propensity head.
struct TextTripleModel {
  FeatureSource source = FeatureSource::kHashed;
  FeaturizerConfig featurizer;
  std::size_t dim = 0;
  LinearHead g1;
  LinearHead g0;
  LinearHead mu;
  double lambda = 1.0;
  // Mean outcome over the training slice; divides the regression terms.
  double outcome_scale = 1.0;
  bool g1_trained = false;
  bool g0_trained = false;
  bool trained = false;
  // Mean per-unit loss for each epoch.
  std::vector<double> epoch_loss;
};

struct TriplePrediction {
  Eigen::VectorXd g1;
  Eigen::VectorXd g0;
  Eigen::VectorXd mu;
};

// Batch-mean decomposition of the joint loss:
//   t * |g1 - y| / scale + (1 - t) * |g0 - y| / scale + lambda * BCE(mu, t)
// `total` = treated + control + lambda * bce.
struct TripleLoss {
  double treated = 0.0;
  double control = 0.0;
  double bce = 0.0;
  double total = 0.0;
};

TripleLoss triple_loss(std::span<const double> g1_hat, std::span<const double> g0_hat,
                       std::span<const double> mu_hat, std::span<const double> outcomes,
                       std::span<const int> treatments, double outcome_scale, double lambda);

// Mini-batch Adam on the joint loss over hashed n-gram features. The outcome
// scale is the training-slice mean of Y, computed once before training.
TextTripleModel fit_text_triple(const std::vector<std::string>& texts,
                                std::span<const double> outcomes,
                                std::span<const int> treatments,
                                const TextTrainParams& params,
                                const FeaturizerConfig& featurizer = {});

// Same training loop over precomputed feature rows of width `dim`.
TextTripleModel fit_text_triple_features(const std::vector<SparseVector>& features,
                                         std::size_t dim,
                                         std::span<const double> outcomes,
                                         std::span<const int> treatments,
                                         const TextTrainParams& params);

TriplePrediction predict_triple(const TextTripleModel& model,
                                const std::vector<std::string>& texts);
TriplePrediction predict_triple_features(const TextTripleModel& model,
                                         const std::vector<SparseVector>& features);

// Dense embedding rows as sparse vectors (all coordinates, zeros dropped).
std::vector<SparseVector> dense_rows_to_sparse(const Eigen::MatrixXd& rows);

}  // namespace textcausal
