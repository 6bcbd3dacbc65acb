#include "textcausal/learners/text_triple.hpp"

#include <algorithm>
#include <cmath>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/common/random.hpp"

namespace textcausal {

namespace {

constexpr double kMaxLogit = 30.0;
constexpr double kProbFloor = 1e-12;

double sigmoid(double z) {
  z = std::clamp(z, -kMaxLogit, kMaxLogit);
  return 1.0 / (1.0 + std::exp(-z));
}

double sign_of(double e) { return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0); }

double bce(double p, int t) {
  p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return t == 1 ? -std::log(p) : -std::log1p(-p);
}

// Adam state for one head. Weight moments are only advanced for coordinates
// touched by the current batch (lazy updates over sparse features).
struct AdamHead {
  std::vector<double> m, v;
  std::vector<std::int64_t> last_step;
  double bias_m = 0.0, bias_v = 0.0;

  explicit AdamHead(std::size_t dim) : m(dim, 0.0), v(dim, 0.0), last_step(dim, 0) {}
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_step(double& param, double grad, double& m, double& v, std::int64_t step,
               double lr) {
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad * grad;
  const double m_hat = m / (1.0 - std::pow(kBeta1, static_cast<double>(step)));
  const double v_hat = v / (1.0 - std::pow(kBeta2, static_cast<double>(step)));
  param -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
}

// Sparse gradient accumulator with a touched-index list.
struct SparseGrad {
  std::vector<double> dense;
  std::vector<std::uint32_t> touched;
  std::vector<char> seen;
  double bias = 0.0;

  explicit SparseGrad(std::size_t dim) : dense(dim, 0.0), seen(dim, 0) {}

  void add(const SparseVector& x, double scale) {
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
      const auto j = x.indices[k];
      if (!seen[j]) {
        seen[j] = 1;
        touched.push_back(j);
      }
      dense[j] += scale * x.values[k];
    }
    bias += scale;
  }

  void apply(LinearHead& head, AdamHead& state, std::int64_t step, double lr) {
    std::sort(touched.begin(), touched.end());
    for (auto j : touched) {
      adam_step(head.weights[j], dense[j], state.m[j], state.v[j], step, lr);
      dense[j] = 0.0;
      seen[j] = 0;
    }
    touched.clear();
    adam_step(head.bias, bias, state.bias_m, state.bias_v, step, lr);
    bias = 0.0;
  }
};

void check_training_inputs(std::size_t n, std::span<const double> outcomes,
                           std::span<const int> treatments, const TextTrainParams& params) {
  if (outcomes.size() != n || treatments.size() != n) {
    throw ShapeError("text triple inputs have mismatched lengths");
  }
  if (n == 0) throw ParameterError("text triple model needs at least one unit");
  if (!(params.lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (params.epochs < 1) throw ParameterError("epochs must be >= 1");
  if (params.batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (!(params.learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
  for (int t : treatments) {
    if (t != 0 && t != 1) throw ParameterError("treatments must be 0 or 1");
  }
  if (!all_finite(outcomes)) throw NumericError("non-finite outcome");
}

}  // namespace

double LinearHead::apply(const SparseVector& x) const {
  double out = bias;
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    out += weights[x.indices[k]] * x.values[k];
  }
  return out;
}

TripleLoss triple_loss(std::span<const double> g1_hat, std::span<const double> g0_hat,
                       std::span<const double> mu_hat, std::span<const double> outcomes,
                       std::span<const int> treatments, double outcome_scale,
                       double lambda) {
  const std::size_t n = outcomes.size();
  if (g1_hat.size() != n || g0_hat.size() != n || mu_hat.size() != n ||
      treatments.size() != n) {
    throw ShapeError("triple_loss inputs have mismatched lengths");
  }
  if (!(outcome_scale > 0.0)) {
    throw NormalizationError("mean outcome over the training slice must be > 0");
  }
  TripleLoss loss;
  if (n == 0) return loss;
  StableSum treated, control, cross_entropy;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = treatments[i];
    // sqrt(t * e^2) is |e| for t = 1 and 0 for t = 0.
    if (t == 1) {
      treated.add(std::abs(g1_hat[i] - outcomes[i]) / outcome_scale);
    } else {
      control.add(std::abs(g0_hat[i] - outcomes[i]) / outcome_scale);
    }
    cross_entropy.add(bce(mu_hat[i], t));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss.treated = treated.value() * inv_n;
  loss.control = control.value() * inv_n;
  loss.bce = cross_entropy.value() * inv_n;
  loss.total = loss.treated + loss.control + lambda * loss.bce;
  return loss;
}

TextTripleModel fit_text_triple_features(const std::vector<SparseVector>& features,
                                         std::size_t dim,
                                         std::span<const double> outcomes,
                                         std::span<const int> treatments,
                                         const TextTrainParams& params) {
  const std::size_t n = features.size();
  check_training_inputs(n, outcomes, treatments, params);
  if (dim == 0) throw ParameterError("feature dimension must be > 0");
  for (const auto& x : features) {
    if (!x.indices.empty() && x.indices.back() >= dim) {
      throw ShapeError("feature index exceeds model dimension");
    }
  }

  TextTripleModel model;
  model.source = FeatureSource::kExternal;
  model.dim = dim;
  model.lambda = params.lambda;
  model.outcome_scale = mean(outcomes);
  if (!(model.outcome_scale > 0.0)) {
    throw NormalizationError("mean outcome over the training slice must be > 0");
  }

  StableSum y1, y0, tsum;
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (treatments[i] == 1) {
      y1.add(outcomes[i]);
      ++n1;
    } else {
      y0.add(outcomes[i]);
    }
    tsum.add(treatments[i]);
  }
  const std::size_t n0 = n - n1;
  model.g1_trained = n1 > 0;
  model.g0_trained = n0 > 0;
  for (LinearHead* head : {&model.g1, &model.g0, &model.mu}) head->weights.assign(dim, 0.0);
  model.g1.bias = n1 > 0 ? y1.value() / static_cast<double>(n1) : model.outcome_scale;
  model.g0.bias = n0 > 0 ? y0.value() / static_cast<double>(n0) : model.outcome_scale;
  const double base_rate = std::clamp(tsum.value() / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  model.mu.bias = std::log(base_rate / (1.0 - base_rate));

  AdamHead s1(dim), s0(dim), smu(dim);
  SparseGrad d1(dim), d0(dim), dmu(dim);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(params.seed);

  const auto batch = static_cast<std::size_t>(params.batch_size);
  const std::size_t batches_per_epoch = (n + batch - 1) / batch;
  const auto total_steps = static_cast<double>(batches_per_epoch) * params.epochs;
  std::int64_t step = 0;
  const bool train_mu = params.lambda > 0.0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    StableSum epoch_loss;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      bool any_treated = false, any_control = false;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const SparseVector& x = features[i];
        const double y = outcomes[i];
        const int t = treatments[i];
        const double mu = sigmoid(model.mu.apply(x));
        double unit_loss = params.lambda * bce(mu, t);
        if (t == 1) {
          const double e = model.g1.apply(x) - y;
          unit_loss += std::abs(e) / model.outcome_scale;
          d1.add(x, sign_of(e) / model.outcome_scale * inv_b);
          any_treated = true;
        } else {
          const double e = model.g0.apply(x) - y;
          unit_loss += std::abs(e) / model.outcome_scale;
          d0.add(x, sign_of(e) / model.outcome_scale * inv_b);
          any_control = true;
        }
        if (train_mu) dmu.add(x, params.lambda * (mu - t) * inv_b);
        epoch_loss.add(unit_loss);
      }
      ++step;
      const double lr = params.learning_rate *
                        (1.0 - 0.9 * static_cast<double>(step - 1) / total_steps);
      // A head only moves on batches that carry its loss term.
      if (any_treated) d1.apply(model.g1, s1, step, lr);
      if (any_control) d0.apply(model.g0, s0, step, lr);
      if (train_mu) dmu.apply(model.mu, smu, step, lr);
    }
    model.epoch_loss.push_back(epoch_loss.value() / static_cast<double>(n));
  }
  model.trained = true;
  return model;
}

TextTripleModel fit_text_triple(const std::vector<std::string>& texts,
                                std::span<const double> outcomes,
                                std::span<const int> treatments,
                                const TextTrainParams& params,
                                const FeaturizerConfig& featurizer) {
  featurizer.validate();
  std::vector<SparseVector> features;
  features.reserve(texts.size());
  for (const auto& t : texts) features.push_back(featurize(featurizer, t));
  TextTripleModel model =
      fit_text_triple_features(features, featurizer.hash_dim, outcomes, treatments, params);
  model.source = FeatureSource::kHashed;
  model.featurizer = featurizer;
  return model;
}

TriplePrediction predict_triple_features(const TextTripleModel& model,
                                         const std::vector<SparseVector>& features) {
  if (!model.trained) throw ParameterError("text triple model is not trained");
  const auto n = static_cast<Eigen::Index>(features.size());
  TriplePrediction out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const SparseVector& x = features[static_cast<std::size_t>(i)];
    if (!x.indices.empty() && x.indices.back() >= model.dim) {
      throw ShapeError("feature index exceeds model dimension");
    }
    out.g1(i) = model.g1.apply(x);
    out.g0(i) = model.g0.apply(x);
    out.mu(i) = sigmoid(model.mu.apply(x));
  }
  return out;
}

TriplePrediction predict_triple(const TextTripleModel& model,
                                const std::vector<std::string>& texts) {
  if (model.source != FeatureSource::kHashed) {
    throw ParameterError("model was trained on external features; use predict_triple_features");
  }
  std::vector<SparseVector> features;
  features.reserve(texts.size());
  for (const auto& t : texts) features.push_back(featurize(model.featurizer, t));
  return predict_triple_features(model, features);
}

std::vector<SparseVector> dense_rows_to_sparse(const Eigen::MatrixXd& rows) {
  std::vector<SparseVector> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    auto& v = out[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (rows(r, c) != 0.0) {
        v.indices.push_back(static_cast<std::uint32_t>(c));
        v.values.push_back(rows(r, c));
      }
    }
  }
  return out;
}

}  // namespace textcausal
