#include "textcausal/learners/gbt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/random.hpp"

namespace textcausal {

namespace {

constexpr int kMaxBins = 256;
// Raw scores are clamped so probabilities stay strictly inside (0, 1).
constexpr double kMaxLogit = 30.0;

double sigmoid(double z) {
  z = std::clamp(z, -kMaxLogit, kMaxLogit);
  return 1.0 / (1.0 + std::exp(-z));
}

// Quantized copy of the training matrix, column-major.
struct BinnedColumns {
  std::size_t n_rows = 0;
  std::vector<std::vector<double>> thresholds;  // per feature, ascending
  std::vector<std::vector<std::uint8_t>> bins;   // per feature, per row
};

std::vector<double> make_thresholds(std::vector<double> column, int max_bins) {
  std::sort(column.begin(), column.end());
  std::vector<double> uniques;
  for (double v : column) {
    if (uniques.empty() || v != uniques.back()) uniques.push_back(v);
  }
  std::vector<double> out;
  if (static_cast<int>(uniques.size()) <= max_bins) {
    for (std::size_t i = 0; i + 1 < uniques.size(); ++i) {
      out.push_back(0.5 * (uniques[i] + uniques[i + 1]));
    }
    return out;
  }
  const std::size_t n = column.size();
  for (int b = 1; b < max_bins; ++b) {
    const double cut = column[(static_cast<std::size_t>(b) * n) / static_cast<std::size_t>(max_bins)];
    if (cut >= uniques.back()) break;
    if (out.empty() || cut > out.back()) out.push_back(cut);
  }
  return out;
}

BinnedColumns bin_features(const Eigen::MatrixXd& x, int max_bins) {
  BinnedColumns out;
  out.n_rows = static_cast<std::size_t>(x.rows());
  out.thresholds.resize(static_cast<std::size_t>(x.cols()));
  out.bins.resize(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> column(x.col(f).data(), x.col(f).data() + x.rows());
    auto& th = out.thresholds[static_cast<std::size_t>(f)];
    th = make_thresholds(column, max_bins);
    auto& b = out.bins[static_cast<std::size_t>(f)];
    b.resize(out.n_rows);
    for (std::size_t r = 0; r < out.n_rows; ++r) {
      b[r] = static_cast<std::uint8_t>(
          std::lower_bound(th.begin(), th.end(), column[r]) - th.begin());
    }
  }
  return out;
}

struct HistBin {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;
};

struct SplitChoice {
  int feature = -1;
  int bin = -1;  // rows with bin <= this go left
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedColumns& data, const std::vector<double>& grad,
              const std::vector<double>& hess, const GbtParams& params)
      : data_(data), grad_(grad), hess_(hess), params_(params) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    grow(tree, 0, rows, 0);
    return tree;
  }

  // Split bins recorded during growth, for fast in-sample traversal.
  const std::vector<int>& split_bins() const { return split_bins_; }

 private:
  void make_leaf(RegressionTree& tree, int node, const std::vector<std::size_t>& rows) {
    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    tree.nodes[static_cast<std::size_t>(node)].value =
        -params_.learning_rate * g / (h + params_.l2_leaf);
  }

  void grow(RegressionTree& tree, int node, std::vector<std::size_t>& rows, int depth) {
    if (split_bins_.size() < tree.nodes.size()) split_bins_.resize(tree.nodes.size(), -1);
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(params_.min_leaf, 1));
    if (depth >= params_.max_depth || rows.size() < 2 * min_leaf) {
      make_leaf(tree, node, rows);
      return;
    }
    const SplitChoice split = best_split(rows, min_leaf);
    if (split.feature < 0) {
      make_leaf(tree, node, rows);
      return;
    }
    const auto& col = data_.bins[static_cast<std::size_t>(split.feature)];
    std::vector<std::size_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (std::size_t r : rows) {
      (col[r] <= split.bin ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    n.feature = split.feature;
    n.threshold = data_.thresholds[static_cast<std::size_t>(split.feature)]
                                  [static_cast<std::size_t>(split.bin)];
    n.left = left_id;
    n.right = right_id;
    split_bins_.resize(tree.nodes.size(), -1);
    split_bins_[static_cast<std::size_t>(node)] = split.bin;
    grow(tree, left_id, left, depth + 1);
    grow(tree, right_id, right, depth + 1);
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, std::size_t min_leaf) {
    double g_total = 0.0, h_total = 0.0;
    for (std::size_t r : rows) {
      g_total += grad_[r];
      h_total += hess_[r];
    }
    const double lambda = params_.l2_leaf;
    const double parent = g_total * g_total / (h_total + lambda);
    SplitChoice best;
    std::array<HistBin, kMaxBins> hist;
    for (std::size_t f = 0; f < data_.bins.size(); ++f) {
      const std::size_t n_thresholds = data_.thresholds[f].size();
      if (n_thresholds == 0) continue;
      hist.fill(HistBin{});
      const auto& col = data_.bins[f];
      for (std::size_t r : rows) {
        HistBin& b = hist[col[r]];
        b.grad += grad_[r];
        b.hess += hess_[r];
        ++b.count;
      }
      double gl = 0.0, hl = 0.0;
      std::size_t cl = 0;
      for (std::size_t b = 0; b < n_thresholds; ++b) {
        gl += hist[b].grad;
        hl += hist[b].hess;
        cl += hist[b].count;
        if (cl < min_leaf) continue;
        if (rows.size() - cl < min_leaf) break;
        const double gr = g_total - gl;
        const double hr = h_total - hl;
        const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
        if (gain > best.gain + 1e-12) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.bin = static_cast<int>(b);
        }
      }
    }
    return best;
  }

  const BinnedColumns& data_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const GbtParams& params_;
  std::vector<int> split_bins_;
};

double leaf_value_binned(const RegressionTree& tree, const std::vector<int>& split_bins,
                         const BinnedColumns& data, std::size_t row) {
  int node = 0;
  for (;;) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.feature < 0) return n.value;
    const int bin = data.bins[static_cast<std::size_t>(n.feature)][row];
    node = bin <= split_bins[static_cast<std::size_t>(node)] ? n.left : n.right;
  }
}

double training_loss(GbtObjective objective, const Eigen::VectorXd& y,
                      const std::vector<double>& raw) {
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    if (objective == GbtObjective::kSquaredError) {
      const double e = raw[i] - yi;
      total += e * e;
    } else {
      const double p = sigmoid(raw[i]);
      total -= yi * std::log(p) + (1.0 - yi) * std::log1p(-p);
    }
  }
  return total / static_cast<double>(raw.size());
}

}  // namespace

const char* to_string(GbtObjective objective) {
  return objective == GbtObjective::kLogistic ? "logistic" : "squared_error";
}

GbtObjective gbt_objective_from_string(const std::string& name) {
  if (name == "logistic") return GbtObjective::kLogistic;
  if (name == "squared_error") return GbtObjective::kSquaredError;
  throw ConfigError("unknown gbt objective '" + name + "'");
}

double RegressionTree::predict(std::span<const double> row) const {
  int node = 0;
  for (;;) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    if (n.feature < 0) return n.value;
    node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
}

int RegressionTree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.feature < 0) continue;
    depth[static_cast<std::size_t>(n.left)] = depth[i] + 1;
    depth[static_cast<std::size_t>(n.right)] = depth[i] + 1;
    best = std::max(best, depth[i] + 1);
  }
  return best;
}

GbtModel fit_gbt(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                 GbtObjective objective, const GbtParams& params) {
  if (params.n_trees < 0) throw ParameterError("n_trees must be >= 0");
  if (params.max_depth < 1) throw ParameterError("max_depth must be >= 1");
  if (!(params.learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) {
    throw ParameterError("subsample must lie in (0, 1]");
  }
  if (params.max_bins < 2 || params.max_bins > kMaxBins - 1) {
    throw ParameterError("max_bins must lie in [2, 255]");
  }
  if (features.rows() != targets.size()) {
    throw ShapeError("features have " + std::to_string(features.rows()) +
                     " rows but targets have " + std::to_string(targets.size()));
  }
  if (features.rows() == 0) throw ParameterError("gbt needs at least one row");
  if (!features.allFinite() || !targets.allFinite()) {
    throw NumericError("non-finite value in gbt inputs");
  }
  if (objective == GbtObjective::kLogistic) {
    for (Eigen::Index i = 0; i < targets.size(); ++i) {
      if (targets(i) != 0.0 && targets(i) != 1.0) {
        throw ParameterError("logistic objective needs targets in {0, 1}");
      }
    }
  }

  const std::size_t n = static_cast<std::size_t>(features.rows());
  GbtModel model;
  model.learning_rate = params.learning_rate;
  model.objective = objective;
  model.n_features = static_cast<int>(features.cols());
  const double base_rate = targets.mean();
  if (objective == GbtObjective::kSquaredError) {
    model.base_score = base_rate;
  } else {
    const double p = std::clamp(base_rate, 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(p / (1.0 - p));
  }

  std::vector<double> raw(n, model.base_score);
  model.train_loss.push_back(training_loss(objective, targets, raw));
  if (params.n_trees == 0) return model;

  const BinnedColumns data = bin_features(features, params.max_bins);
  std::vector<double> grad(n), hess(n);
  Rng rng(params.seed);
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  const std::size_t sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));

  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = targets(static_cast<Eigen::Index>(i));
      if (objective == GbtObjective::kSquaredError) {
        grad[i] = raw[i] - yi;
        hess[i] = 1.0;
      } else {
        const double p = sigmoid(raw[i]);
        grad[i] = p - yi;
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
    }
    std::vector<std::size_t> rows;
    if (sample_size < n) {
      std::vector<std::size_t> shuffled = all_rows;
      // Partial Fisher-Yates: the first sample_size slots form the sample.
      for (std::size_t i = 0; i < sample_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(shuffled[i], shuffled[j]);
      }
      rows.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(sample_size));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all_rows;
    }
    TreeBuilder builder(data, grad, hess, params);
    RegressionTree tree = builder.build(std::move(rows));
    const auto& split_bins = builder.split_bins();
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] += leaf_value_binned(tree, split_bins, data, i);
    }
    model.trees.push_back(std::move(tree));
    model.train_loss.push_back(training_loss(objective, targets, raw));
  }
  return model;
}

Eigen::VectorXd predict_raw(const GbtModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.n_features) {
    throw ShapeError("gbt model expects " + std::to_string(model.n_features) +
                     " features, got " + std::to_string(features.cols()));
  }
  const Eigen::Index n = features.rows();
  Eigen::VectorXd out = Eigen::VectorXd::Constant(n, model.base_score);
  // Row-major copy so each row is contiguous for tree traversal.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = features;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<const double> row(rows.row(i).data(), static_cast<std::size_t>(rows.cols()));
    double score = model.base_score;
    for (const auto& tree : model.trees) score += tree.predict(row);
    out(i) = score;
  }
  return out;
}

Eigen::VectorXd predict(const GbtModel& model, const Eigen::MatrixXd& features) {
  Eigen::VectorXd raw = predict_raw(model, features);
  if (model.objective == GbtObjective::kLogistic) {
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw(i) = sigmoid(raw(i));
  }
  return raw;
}

}  // namespace textcausal
