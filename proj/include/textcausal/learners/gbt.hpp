#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace textcausal {

enum class GbtObjective { kSquaredError, kLogistic };

const char* to_string(GbtObjective objective);
GbtObjective gbt_objective_from_string(const std::string& name);

struct GbtParams {
  int n_trees = 300;
  int max_depth = 4;
  double learning_rate = 0.1;
  int min_leaf = 20;
  double subsample = 1.0;
  std::uint64_t seed = 0;
  // L2 penalty on leaf values (Newton step denominator).
  double l2_leaf = 1.0;
  int max_bins = 255;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x <= threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> row) const;
  int depth() const;
};

struct GbtModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // raw (link) scale
  GbtObjective objective = GbtObjective::kSquaredError;
  int n_features = 0;
  // Training objective after 0, 1, ..., n_trees stages (mean squared error
  // or mean log loss over the full training set).
  std::vector<double> train_loss;
};

GbtModel fit_gbt(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                 GbtObjective objective, const GbtParams& params);

// Raw additive score (log-odds for the logistic objective).
Eigen::VectorXd predict_raw(const GbtModel& model, const Eigen::MatrixXd& features);

// Mean prediction for squared error; probability in (0, 1) for logistic.
Eigen::VectorXd predict(const GbtModel& model, const Eigen::MatrixXd& features);

}  // namespace textcausal
