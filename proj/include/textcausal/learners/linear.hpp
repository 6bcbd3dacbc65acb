#pragma once

#include <Eigen/Dense>

namespace textcausal {

enum class Regularization { kNone, kL1, kElasticNet };

struct LinearModel {
  double intercept = 0.0;
  Eigen::VectorXd weights;
  Regularization regularization = Regularization::kNone;
  double l1 = 0.0;
  double l2 = 0.0;
  // Elastic net only: false when max_iter was reached first.
  bool converged = true;
  int iterations = 0;
  // True when OLS needed the ridge jitter fallback.
  bool jittered = false;
};

// Least squares with intercept via the normal equations. Falls back to a tiny
// ridge jitter when the system is singular.
LinearModel fit_ols(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

// Cyclic coordinate descent on
//   (1/2n) * ||y - b - Xw||^2 + l1 * ||w||_1 + (l2/2) * ||w||^2
// with an unpenalized intercept. Columns are centered internally but not
// rescaled; constant columns keep weight 0. Stops when the largest
// coefficient change in a sweep is below tol.
LinearModel fit_elastic_net(const Eigen::MatrixXd& features,
                            const Eigen::VectorXd& targets, double l1, double l2,
                            int max_iter = 10000, double tol = 1e-10);

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& features);

// Soft-thresholding operator S(z, g) = sign(z) * max(|z| - g, 0).
inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace textcausal
