#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "textcausal/dr/scores.hpp"

namespace textcausal {

// Per-fold regression of the DR label on (1, theta - center).
struct BlpCoefficients {
  int fold = 0;
  double a1 = 0.0;
  double b1 = 0.0;
  double center = 0.0;  // fold mean of theta_tilde; 0 for the uncentered form
  // Heteroskedasticity-robust (HC1) standard errors.
  double se_a1 = 0.0;
  double se_b1 = 0.0;
  std::size_t n = 0;
  bool centered = true;
  // Set when theta_tilde had no variance and the fallback was used.
  bool degenerate = false;
};

// OLS of dr_label on (1, theta_tilde - mean(theta_tilde)) over one fold's
// rows. With centered == false the regressor is theta_tilde itself and
// center is 0. Needs >= 3 rows; throws DegenerateBlpError when
// theta_tilde is constant.
BlpCoefficients fit_blp(std::span<const ScoreRow> rows_in_fold, bool centered = true);

// a1 = mean(dr_label), b1 = 0, flagged degenerate.
BlpCoefficients blp_fallback(std::span<const ScoreRow> rows_in_fold, bool centered = true);

// a1 + b1 * (theta_tilde - center)
double cate_predict(const BlpCoefficients& coeffs, double theta_tilde);

nlohmann::json to_json(const BlpCoefficients& coeffs);
BlpCoefficients blp_from_json(const nlohmann::json& j);

// Bias terms of the DR label's projection under misspecified nuisances:
//   bias1 = (mu / mu_hat - 1) * (g1 - g1_hat)
//   bias2 = (1 - (1 - mu) / (1 - mu_hat)) * (g0 - g0_hat)
struct BiasTerms {
  Eigen::VectorXd bias1;
  Eigen::VectorXd bias2;
};

BiasTerms misspecification_biases(const Eigen::VectorXd& true_g1, const Eigen::VectorXd& true_g0,
                          const Eigen::VectorXd& true_mu, const Eigen::VectorXd& g1_hat,
                          const Eigen::VectorXd& g0_hat, const Eigen::VectorXd& mu_hat);

}  // namespace textcausal
