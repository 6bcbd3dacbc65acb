#include "textcausal/dr/blp.hpp"

#include <cmath>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/learners/linear.hpp"

namespace textcausal {

namespace {

constexpr double kMinThetaVariance = 1e-20;

int common_fold(std::span<const ScoreRow> rows) {
  return rows.empty() ? 0 : rows.front().fold;
}

}  // namespace

BlpCoefficients blp_fallback(std::span<const ScoreRow> rows, bool centered) {
  std::vector<double> labels, theta;
  for (const auto& r : rows) {
    labels.push_back(r.dr_label);
    theta.push_back(r.theta_tilde);
  }
  BlpCoefficients c;
  c.fold = common_fold(rows);
  c.n = rows.size();
  c.centered = centered;
  c.a1 = mean(labels);
  c.center = centered ? mean(theta) : 0.0;
  c.b1 = 0.0;
  c.se_a1 = population_sd(labels) / std::sqrt(static_cast<double>(labels.size()));
  c.degenerate = true;
  return c;
}

BlpCoefficients fit_blp(std::span<const ScoreRow> rows, bool centered) {
  if (rows.size() < 3) {
    throw EstimationError("BLP needs at least 3 rows, got " + std::to_string(rows.size()));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  std::vector<double> theta(rows.size());
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    theta[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)].theta_tilde;
    labels(i) = rows[static_cast<std::size_t>(i)].dr_label;
  }
  const double theta_mean = mean(theta);
  const double theta_sd = population_sd(theta);
  if (theta_sd * theta_sd <= kMinThetaVariance) {
    throw DegenerateBlpError("theta_tilde has zero variance in fold " +
                                 std::to_string(common_fold(rows)),
                             mean(std::span<const double>(labels.data(), rows.size())));
  }
  const double center = centered ? theta_mean : 0.0;
  Eigen::MatrixXd regressor(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) regressor(i, 0) = theta[static_cast<std::size_t>(i)] - center;

  const LinearModel ols = fit_ols(regressor, labels);
  BlpCoefficients c;
  c.fold = common_fold(rows);
  c.n = rows.size();
  c.centered = centered;
  c.center = center;
  c.a1 = ols.intercept;
  c.b1 = ols.weights(0);

  // HC1 sandwich: (X'X)^-1 X' diag(e^2) X (X'X)^-1 * n / (n - 2).
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = regressor.col(0);
  const Eigen::VectorXd resid = labels - design * Eigen::Vector2d(c.a1, c.b1);
  const Eigen::Matrix2d bread = (design.transpose() * design).inverse();
  Eigen::Matrix2d meat = Eigen::Matrix2d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d xi = design.row(i).transpose();
    meat += resid(i) * resid(i) * xi * xi.transpose();
  }
  const double dof = static_cast<double>(n) / static_cast<double>(n - 2);
  const Eigen::Matrix2d cov = bread * meat * bread * dof;
  c.se_a1 = std::sqrt(std::max(cov(0, 0), 0.0));
  c.se_b1 = std::sqrt(std::max(cov(1, 1), 0.0));
  if (!std::isfinite(c.a1) || !std::isfinite(c.b1)) {
    throw NumericError("BLP coefficients are not finite");
  }
  return c;
}

double cate_predict(const BlpCoefficients& coeffs, double theta_tilde) {
  return coeffs.a1 + coeffs.b1 * (theta_tilde - coeffs.center);
}

nlohmann::json to_json(const BlpCoefficients& c) {
  return nlohmann::json{{"fold", c.fold},     {"a1", c.a1},
                        {"b1", c.b1},         {"center", c.center},
                        {"se_a1", c.se_a1},   {"se_b1", c.se_b1},
                        {"n", c.n},           {"centered", c.centered},
                        {"degenerate", c.degenerate}};
}

BlpCoefficients blp_from_json(const nlohmann::json& j) {
  BlpCoefficients c;
  c.fold = j.at("fold").get<int>();
  c.a1 = j.at("a1").get<double>();
  c.b1 = j.at("b1").get<double>();
  c.center = j.at("center").get<double>();
  c.se_a1 = j.value("se_a1", 0.0);
  c.se_b1 = j.value("se_b1", 0.0);
  c.n = j.value("n", std::size_t{0});
  c.centered = j.value("centered", true);
  c.degenerate = j.value("degenerate", false);
  return c;
}

BiasTerms misspecification_biases(const Eigen::VectorXd& true_g1, const Eigen::VectorXd& true_g0,
                          const Eigen::VectorXd& true_mu, const Eigen::VectorXd& g1_hat,
                          const Eigen::VectorXd& g0_hat, const Eigen::VectorXd& mu_hat) {
  const Eigen::Index n = true_g1.size();
  if (true_g0.size() != n || true_mu.size() != n || g1_hat.size() != n ||
      g0_hat.size() != n || mu_hat.size() != n) {
    throw ShapeError("misspecification_biases: vectors are not aligned");
  }
  BiasTerms out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = mu_hat(i);
    if (!(m > 0.0 && m < 1.0)) {
      throw NumericError("mu_hat must lie strictly inside (0, 1); clip first");
    }
    out.bias1(i) = (true_mu(i) / m - 1.0) * (true_g1(i) - g1_hat(i));
    out.bias2(i) = (1.0 - (1.0 - true_mu(i)) / (1.0 - m)) * (true_g0(i) - g0_hat(i));
  }
  return out;
}

}  // namespace textcausal
