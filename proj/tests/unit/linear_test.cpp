#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/random.hpp"
#include "textcausal/learners/linear.hpp"
#include "textcausal/learners/model_io.hpp"

namespace textcausal {
namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) x(r, c) = rng.normal();
  return x;
}

TEST(OlsTest, ExactLine) {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  Eigen::VectorXd y(3);
  y << 1, 3, 5;
  const LinearModel m = fit_ols(x, y);
  EXPECT_NEAR(m.intercept, 1.0, 1e-12);
  EXPECT_NEAR(m.weights(0), 2.0, 1e-12);
  EXPECT_FALSE(m.jittered);
}

TEST(OlsTest, ConstantTarget) {
  const Eigen::MatrixXd x = random_matrix(20, 2, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 0.37);
  const LinearModel m = fit_ols(x, y);
  EXPECT_NEAR(m.intercept, 0.37, 1e-12);
  EXPECT_NEAR(m.weights.norm(), 0.0, 1e-12);
}

TEST(OlsTest, ResidualsOrthogonalToColumns) {
  const Eigen::MatrixXd x = random_matrix(50, 3, 2);
  const Eigen::VectorXd y = random_matrix(50, 1, 3).col(0);
  const LinearModel m = fit_ols(x, y);
  const Eigen::VectorXd resid = y - predict(m, x);
  EXPECT_LT(std::abs(resid.sum()), 1e-8);
  for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(resid.dot(x.col(c))), 1e-8) << "column " << c;
}

TEST(OlsTest, CollinearColumnsUseJitter) {
  Eigen::MatrixXd x = random_matrix(30, 2, 4);
  x.col(1) = 2.0 * x.col(0);
  const Eigen::VectorXd y = x.col(0) * 3.0;
  const LinearModel m = fit_ols(x, y);
  EXPECT_TRUE(m.jittered);
  EXPECT_LT((predict(m, x) - y).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(OlsTest, NonFiniteInputRejected) {
  Eigen::MatrixXd x = random_matrix(5, 1, 5);
  Eigen::VectorXd y = x.col(0);
  y(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fit_ols(x, y), NumericError);
}

TEST(PredictTest, LinearOnKnownInput) {
  LinearModel m;
  m.intercept = 1.0;
  m.weights = Eigen::VectorXd::Constant(1, 2.0);
  Eigen::MatrixXd x(1, 1);
  x << 3.0;
  EXPECT_DOUBLE_EQ(predict(m, x)(0), 7.0);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Zero(1, 2)), ShapeError);
}

TEST(ElasticNetTest, NoPenaltyMatchesOls) {
  const Eigen::MatrixXd x = random_matrix(80, 4, 6);
  Eigen::VectorXd y = x * Eigen::Vector4d(0.5, -1.0, 0.0, 2.0);
  y += 0.1 * random_matrix(80, 1, 7).col(0);
  const LinearModel ols = fit_ols(x, y);
  const LinearModel en = fit_elastic_net(x, y, 0.0, 0.0);
  EXPECT_TRUE(en.converged);
  EXPECT_LT((ols.weights - en.weights).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(ols.intercept, en.intercept, 1e-6);
}

TEST(ElasticNetTest, HugePenaltyShrinksEverything) {
  const Eigen::MatrixXd x = random_matrix(40, 3, 8);
  const Eigen::VectorXd y = x.col(0) + Eigen::VectorXd::Constant(40, 0.25);
  const LinearModel m = fit_elastic_net(x, y, 1e6, 0.0);
  EXPECT_EQ(m.weights.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(m.intercept, y.mean(), 1e-12);
}

TEST(ElasticNetTest, UnivariateClosedForm) {
  // With centered x and y, the objective (1/2n)||y - xw||^2 + l1|w| + l2/2 w^2
  // is minimised at S(x'y/n, l1) / (x'x/n + l2).
  const Eigen::MatrixXd x = random_matrix(60, 1, 9);
  const Eigen::VectorXd y = 0.8 * x.col(0) + 0.3 * random_matrix(60, 1, 10).col(0);
  const double n = 60.0;
  const Eigen::VectorXd xc = x.col(0).array() - x.col(0).mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double rho = xc.dot(yc) / n;
  const double norm2 = xc.squaredNorm() / n;
  for (double l1 : {0.0, 0.05, 0.3, 5.0}) {
    for (double l2 : {0.0, 0.5}) {
      const double expected = soft_threshold(rho, l1) / (norm2 + l2);
      const LinearModel m = fit_elastic_net(x, y, l1, l2);
      EXPECT_NEAR(m.weights(0), expected, 1e-10) << "l1=" << l1 << " l2=" << l2;
      EXPECT_NEAR(m.intercept, y.mean() - expected * x.col(0).mean(), 1e-10);
    }
  }
}

TEST(ElasticNetTest, SparsityPattern) {
  const Eigen::MatrixXd x = random_matrix(200, 6, 11);
  const Eigen::VectorXd y = 2.0 * x.col(1) - 1.5 * x.col(4) + 0.05 * random_matrix(200, 1, 12).col(0);
  const LinearModel m = fit_elastic_net(x, y, 0.2, 0.0);
  for (int c : {0, 2, 3, 5}) EXPECT_EQ(m.weights(c), 0.0) << "column " << c;
  EXPECT_GT(m.weights(1), 1.0);
  EXPECT_LT(m.weights(4), -1.0);
}

TEST(ElasticNetTest, NonConvergenceIsFlagged) {
  const Eigen::MatrixXd x = random_matrix(50, 5, 13);
  const Eigen::VectorXd y = x.rowwise().sum();
  const LinearModel m = fit_elastic_net(x, y, 0.01, 0.0, 1, 1e-14);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 1);
}

TEST(ElasticNetTest, ParameterErrors) {
  const Eigen::MatrixXd x = random_matrix(10, 1, 14);
  const Eigen::VectorXd y = x.col(0);
  EXPECT_THROW(fit_elastic_net(x, y, -1.0, 0.0), ParameterError);
  EXPECT_THROW(fit_elastic_net(x, y, 0.0, -1.0), ParameterError);
}

TEST(LinearModelIoTest, JsonRoundTrip) {
  const Eigen::MatrixXd x = random_matrix(30, 3, 15);
  const LinearModel m = fit_elastic_net(x, x.col(0), 0.01, 0.1);
  const LinearModel back = linear_model_from_json(to_json(m));
  EXPECT_EQ(back.intercept, m.intercept);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(predict(back, x), predict(m, x));
  EXPECT_THROW(linear_model_from_json(nlohmann::json{{"format", "other"}}), SchemaError);
}

}  // namespace
}  // namespace textcausal
