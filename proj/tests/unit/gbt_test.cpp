#include <gtest/gtest.h>

#include <cmath>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/random.hpp"
#include "textcausal/eval/metrics.hpp"
#include "textcausal/learners/gbt.hpp"
#include "textcausal/learners/model_io.hpp"

namespace textcausal {
namespace {

struct Sample {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Sample linear_sample(int n, std::uint64_t seed, double noise) {
  Rng rng(seed);
  Sample s{Eigen::MatrixXd(n, 1), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    s.x(i, 0) = rng.uniform();
    s.y(i) = 3.0 * s.x(i, 0) + noise * rng.normal();
  }
  return s;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

TEST(GbtTest, ZeroTreesPredictsBaseScore) {
  const Sample s = linear_sample(50, 1, 0.1);
  GbtParams p;
  p.n_trees = 0;
  const GbtModel m = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  const Eigen::VectorXd pred = predict(m, s.x);
  for (int i = 0; i < pred.size(); ++i) EXPECT_NEAR(pred(i), s.y.mean(), 1e-12);

  Eigen::VectorXd labels(8);
  labels << 1, 0, 0, 1, 0, 0, 0, 1;
  const GbtModel logit = fit_gbt(Eigen::MatrixXd::Zero(8, 1), labels, GbtObjective::kLogistic, p);
  EXPECT_NEAR(logit.base_score, std::log(3.0 / 5.0), 1e-12);
  EXPECT_NEAR(predict(logit, Eigen::MatrixXd::Ones(2, 1))(1), 3.0 / 8.0, 1e-12);
}

TEST(GbtTest, StepFunctionAccuracy) {
  Rng rng(2);
  const int n = 1000;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform();
    y(i) = x(i, 0) > 0.5 ? 1.0 : 0.0;
  }
  GbtParams p;
  p.n_trees = 100;
  p.max_depth = 2;
  for (auto objective : {GbtObjective::kSquaredError, GbtObjective::kLogistic}) {
    const Eigen::VectorXd pred = predict(fit_gbt(x, y, objective, p), x);
    int correct = 0;
    for (int i = 0; i < n; ++i) correct += (pred(i) > 0.5) == (y(i) > 0.5);
    EXPECT_GE(correct / double(n), 0.99) << to_string(objective);
  }
}

TEST(GbtTest, OutOfSampleCorrelation) {
  const Sample train = linear_sample(2000, 3, 0.01);
  const Sample test = linear_sample(1000, 4, 0.01);
  GbtParams p;
  p.n_trees = 200;
  const GbtModel m = fit_gbt(train.x, train.y, GbtObjective::kSquaredError, p);
  EXPECT_GT(pearson(to_vec(predict(m, test.x)), to_vec(test.y)), 0.99);
}

TEST(GbtTest, TrainLossNonIncreasing) {
  const Sample s = linear_sample(500, 5, 0.2);
  GbtParams p;
  p.n_trees = 50;
  const GbtModel m = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  ASSERT_EQ(m.train_loss.size(), 51u);
  for (std::size_t i = 1; i < m.train_loss.size(); ++i) {
    EXPECT_LE(m.train_loss[i], m.train_loss[i - 1] + 1e-12) << "stage " << i;
  }
}

TEST(GbtTest, LogisticOutputsAreProbabilities) {
  Rng rng(6);
  const int n = 600;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform();
    x(i, 1) = rng.uniform();
    y(i) = rng.bernoulli(0.2 + 0.6 * x(i, 0)) ? 1.0 : 0.0;
  }
  GbtParams p;
  p.n_trees = 100;
  const Eigen::VectorXd prob = predict(fit_gbt(x, y, GbtObjective::kLogistic, p), x);
  EXPECT_GT(prob.minCoeff(), 0.0);
  EXPECT_LT(prob.maxCoeff(), 1.0);
}

TEST(GbtTest, SeededDeterminismWithSubsampling) {
  const Sample s = linear_sample(400, 7, 0.3);
  GbtParams p;
  p.n_trees = 30;
  p.subsample = 0.6;
  p.seed = 9;
  const GbtModel a = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  const GbtModel b = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  p.seed = 10;
  const GbtModel c = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  EXPECT_NE(to_json(a).dump(), to_json(c).dump());
}

TEST(GbtTest, DepthAndLeafSizeRespected) {
  const Sample s = linear_sample(300, 8, 0.1);
  GbtParams p;
  p.n_trees = 10;
  p.max_depth = 3;
  const GbtModel m = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  for (const auto& tree : m.trees) EXPECT_LE(tree.depth(), 3);
}

TEST(GbtTest, ParameterAndShapeErrors) {
  const Sample s = linear_sample(20, 9, 0.1);
  GbtParams p;
  p.max_depth = 0;
  EXPECT_THROW(fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p), ParameterError);
  p = GbtParams{};
  p.n_trees = -1;
  EXPECT_THROW(fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p), ParameterError);
  p = GbtParams{};
  p.n_trees = 2;
  EXPECT_THROW(fit_gbt(s.x, s.y, GbtObjective::kLogistic, p), ParameterError);
  const GbtModel m = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Zero(3, 2)), ShapeError);
}

TEST(GbtTest, JsonRoundTripPreservesPredictions) {
  const Sample s = linear_sample(200, 10, 0.1);
  GbtParams p;
  p.n_trees = 20;
  const GbtModel m = fit_gbt(s.x, s.y, GbtObjective::kSquaredError, p);
  const GbtModel back = gbt_model_from_json(to_json(m));
  EXPECT_EQ(predict(back, s.x), predict(m, s.x));
}

}  // namespace
}  // namespace textcausal
