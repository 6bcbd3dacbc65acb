#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/random.hpp"
#include "textcausal/dr/estimators.hpp"

namespace textcausal {
namespace {

std::vector<ScoreRow> random_rows(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScoreRow> rows;
  const char* groups[] = {"a", "b", "c"};
  for (int i = 0; i < n; ++i) {
    const int t = rng.bernoulli(0.4) ? 1 : 0;
    rows.push_back(make_score_row("u" + std::to_string(i), i % 3, rng.uniform(), t,
                                  groups[rng.below(3)], rng.uniform(), rng.uniform(),
                                  0.1 + 0.8 * rng.uniform(), 0.01));
  }
  return rows;
}

double naive_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double naive_sd(const std::vector<double>& v) {
  const double m = naive_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

TEST(AteTest, ConstantLabels) {
  std::vector<ScoreRow> rows(7);
  for (auto& r : rows) r.dr_label = 0.125;
  const Estimate e = estimate_ate(rows);
  EXPECT_EQ(e.point, 0.125);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.ci_low, e.ci_high);
}

TEST(AteTest, MatchesDirectFormula) {
  const auto rows = random_rows(101, 1);
  std::vector<double> psi;
  for (const auto& r : rows) psi.push_back(r.dr_label);
  const Estimate e = estimate_ate(rows, 0.9);
  EXPECT_NEAR(e.point, naive_mean(psi), 1e-12);
  EXPECT_NEAR(e.std_error, naive_sd(psi) / std::sqrt(101.0), 1e-12);
  EXPECT_NEAR(e.ci_high - e.point, 1.6448536269514722 * e.std_error, 1e-12);
  EXPECT_EQ(e.n_effective, 101u);
}

TEST(AteTest, DuplicatingRowsShrinksErrorBySqrtTwo) {
  const auto rows = random_rows(40, 2);
  auto doubled = rows;
  doubled.insert(doubled.end(), rows.begin(), rows.end());
  const Estimate a = estimate_ate(rows), b = estimate_ate(doubled);
  EXPECT_NEAR(a.point, b.point, 1e-14);
  EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(2.0), 1e-12);
}

TEST(AteTest, EmptyIsEstimationError) {
  EXPECT_THROW(estimate_ate(std::vector<ScoreRow>{}), EstimationError);
}

TEST(AtetTest, FourRowHandEvaluation) {
  // All treated with constant mu = p: psi_i = theta_i + p * (y_i - g1_i) / p.
  std::vector<ScoreRow> rows;
  const double g1[] = {0.5, 0.6, 0.3, 0.8}, g0[] = {0.4, 0.2, 0.3, 0.5}, y[] = {0.7, 0.5, 0.2, 0.9};
  const double p = 0.6;
  for (int i = 0; i < 4; ++i) rows.push_back(make_score_row(std::to_string(i), 0, y[i], 1, "", g1[i], g0[i], p, 0.01));
  double expected = 0;
  for (int i = 0; i < 4; ++i) expected += (g1[i] - g0[i]) + (y[i] - g1[i]);
  expected /= 4;
  EXPECT_NEAR(estimate_atet(rows).point, expected, 1e-12);
}

TEST(AtetTest, MixedArmsMatchDirectFormula) {
  const auto rows = random_rows(60, 3);
  double share = 0;
  for (const auto& r : rows) share += r.treatment;
  share /= rows.size();
  std::vector<double> psi;
  for (const auto& r : rows) {
    const double g_t = r.treatment ? r.g1_hat : r.g0_hat;
    psi.push_back((r.treatment * r.theta_tilde + r.mu_hat * (r.outcome - g_t) * r.h_tilde) / share);
  }
  const Estimate e = estimate_atet(rows);
  EXPECT_NEAR(e.point, naive_mean(psi), 1e-12);
  EXPECT_NEAR(e.std_error, naive_sd(psi) / std::sqrt(60.0), 1e-12);
}

TEST(AtetTest, ZeroResidualsGiveTreatedMeanTheta) {
  auto rows = random_rows(30, 4);
  double num = 0, treated = 0;
  for (auto& r : rows) {
    r.outcome = r.treatment ? r.g1_hat : r.g0_hat;
    num += r.treatment * r.theta_tilde;
    treated += r.treatment;
  }
  EXPECT_NEAR(estimate_atet(rows).point, num / treated, 1e-12);
}

TEST(AtetTest, NoTreatedIsEstimationError) {
  auto rows = random_rows(10, 5);
  for (auto& r : rows) r.treatment = 0;
  EXPECT_THROW(estimate_atet(rows), EstimationError);
}

TEST(GateTest, WholePopulationEqualsAte) {
  const auto rows = random_rows(50, 6);
  const Estimate g = estimate_gate(rows, std::vector<bool>(50, true));
  const Estimate a = estimate_ate(rows);
  EXPECT_EQ(g.point, a.point);
  EXPECT_EQ(g.std_error, a.std_error);
}

TEST(GateTest, SingleUnitIsItsLabel) {
  const auto rows = random_rows(20, 7);
  std::vector<bool> mask(20, false);
  mask[13] = true;
  EXPECT_NEAR(estimate_gate(rows, mask).point, rows[13].dr_label, 1e-14);
}

TEST(GateTest, ShareWeightedGroupsRecoverAte) {
  const auto rows = random_rows(90, 8);
  std::map<std::string, std::size_t> counts;
  for (const auto& r : rows) counts[r.group]++;
  double weighted = 0;
  for (const auto& [g, c] : counts) weighted += estimate_gate(rows, g).point * c / 90.0;
  EXPECT_NEAR(weighted, estimate_ate(rows).point, 1e-12);
}

TEST(GateTest, ErrorsAndNaming) {
  const auto rows = random_rows(10, 9);
  EXPECT_THROW(estimate_gate(rows, std::vector<bool>(10, false)), EstimationError);
  EXPECT_THROW(estimate_gate(rows, std::vector<bool>(9, true)), ShapeError);
  EXPECT_THROW(estimate_gate(rows, std::string("missing")), EstimationError);
  EXPECT_EQ(estimate_gate(rows, std::string("a")).group, "a");
}

TEST(EstimateTest, JsonRoundTrip) {
  const auto rows = random_rows(25, 10);
  const Estimate e = estimate_gate(rows, std::string("b"));
  const Estimate back = estimate_from_json(to_json(e));
  EXPECT_EQ(back.estimand, Estimand::kGate);
  EXPECT_EQ(back.group, "b");
  EXPECT_EQ(back.point, e.point);
  EXPECT_EQ(back.std_error, e.std_error);
  EXPECT_EQ(back.ci_low, e.ci_low);
  EXPECT_EQ(back.n_effective, e.n_effective);
}

}  // namespace
}  // namespace textcausal
