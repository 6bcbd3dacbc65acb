#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "textcausal/common/errors.hpp"
#include "textcausal/crossfit/crossfit.hpp"
#include "textcausal/dr/blp.hpp"
#include "textcausal/synthetic/generator.hpp"

namespace textcausal {
namespace {

SyntheticConfig config(std::size_t n, std::uint64_t seed) {
  SyntheticConfig c;
  c.n_units = n;
  c.seed = seed;
  return c;
}

TEST(GenerateTest, UnconfoundedDesignIsBalanced) {
  SyntheticConfig c = config(20000, 1);
  c.confounding_strength = 0.0;
  const SyntheticSample s = generate(c);
  for (double mu : s.truth.true_mu) ASSERT_DOUBLE_EQ(mu, 0.5);
  const double share = double(s.dataset.n_treated()) / 20000;
  EXPECT_LE(std::abs(share - 0.5), 3 * std::sqrt(0.25 / 20000));
}

TEST(GenerateTest, ConstantEffectOracle) {
  SyntheticConfig c = config(3000, 2);
  c.effect.kind = EffectKind::kConstant;
  c.effect.tau = -0.01;
  const SyntheticSample s = generate(c);
  const OracleEstimands o = oracle_estimands(s.truth, s.dataset);
  EXPECT_NEAR(o.ate, -0.01, 1e-15);
  EXPECT_NEAR(o.atet, -0.01, 1e-15);
  EXPECT_EQ(o.gate.size(), 10u);
  for (const auto& [g, v] : o.gate) EXPECT_NEAR(v, -0.01, 1e-15) << g;
  for (double v : o.cate) EXPECT_EQ(v, -0.01);
}

TEST(GenerateTest, GroupEffectOracle) {
  SyntheticConfig c = config(5000, 3);
  c.n_groups = 4;
  c.effect.group_effects = {-0.02, 0.0, 0.0, 0.0};
  const SyntheticSample s = generate(c);
  const std::string a = group_names(4)[0];
  std::size_t in_a = 0;
  for (const Unit& u : s.dataset.units()) in_a += u.group == a;
  const OracleEstimands o = oracle_estimands(s.truth, s.dataset);
  EXPECT_NEAR(o.gate.at(a), -0.02, 1e-15);
  EXPECT_NEAR(o.ate, -0.02 * double(in_a) / 5000, 1e-15);
  EXPECT_EQ(s.group_effects, c.effect.group_effects);
}

TEST(GenerateTest, AtetDiffersFromAteUnderConfounding) {
  SyntheticConfig c = config(20000, 4);
  c.effect.kind = EffectKind::kLinear;
  const SyntheticSample s = generate(c);
  double treated_sum = 0;
  std::size_t treated = 0;
  for (std::size_t i = 0; i < s.dataset.size(); ++i) {
    if (s.dataset[i].treatment) {
      treated_sum += s.truth.true_theta[i];
      ++treated;
    }
  }
  const OracleEstimands o = oracle_estimands(s.truth, s.dataset);
  EXPECT_NEAR(o.atet, treated_sum / treated, 1e-12);
  // Treated units have larger x0, and the effect rises with x0.
  EXPECT_GT(o.atet - o.ate, 0.005);
}

TEST(GenerateTest, PotentialOutcomeConsistency) {
  SyntheticConfig c = config(2000, 5);
  c.effect.kind = EffectKind::kLinear;
  const SyntheticSample s = generate(c);
  for (std::size_t i = 0; i < s.dataset.size(); ++i) {
    const Unit& u = s.dataset[i];
    EXPECT_EQ(u.outcome, u.treatment ? s.truth.y1[i] : s.truth.y0[i]);
    EXPECT_NEAR(s.truth.true_g1[i] - s.truth.true_g0[i], s.truth.true_theta[i], 1e-15);
    EXPECT_GE(s.truth.true_mu[i], 0.05);
    EXPECT_LE(s.truth.true_mu[i], 0.95);
    EXPECT_GE(u.outcome, 0.0);
    EXPECT_LE(u.outcome, 1.0);
  }
}

TEST(GenerateTest, TextDecodesToFeatureBinsAndGroup) {
  SyntheticConfig c = config(2000, 6);
  c.n_features = 8;
  const SyntheticSample s = generate(c);
  for (const Unit& u : s.dataset.units()) {
    const DecodedText d = decode_template(u.text, 8);
    ASSERT_EQ(d.group, u.group) << u.text;
    for (int f = 0; f < 8; ++f) ASSERT_EQ(d.bins[f], feature_bin(u.tabular[f])) << u.text;
  }
}

TEST(GenerateTest, DeterministicBytesAcrossThreads) {
  const SyntheticConfig c = config(3000, 7);
  const std::string a = to_csv_string(generate(c, 1).dataset);
  EXPECT_EQ(a, to_csv_string(generate(c, 1).dataset));
  EXPECT_EQ(a, to_csv_string(generate(c, 4).dataset));
  EXPECT_NE(a, to_csv_string(generate(config(3000, 8)).dataset));
}

TEST(GenerateTest, IndependentNoise) {
  SyntheticConfig c = config(500, 9);
  c.shared_noise = false;
  const SyntheticSample s = generate(c);
  int differ = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    differ += std::abs((s.truth.y1[i] - s.truth.y0[i]) - s.truth.true_theta[i]) > 1e-9;
  }
  EXPECT_GT(differ, 400);
}

TEST(GenerateTest, ConfigValidation) {
  SyntheticConfig c = config(100, 0);
  c.n_features = 2;
  EXPECT_THROW(generate(c), ConfigError);
  c = config(100, 0);
  c.effect.group_effects = {0.1};
  EXPECT_THROW(generate(c), ConfigError);
  c = config(100, 0);
  c.effect.tau = 0.5;
  c.effect.kind = EffectKind::kConstant;
  EXPECT_THROW(generate(c), ConfigError);
}

TEST(GenerateTest, ConfigJsonNamesFieldPath) {
  SyntheticConfig c = config(1234, 5);
  c.effect.kind = EffectKind::kLinear;
  const SyntheticConfig back = synthetic_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  try {
    synthetic_config_from_json(nlohmann::json{{"effect", {{"tau", "big"}}}});
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("synthetic.effect.tau"), std::string::npos) << e.what();
  }
  EXPECT_THROW(synthetic_config_from_json(nlohmann::json{{"n_unit", 5}}), ConfigError);
}

TEST(CorruptionTest, ShiftsApplyAsSpecified) {
  const SyntheticSample s = generate(config(200, 10));
  CorruptionSpec spec;
  spec.mode = CorruptionMode::kBoth;
  const NuisanceProvider p = corrupt_nuisances(s.truth, s.dataset, spec);
  for (std::size_t i = 0; i < 200; ++i) {
    const NuisanceValues& v = p.at(s.dataset[i].id);
    EXPECT_DOUBLE_EQ(v.g1, s.truth.true_g1[i] + 0.1);
    EXPECT_DOUBLE_EQ(v.g0, s.truth.true_g0[i] + 0.1);
    EXPECT_DOUBLE_EQ(v.mu, std::min(s.truth.true_mu[i] + 0.2, 0.99));
  }
}

double injected_ate_error(const SyntheticSample& s, CorruptionMode mode, double* se) {
  CorruptionSpec spec;
  spec.mode = mode;
  CrossfitConfig c;
  const CrossfitResult r = inject_nuisances(s.dataset, corrupt_nuisances(s.truth, s.dataset, spec), c);
  *se = r.ate().std_error;
  return r.ate().point - oracle_estimands(s.truth, s.dataset).ate;
}

TEST(CorruptionTest, SingleNuisanceShiftKeepsAteNearOracle) {
  SyntheticConfig c = config(20000, 11);
  c.effect.kind = EffectKind::kConstant;
  const SyntheticSample s = generate(c);
  for (auto mode : {CorruptionMode::kPropensityShift, CorruptionMode::kOutcomeShift}) {
    double se = 0;
    const double err = injected_ate_error(s, mode, &se);
    EXPECT_LE(std::abs(err), 3 * se) << to_string(mode);
  }
}

TEST(CorruptionTest, JointShiftBiasMatchesBiasTerms) {
  SyntheticConfig c = config(20000, 12);
  c.effect.kind = EffectKind::kConstant;
  const SyntheticSample s = generate(c);
  CorruptionSpec spec;
  spec.mode = CorruptionMode::kBoth;
  const NuisanceProvider p = corrupt_nuisances(s.truth, s.dataset, spec);
  const auto n = static_cast<Eigen::Index>(s.dataset.size());
  Eigen::VectorXd g1(n), g0(n), mu(n), g1h(n), g0h(n), muh(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const NuisanceValues& v = p.at(s.dataset[k].id);
    g1(i) = s.truth.true_g1[k];
    g0(i) = s.truth.true_g0[k];
    mu(i) = s.truth.true_mu[k];
    g1h(i) = v.g1;
    g0h(i) = v.g0;
    muh(i) = v.mu;
  }
  const BiasTerms b = misspecification_biases(g1, g0, mu, g1h, g0h, muh);
  const double predicted = (b.bias1 + b.bias2).mean();
  double se = 0;
  const double measured = injected_ate_error(s, CorruptionMode::kBoth, &se);
  EXPECT_GT(std::abs(predicted), 3 * se);
  EXPECT_LE(std::abs(measured - predicted), 3 * se);
}

TEST(TruthIoTest, RoundTrip) {
  const SyntheticSample s = generate(config(50, 13));
  const auto path = std::filesystem::temp_directory_path() / "textcausal_truth.csv";
  write_truth(s.truth, s.dataset, path);
  const TruthTable t = read_truth(path);
  EXPECT_EQ(t.nuisances.size(), 50u);
  const std::string& id = s.dataset[7].id;
  EXPECT_EQ(t.nuisances.at(id).g1, s.truth.true_g1[7]);
  EXPECT_EQ(t.nuisances.at(id).mu, s.truth.true_mu[7]);
  EXPECT_EQ(t.theta.at(id), s.truth.true_theta[7]);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace textcausal
