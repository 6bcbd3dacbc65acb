#include <gtest/gtest.h>

#include <cmath>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/random.hpp"
#include "textcausal/dr/blp.hpp"

namespace textcausal {
namespace {

std::vector<ScoreRow> fixture(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScoreRow> rows(n);
  for (auto& r : rows) {
    r.theta_tilde = rng.normal() * 0.1;
    r.dr_label = 0.02 + 0.8 * r.theta_tilde + 0.05 * rng.normal();
  }
  return rows;
}

TEST(BlpTest, IdentityRegression) {
  auto rows = fixture(30, 1);
  double m = 0;
  for (auto& r : rows) {
    r.dr_label = r.theta_tilde;
    m += r.theta_tilde;
  }
  const BlpCoefficients c = fit_blp(rows);
  EXPECT_NEAR(c.a1, m / 30, 1e-12);
  EXPECT_NEAR(c.b1, 1.0, 1e-12);
}

TEST(BlpTest, ConstantLabel) {
  auto rows = fixture(30, 2);
  for (auto& r : rows) r.dr_label = -0.03;
  const BlpCoefficients c = fit_blp(rows);
  EXPECT_NEAR(c.a1, -0.03, 1e-12);
  EXPECT_NEAR(c.b1, 0.0, 1e-12);
}

TEST(BlpTest, MatchesNormalEquationsOnTwentyRows) {
  const auto rows = fixture(20, 3);
  for (bool centered : {true, false}) {
    double center = 0;
    if (centered) {
      for (const auto& r : rows) center += r.theta_tilde;
      center /= 20;
    }
    // [n, sx; sx, sxx] [a; b] = [sy; sxy]
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (const auto& r : rows) {
      const double x = r.theta_tilde - center;
      sx += x;
      sxx += x * x;
      sy += r.dr_label;
      sxy += x * r.dr_label;
    }
    const double det = 20 * sxx - sx * sx;
    const double a = (sxx * sy - sx * sxy) / det;
    const double b = (20 * sxy - sx * sy) / det;

    // HC1 sandwich, written out for the 2x2 case.
    const double i00 = sxx / det, i01 = -sx / det, i11 = 20 / det;
    double m00 = 0, m01 = 0, m11 = 0;
    for (const auto& r : rows) {
      const double x = r.theta_tilde - center;
      const double e2 = std::pow(r.dr_label - a - b * x, 2);
      m00 += e2;
      m01 += e2 * x;
      m11 += e2 * x * x;
    }
    const double v00 = i00 * (i00 * m00 + i01 * m01) + i01 * (i00 * m01 + i01 * m11);
    const double v11 = i01 * (i01 * m00 + i11 * m01) + i11 * (i01 * m01 + i11 * m11);
    const double dof = 20.0 / 18.0;

    const BlpCoefficients c = fit_blp(rows, centered);
    EXPECT_NEAR(c.a1, a, 1e-10);
    EXPECT_NEAR(c.b1, b, 1e-10);
    EXPECT_NEAR(c.center, center, 1e-14);
    EXPECT_NEAR(c.se_a1, std::sqrt(v00 * dof), 1e-10);
    EXPECT_NEAR(c.se_b1, std::sqrt(v11 * dof), 1e-10);
    EXPECT_EQ(c.centered, centered);
  }
}

TEST(BlpTest, ResidualsOrthogonalToRegressors) {
  const auto rows = fixture(200, 4);
  const BlpCoefficients c = fit_blp(rows);
  double s0 = 0, s1 = 0;
  for (const auto& r : rows) {
    const double e = r.dr_label - cate_predict(c, r.theta_tilde);
    s0 += e;
    s1 += e * (r.theta_tilde - c.center);
  }
  EXPECT_NEAR(s0, 0.0, 1e-10);
  EXPECT_NEAR(s1, 0.0, 1e-10);
}

TEST(BlpTest, DegenerateFoldFallsBack) {
  auto rows = fixture(10, 5);
  double m = 0;
  for (auto& r : rows) {
    r.theta_tilde = 0.1;
    m += r.dr_label;
  }
  try {
    fit_blp(rows);
    FAIL() << "expected a degenerate BLP error";
  } catch (const DegenerateBlpError& e) {
    EXPECT_NEAR(e.fallback_a1(), m / 10, 1e-12);
  }
  const BlpCoefficients c = blp_fallback(rows);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.b1, 0.0);
  EXPECT_NEAR(cate_predict(c, 123.0), m / 10, 1e-12);
}

TEST(BlpTest, TooFewRows) {
  EXPECT_THROW(fit_blp(fixture(2, 6)), EstimationError);
}

TEST(CatePredictTest, Examples) {
  BlpCoefficients c;
  c.a1 = 0.3;
  c.b1 = 2.0;
  c.center = 0.1;
  EXPECT_EQ(cate_predict(c, 0.1), 0.3);
  EXPECT_NEAR(cate_predict(c, 0.2), 0.5, 1e-15);
  c.b1 = 0;
  EXPECT_EQ(cate_predict(c, -7.0), 0.3);
}

TEST(BlpTest, JsonRoundTrip) {
  const BlpCoefficients c = fit_blp(fixture(15, 7));
  const BlpCoefficients back = blp_from_json(to_json(c));
  EXPECT_EQ(back.a1, c.a1);
  EXPECT_EQ(back.b1, c.b1);
  EXPECT_EQ(back.se_b1, c.se_b1);
  EXPECT_EQ(back.n, c.n);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(MisspecificationBiasTest, CorrectPropensityGivesZero) {
  const auto g1 = vec({0.5, 0.6}), g0 = vec({0.2, 0.3}), mu = vec({0.3, 0.7});
  const BiasTerms b = misspecification_biases(g1, g0, mu, vec({0.1, 0.9}), vec({0.0, 0.5}), mu);
  EXPECT_EQ(b.bias1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.bias2.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MisspecificationBiasTest, CorrectOutcomesGiveZero) {
  const auto g1 = vec({0.5, 0.6}), g0 = vec({0.2, 0.3});
  const BiasTerms b = misspecification_biases(g1, g0, vec({0.3, 0.7}), g1, g0, vec({0.5, 0.2}));
  EXPECT_EQ(b.bias1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.bias2.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MisspecificationBiasTest, FiveRowHandArithmetic) {
  const auto g1 = vec({0.6, 0.5, 0.4, 0.7, 0.3});
  const auto g0 = vec({0.3, 0.4, 0.2, 0.5, 0.1});
  const auto mu = vec({0.5, 0.2, 0.8, 0.4, 0.6});
  const auto g1h = vec({0.5, 0.55, 0.4, 0.6, 0.35});
  const auto g0h = vec({0.2, 0.45, 0.25, 0.5, 0.0});
  const auto muh = vec({0.4, 0.25, 0.5, 0.4, 0.9});
  const BiasTerms b = misspecification_biases(g1, g0, mu, g1h, g0h, muh);
  // Row 0: (0.5/0.4 - 1) * 0.1 and (1 - 0.5/0.6) * 0.1.
  const double bias1[] = {0.025, (0.2 / 0.25 - 1) * -0.05, 0.0, 0.0, (0.6 / 0.9 - 1) * -0.05};
  const double bias2[] = {0.1 / 6.0, (1 - 0.8 / 0.75) * -0.05, (1 - 0.2 / 0.5) * -0.05, 0.0,
                          (1 - 0.4 / 0.1) * 0.1};
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(b.bias1(i), bias1[i], 1e-12) << "row " << i;
    EXPECT_NEAR(b.bias2(i), bias2[i], 1e-12) << "row " << i;
  }
}

TEST(MisspecificationBiasTest, Errors) {
  const auto v = vec({0.5});
  EXPECT_THROW(misspecification_biases(v, v, v, v, v, vec({1.0})), NumericError);
  EXPECT_THROW(misspecification_biases(v, v, v, v, v, vec({0.5, 0.5})), ShapeError);
}

}  // namespace
}  // namespace textcausal
