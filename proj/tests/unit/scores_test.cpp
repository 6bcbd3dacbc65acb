#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "textcausal/common/errors.hpp"
#include "textcausal/dr/scores.hpp"

namespace textcausal {
namespace {

TEST(ClipPropensityTest, Examples) {
  EXPECT_EQ(clip_propensity(0.5, 0.01), 0.5);
  EXPECT_EQ(clip_propensity(0.0, 0.01), 0.01);
  EXPECT_EQ(clip_propensity(0.999, 0.01), 0.99);
  EXPECT_EQ(clip_propensity(1.0, 0.05), 0.95);
}

TEST(ClipPropensityTest, Errors) {
  EXPECT_THROW(clip_propensity(0.5, 0.0), ParameterError);
  EXPECT_THROW(clip_propensity(0.5, 0.5), ParameterError);
  EXPECT_THROW(clip_propensity(std::nan(""), 0.01), NumericError);
}

TEST(HorvitzThompsonTest, BothArms) {
  EXPECT_DOUBLE_EQ(horvitz_thompson(1, 0.25), 4.0);
  EXPECT_DOUBLE_EQ(horvitz_thompson(0, 0.75), -4.0);
}

TEST(DrLabelTest, TreatedZeroResidual) {
  for (double mu : {0.1, 0.5, 0.9}) EXPECT_NEAR(dr_label(0.7, 0.2, 0.7, 1, mu), 0.5, 1e-15);
}

TEST(DrLabelTest, HandArithmetic) {
  // 0.4 - 0.1 + (0.5 - 0.4) * (1 / 0.5)
  EXPECT_NEAR(dr_label(0.4, 0.1, 0.5, 1, 0.5), 0.5, 1e-15);
  // 0.4 - 0.1 + (0.3 - 0.1) * (-1 / 0.8)
  EXPECT_NEAR(dr_label(0.4, 0.1, 0.3, 0, 0.2), 0.3 - 0.25, 1e-15);
}

TEST(DrLabelTest, ControlZeroResidual) {
  EXPECT_NEAR(dr_label(0.4, 0.1, 0.1, 0, 0.3), 0.3, 1e-15);
}

TEST(DrLabelTest, Errors) {
  EXPECT_THROW(dr_label(std::numeric_limits<double>::infinity(), 0, 0, 1, 0.5), NumericError);
  EXPECT_THROW(dr_label(0.1, 0, 0, 1, 0.0), NumericError);
  EXPECT_THROW(dr_label(0.1, 0, 0, 1, 1.0), NumericError);
}

TEST(MakeScoreRowTest, FillsDerivedFields) {
  const ScoreRow r = make_score_row("u1", 2, 0.5, 1, "g", 0.4, 0.1, 0.0, 0.02);
  EXPECT_EQ(r.unit_id, "u1");
  EXPECT_EQ(r.fold, 2);
  EXPECT_EQ(r.group, "g");
  EXPECT_DOUBLE_EQ(r.mu_hat, 0.02);
  EXPECT_DOUBLE_EQ(r.h_tilde, 50.0);
  EXPECT_NEAR(r.theta_tilde, 0.3, 1e-15);
  EXPECT_NEAR(r.dr_label, 0.3 + 0.1 * 50.0, 1e-12);
}

}  // namespace
}  // namespace textcausal
