#include "textcausal/dr/scores.hpp"

#include <algorithm>
#include <cmath>

#include "textcausal/common/errors.hpp"

namespace textcausal {

double clip_propensity(double mu_raw, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw ParameterError("propensity eps must lie in (0, 0.5), got " + std::to_string(eps));
  }
  if (std::isnan(mu_raw)) throw NumericError("propensity is NaN");
  return std::min(std::max(mu_raw, eps), 1.0 - eps);
}

double horvitz_thompson(int treatment, double mu_hat) {
  return treatment / mu_hat - (1 - treatment) / (1.0 - mu_hat);
}

double dr_label(double g1_hat, double g0_hat, double outcome, int treatment,
                double mu_hat) {
  if (!std::isfinite(g1_hat) || !std::isfinite(g0_hat) || !std::isfinite(outcome) ||
      !std::isfinite(mu_hat)) {
    throw NumericError("non-finite input to dr_label");
  }
  if (!(mu_hat > 0.0 && mu_hat < 1.0)) {
    throw NumericError("propensity must lie in (0, 1); clip it first");
  }
  if (treatment != 0 && treatment != 1) throw NumericError("treatment must be 0 or 1");
  const double g_observed = treatment == 1 ? g1_hat : g0_hat;
  return g1_hat - g0_hat + (outcome - g_observed) * horvitz_thompson(treatment, mu_hat);
}

ScoreRow make_score_row(std::string unit_id, int fold, double outcome, int treatment,
                        std::string group, double g1_hat, double g0_hat,
                        double mu_raw, double propensity_eps) {
  ScoreRow row;
  row.unit_id = std::move(unit_id);
  row.fold = fold;
  row.outcome = outcome;
  row.treatment = treatment;
  row.group = std::move(group);
  row.g1_hat = g1_hat;
  row.g0_hat = g0_hat;
  row.mu_hat = clip_propensity(mu_raw, propensity_eps);
  row.h_tilde = horvitz_thompson(treatment, row.mu_hat);
  row.theta_tilde = g1_hat - g0_hat;
  row.dr_label = dr_label(g1_hat, g0_hat, outcome, treatment, row.mu_hat);
  return row;
}

}  // namespace textcausal
