#pragma once

#include <string>

namespace textcausal {

// Per-unit out-of-fold scoring record. Outcome, treatment and group are the
// joined unit fields the estimators need.
struct ScoreRow {
  std::string unit_id;
  int fold = 0;
  double outcome = 0.0;
  int treatment = 0;
  std::string group;
  double g1_hat = 0.0;
  double g0_hat = 0.0;
  double mu_hat = 0.5;  // after clipping
  double h_tilde = 0.0;
  double theta_tilde = 0.0;
  double dr_label = 0.0;
  double cate = 0.0;  // filled by the per-fold BLP step

  bool operator==(const ScoreRow&) const = default;
};

// min(max(mu_raw, eps), 1 - eps); eps must lie in (0, 0.5).
double clip_propensity(double mu_raw, double eps);

// T / mu - (1 - T) / (1 - mu)
double horvitz_thompson(int treatment, double mu_hat);

// Doubly robust label: g1 - g0 + (y - g_T) * H.
double dr_label(double g1_hat, double g0_hat, double outcome, int treatment,
                double mu_hat);

// Builds a complete row (except cate) from out-of-fold nuisance predictions.
ScoreRow make_score_row(std::string unit_id, int fold, double outcome, int treatment,
                        std::string group, double g1_hat, double g0_hat,
                        double mu_raw, double propensity_eps);

}  // namespace textcausal
