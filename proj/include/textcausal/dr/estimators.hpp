#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/dr/scores.hpp"

namespace textcausal {

enum class Estimand { kAte, kAtet, kGate };

const char* to_string(Estimand estimand);

struct Estimate {
  Estimand estimand = Estimand::kAte;
  std::string group;  // GATE only
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence = 0.95;
  std::size_t n_effective = 0;

  bool covers(double value) const { return ci_low <= value && value <= ci_high; }
};

// Shared reduction: point = mean(psi), std_error = sd(psi) / sqrt(N) with the
// population standard deviation, CI = point +/- z * std_error.
Estimate estimate_from_scores(Estimand estimand, std::span<const double> psi,
                              double confidence);

// psi_i = dr_label_i
Estimate estimate_ate(std::span<const ScoreRow> rows, double confidence = 0.95);

// psi_i = (T_i * theta_i + mu_i * (Y_i - g_T,i) * H_i) / E_N[T]
Estimate estimate_atet(std::span<const ScoreRow> rows, double confidence = 0.95);

// psi_i = 1{i in G} * dr_label_i / E_N[1{G}]
Estimate estimate_gate(std::span<const ScoreRow> rows, const std::vector<bool>& group_mask,
                       double confidence = 0.95, std::string group_name = {});

// Mask built from ScoreRow::group == group.
Estimate estimate_gate(std::span<const ScoreRow> rows, const std::string& group,
                       double confidence = 0.95);

nlohmann::json to_json(const Estimate& estimate);
Estimate estimate_from_json(const nlohmann::json& j);

}  // namespace textcausal
