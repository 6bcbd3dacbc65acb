#include "textcausal/dr/estimators.hpp"

#include <cmath>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/numeric.hpp"

namespace textcausal {

const char* to_string(Estimand estimand) {
  switch (estimand) {
    case Estimand::kAte:
      return "ATE";
    case Estimand::kAtet:
      return "ATET";
    case Estimand::kGate:
      return "GATE";
  }
  return "unknown";
}

Estimate estimate_from_scores(Estimand estimand, std::span<const double> psi,
                              double confidence) {
  if (psi.empty()) throw EstimationError(std::string(to_string(estimand)) + ": no rows");
  if (!all_finite(psi)) throw NumericError(std::string(to_string(estimand)) + ": non-finite score");
  const double z = normal_critical_value(confidence);
  Estimate e;
  e.estimand = estimand;
  e.confidence = confidence;
  e.point = mean(psi);
  e.std_error = population_sd(psi) / std::sqrt(static_cast<double>(psi.size()));
  e.ci_low = e.point - z * e.std_error;
  e.ci_high = e.point + z * e.std_error;
  e.n_effective = psi.size();
  return e;
}

Estimate estimate_ate(std::span<const ScoreRow> rows, double confidence) {
  std::vector<double> psi;
  psi.reserve(rows.size());
  for (const auto& r : rows) psi.push_back(r.dr_label);
  return estimate_from_scores(Estimand::kAte, psi, confidence);
}

Estimate estimate_atet(std::span<const ScoreRow> rows, double confidence) {
  if (rows.empty()) throw EstimationError("ATET: no rows");
  StableSum treated;
  for (const auto& r : rows) treated.add(r.treatment);
  const double share = treated.value() / static_cast<double>(rows.size());
  if (!(share > 0.0)) throw EstimationError("ATET: no treated units");
  std::vector<double> psi;
  psi.reserve(rows.size());
  for (const auto& r : rows) {
    const double g_observed = r.treatment == 1 ? r.g1_hat : r.g0_hat;
    psi.push_back((r.treatment * r.theta_tilde +
                   r.mu_hat * (r.outcome - g_observed) * r.h_tilde) /
                  share);
  }
  Estimate e = estimate_from_scores(Estimand::kAtet, psi, confidence);
  e.n_effective = static_cast<std::size_t>(treated.value());
  return e;
}

Estimate estimate_gate(std::span<const ScoreRow> rows, const std::vector<bool>& group_mask,
                       double confidence, std::string group_name) {
  if (group_mask.size() != rows.size()) {
    throw ShapeError("GATE: mask length does not match rows");
  }
  std::size_t members = 0;
  for (bool b : group_mask) members += b ? 1 : 0;
  if (members == 0) throw EstimationError("GATE: group '" + group_name + "' is empty");
  const double share = static_cast<double>(members) / static_cast<double>(rows.size());
  std::vector<double> psi;
  psi.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    psi.push_back(group_mask[i] ? rows[i].dr_label / share : 0.0);
  }
  Estimate e = estimate_from_scores(Estimand::kGate, psi, confidence);
  e.group = std::move(group_name);
  e.n_effective = members;
  return e;
}

Estimate estimate_gate(std::span<const ScoreRow> rows, const std::string& group,
                       double confidence) {
  std::vector<bool> mask(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) mask[i] = rows[i].group == group;
  return estimate_gate(rows, mask, confidence, group);
}

nlohmann::json to_json(const Estimate& e) {
  nlohmann::json j{{"estimand", to_string(e.estimand)},
                   {"point", e.point},
                   {"std_error", e.std_error},
                   {"ci_low", e.ci_low},
                   {"ci_high", e.ci_high},
                   {"confidence", e.confidence},
                   {"n_effective", e.n_effective}};
  if (e.estimand == Estimand::kGate) j["group"] = e.group;
  return j;
}

Estimate estimate_from_json(const nlohmann::json& j) {
  Estimate e;
  const auto name = j.at("estimand").get<std::string>();
  e.estimand = name == "ATE" ? Estimand::kAte : name == "ATET" ? Estimand::kAtet : Estimand::kGate;
  e.group = j.value("group", "");
  e.point = j.at("point").get<double>();
  e.std_error = j.at("std_error").get<double>();
  e.ci_low = j.at("ci_low").get<double>();
  e.ci_high = j.at("ci_high").get<double>();
  e.confidence = j.value("confidence", 0.95);
  e.n_effective = j.value("n_effective", std::size_t{0});
  return e;
}

}  // namespace textcausal
