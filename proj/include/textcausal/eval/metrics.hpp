#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/dr/scores.hpp"

namespace textcausal {

// Outcomes below this value are left out of the MAPE average.
inline constexpr double kMapeFloor = 1e-6;

double pearson(std::span<const double> x, std::span<const double> y);
// Pearson over average ranks (ties share their mean rank).
double spearman(std::span<const double> x, std::span<const double> y);
// 1-based ranks; tied values get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct MetricsReport {
  std::optional<double> corr_t;  // empty when undefined
  std::optional<double> corr_c;
  std::optional<double> mape;
  std::size_t n_t = 0;
  std::size_t n_c = 0;
  std::size_t n_mape = 0;
  std::size_t n_mape_excluded = 0;
};

MetricsReport compute_metrics(std::span<const double> g1_hat, std::span<const double> g0_hat,
                              std::span<const double> outcomes, std::span<const int> treatments);
MetricsReport compute_metrics(std::span<const ScoreRow> rows);

nlohmann::json to_json(const MetricsReport& report);

}  // namespace textcausal
