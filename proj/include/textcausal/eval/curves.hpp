#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace textcausal {

struct QuantilePoint {
  double quantile = 0.0;
  double value = 0.0;
};

// Ascending sort, then n_points evenly spaced quantiles including both ends.
// Nearest rank: rank = max(1, ceil(q * N)). n_points = 1 gives the median.
std::vector<QuantilePoint> cate_quantile_curve(std::span<const double> cates, int n_points);

struct LiftPoint {
  double fraction = 0.0;  // share of units targeted
  double gain = 0.0;      // cumulative gain of the targeted units
};

struct LiftCurve {
  std::vector<LiftPoint> points;  // starts at (0, 0) and ends at fraction 1
  double area = 0.0;              // trapezoid rule over fraction
  double total_gain() const { return points.empty() ? 0.0 : points.back().gain; }
};

// Units are ranked by sort_scores descending (ties keep input order) and
// gain_scores are accumulated; larger gain is better. Points are taken after
// m = floor(i * N / n_points) units, i = 0..n_points (n_points capped at N).
LiftCurve lift_curve(std::span<const double> sort_scores, std::span<const double> gain_scores,
                     int n_points = 100);

enum class AreaBaseline { kNone, kDiagonal };
const char* to_string(AreaBaseline baseline);
AreaBaseline area_baseline_from_string(const std::string& name);

// area(cross) / area(optimal), optionally after subtracting the area of the
// straight line from (0, 0) to (1, total gain) from both.
double area_ratio(const LiftCurve& cross, const LiftCurve& optimal,
                  AreaBaseline baseline = AreaBaseline::kDiagonal);

struct GateRankRow {
  std::string group;
  double point_a = 0.0;
  double point_b = 0.0;
  int rank_a = 0;
  int rank_b = 0;
};

struct GateRankTable {
  std::vector<GateRankRow> rows;  // by group name
  std::optional<double> pearson;
  std::optional<double> spearman;
};

// Rank 1 is the most negative point; equal points are ordered by group name.
GateRankTable gate_rank_table(const std::map<std::string, double>& gates_a,
                              const std::map<std::string, double>& gates_b);

struct HistogramSummary {
  std::string arm;
  std::vector<double> edges;  // bins + 1 values
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> actual;
};

// Shared fixed-width bins over the pooled min..max of both inputs; the last
// bin is closed on the right.
HistogramSummary distribution_summary(std::span<const double> predictions,
                                      std::span<const double> actuals, std::string arm,
                                      int bins = 50);

nlohmann::json to_json(const LiftCurve& curve);

}  // namespace textcausal
