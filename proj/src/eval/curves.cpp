#include "textcausal/eval/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/eval/metrics.hpp"

namespace textcausal {

std::vector<QuantilePoint> cate_quantile_curve(std::span<const double> cates, int n_points) {
  if (cates.empty()) throw EmptyDatasetError("quantile curve needs at least one value");
  if (n_points < 1) throw ParameterError("n_points must be >= 1");
  std::vector<double> sorted(cates.begin(), cates.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto at = [&](double q) {
    const double rank = std::max(1.0, std::ceil(q * n - 1e-9));
    return sorted[static_cast<std::size_t>(std::min(rank, n)) - 1];
  };
  std::vector<QuantilePoint> out;
  if (n_points == 1) {
    out.push_back({0.5, at(0.5)});
    return out;
  }
  for (int i = 0; i < n_points; ++i) {
    const double q = static_cast<double>(i) / static_cast<double>(n_points - 1);
    out.push_back({q, at(q)});
  }
  return out;
}

LiftCurve lift_curve(std::span<const double> sort_scores, std::span<const double> gain_scores,
                     int n_points) {
  if (sort_scores.size() != gain_scores.size()) {
    throw ShapeError("lift curve inputs differ in length (" + std::to_string(sort_scores.size()) +
                     " vs " + std::to_string(gain_scores.size()) + ")");
  }
  if (sort_scores.empty()) throw EmptyDatasetError("lift curve needs at least one unit");
  if (n_points < 1) throw ParameterError("n_points must be >= 1");
  const std::size_t n = sort_scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sort_scores[a] > sort_scores[b];
  });
  const std::size_t points = std::min<std::size_t>(static_cast<std::size_t>(n_points), n);

  LiftCurve curve;
  curve.points.push_back({0.0, 0.0});
  StableSum cumulative;
  std::size_t taken = 0;
  for (std::size_t i = 1; i <= points; ++i) {
    const std::size_t m = i * n / points;
    while (taken < m) cumulative.add(gain_scores[order[taken++]]);
    curve.points.push_back({static_cast<double>(m) / static_cast<double>(n), cumulative.value()});
  }
  StableSum area;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area.add(0.5 * (b.fraction - a.fraction) * (a.gain + b.gain));
  }
  curve.area = area.value();
  return curve;
}

const char* to_string(AreaBaseline baseline) {
  return baseline == AreaBaseline::kNone ? "none" : "diagonal";
}

AreaBaseline area_baseline_from_string(const std::string& name) {
  if (name == "none") return AreaBaseline::kNone;
  if (name == "diagonal") return AreaBaseline::kDiagonal;
  throw ConfigError("area_baseline must be 'none' or 'diagonal', got '" + name + "'");
}

double area_ratio(const LiftCurve& cross, const LiftCurve& optimal, AreaBaseline baseline) {
  if (cross.points.empty() || optimal.points.empty()) {
    throw EmptyDatasetError("area ratio needs non-empty curves");
  }
  const double total = optimal.total_gain();
  const double scale = std::max({1.0, std::abs(total), std::abs(cross.total_gain())});
  if (std::abs(cross.total_gain() - total) > 1e-9 * scale) {
    throw ComparisonError("lift curves are built on different gain vectors");
  }
  const double base = baseline == AreaBaseline::kDiagonal ? 0.5 * total : 0.0;
  const double denom = optimal.area - base;
  if (std::abs(denom) <= 1e-15 * std::max(1.0, std::abs(optimal.area))) {
    throw UndefinedRatioError("optimal curve has zero area" +
                              std::string(baseline == AreaBaseline::kDiagonal
                                              ? " above the diagonal"
                                              : ""));
  }
  return (cross.area - base) / denom;
}

namespace {

std::map<std::string, int> rank_points(const std::map<std::string, double>& gates) {
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [group, point] : gates) order.emplace_back(point, group);
  std::sort(order.begin(), order.end());
  std::map<std::string, int> ranks;
  for (std::size_t i = 0; i < order.size(); ++i) ranks[order[i].second] = static_cast<int>(i + 1);
  return ranks;
}

}  // namespace

GateRankTable gate_rank_table(const std::map<std::string, double>& gates_a,
                              const std::map<std::string, double>& gates_b) {
  std::vector<std::string> only_a, only_b;
  for (const auto& [g, v] : gates_a) {
    if (!gates_b.count(g)) only_a.push_back(g);
  }
  for (const auto& [g, v] : gates_b) {
    if (!gates_a.count(g)) only_b.push_back(g);
  }
  if (!only_a.empty() || !only_b.empty()) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
      return s.empty() ? std::string("-") : s;
    };
    throw ComparisonError("group keys differ; only in A: " + join(only_a) +
                          "; only in B: " + join(only_b));
  }
  if (gates_a.empty()) throw EmptyDatasetError("no groups to rank");

  const auto ranks_a = rank_points(gates_a);
  const auto ranks_b = rank_points(gates_b);
  GateRankTable table;
  std::vector<double> xa, xb;
  for (const auto& [group, point] : gates_a) {
    const double pb = gates_b.at(group);
    table.rows.push_back({group, point, pb, ranks_a.at(group), ranks_b.at(group)});
    xa.push_back(point);
    xb.push_back(pb);
  }
  try {
    table.pearson = pearson(xa, xb);
    table.spearman = spearman(xa, xb);
  } catch (const UndefinedCorrelationError&) {
  }
  return table;
}

HistogramSummary distribution_summary(std::span<const double> predictions,
                                      std::span<const double> actuals, std::string arm,
                                      int bins) {
  if (predictions.empty() && actuals.empty()) {
    throw EmptyDatasetError("histogram needs at least one value");
  }
  if (bins < 1) throw ParameterError("bins must be >= 1");
  if (!all_finite(predictions) || !all_finite(actuals)) {
    throw NumericError("histogram input is not finite");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : predictions) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : actuals) lo = std::min(lo, v), hi = std::max(hi, v);

  HistogramSummary h;
  h.arm = std::move(arm);
  const auto nb = static_cast<std::size_t>(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= nb; ++i) {
    h.edges.push_back(i == nb ? hi : lo + width * static_cast<double>(i));
  }
  h.predicted.assign(nb, 0);
  h.actual.assign(nb, 0);
  auto bin_of = [&](double v) -> std::size_t {
    if (width <= 0.0) return 0;
    const auto b = static_cast<std::size_t>((v - lo) / width);
    return std::min(b, nb - 1);
  };
  for (double v : predictions) ++h.predicted[bin_of(v)];
  for (double v : actuals) ++h.actual[bin_of(v)];
  return h;
}

nlohmann::json to_json(const LiftCurve& curve) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : curve.points) pts.push_back({p.fraction, p.gain});
  return {{"points", pts}, {"area", curve.area}};
}

}  // namespace textcausal
