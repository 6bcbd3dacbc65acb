#include "textcausal/eval/report.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "textcausal/common/errors.hpp"
#include "textcausal/data/csv.hpp"
#include "textcausal/data/dataset.hpp"

namespace textcausal {

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::map<std::string, double> gate_points(const StoredResult& run) {
  std::map<std::string, double> out;
  for (const auto& e : run.gates()) out[e.group] = e.point;
  return out;
}

// Returns B's rows reordered to A's unit order.
std::vector<ScoreRow> align(const StoredResult& a, const StoredResult& b) {
  std::unordered_map<std::string, std::size_t> index_b;
  for (std::size_t i = 0; i < b.score_rows.size(); ++i) index_b[b.score_rows[i].unit_id] = i;
  std::unordered_map<std::string, std::size_t> index_a;
  for (std::size_t i = 0; i < a.score_rows.size(); ++i) index_a[a.score_rows[i].unit_id] = i;

  std::vector<std::string> mismatches;
  for (const auto& r : a.score_rows) {
    if (!index_b.count(r.unit_id)) mismatches.push_back(r.unit_id + " (only in A)");
  }
  for (const auto& r : b.score_rows) {
    if (!index_a.count(r.unit_id)) mismatches.push_back(r.unit_id + " (only in B)");
  }
  if (!mismatches.empty()) {
    std::string msg = "unit ids differ between runs (" + std::to_string(mismatches.size()) +
                      " mismatches); first: ";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, mismatches.size()); ++i) {
      msg += (i ? ", " : "") + mismatches[i];
    }
    throw ComparisonError(msg);
  }
  std::vector<ScoreRow> out;
  out.reserve(a.score_rows.size());
  for (const auto& r : a.score_rows) out.push_back(b.score_rows[index_b.at(r.unit_id)]);
  return out;
}

nlohmann::json estimate_pair(const Estimate& a, const Estimate& b) {
  return {{"a", to_json(a)},
          {"b", to_json(b)},
          {"ci_overlap", a.ci_low <= b.ci_high && b.ci_low <= a.ci_high}};
}

template <typename F>
nlohmann::json guarded(F&& f) {
  try {
    return f();
  } catch (const UndefinedCorrelationError&) {
    return nullptr;
  } catch (const UndefinedRatioError&) {
    return nullptr;
  }
}

void histogram_rows(std::ostringstream& out, const std::string& run,
                    const std::vector<ScoreRow>& rows, int bins) {
  for (int arm = 1; arm >= 0; --arm) {
    std::vector<double> pred, actual;
    for (const auto& r : rows) {
      if (r.treatment != arm) continue;
      pred.push_back(arm == 1 ? r.g1_hat : r.g0_hat);
      actual.push_back(r.outcome);
    }
    if (pred.empty()) continue;
    const auto h = distribution_summary(pred, actual, arm == 1 ? "treated" : "control", bins);
    for (std::size_t i = 0; i < h.predicted.size(); ++i) {
      csv::write_record(out, {run, h.arm, std::to_string(i), format_real(h.edges[i]),
                              format_real(h.edges[i + 1]), std::to_string(h.predicted[i]),
                              std::to_string(h.actual[i])});
    }
  }
}

}  // namespace

nlohmann::json run_summary(const StoredResult& run) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& e : run.gates()) gates.push_back(to_json(e));
  return {{"metrics", to_json(compute_metrics(run.score_rows))},
          {"ate", to_json(run.find(Estimand::kAte))},
          {"atet", to_json(run.find(Estimand::kAtet))},
          {"gates", gates},
          {"n_units", run.score_rows.size()}};
}

ComparisonBundle compare_results(const StoredResult& a, const StoredResult& b,
                                 const ReportOptions& options) {
  const std::vector<ScoreRow> rows_b = align(a, b);
  const auto& rows_a = a.score_rows;
  const double sign = options.gain_is_decrease ? -1.0 : 1.0;

  std::vector<double> cate_a, cate_b, sort_a, gain_b;
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    cate_a.push_back(rows_a[i].cate);
    cate_b.push_back(rows_b[i].cate);
    sort_a.push_back(sign * rows_a[i].cate);
    gain_b.push_back(sign * rows_b[i].cate);
  }

  ComparisonBundle bundle;
  nlohmann::json& m = bundle.metrics;
  m["run_a"] = run_summary(a);
  m["run_b"] = run_summary(b);
  m["ate"] = estimate_pair(a.find(Estimand::kAte), b.find(Estimand::kAte));
  m["atet"] = estimate_pair(a.find(Estimand::kAtet), b.find(Estimand::kAtet));

  const auto gates_a = gate_points(a);
  const auto gates_b = gate_points(b);
  std::ostringstream rank_csv;
  csv::write_record(rank_csv, {"group", "gate_a", "gate_b", "rank_a", "rank_b"});
  if (!gates_a.empty() || !gates_b.empty()) {
    const GateRankTable table = gate_rank_table(gates_a, gates_b);
    for (const auto& r : table.rows) {
      csv::write_record(rank_csv, {r.group, format_real(r.point_a), format_real(r.point_b),
                                   std::to_string(r.rank_a), std::to_string(r.rank_b)});
    }
    m["gate"] = {{"n_groups", table.rows.size()},
                 {"pearson", optional_json(table.pearson)},
                 {"spearman", optional_json(table.spearman)}};
  } else {
    m["gate"] = {{"n_groups", 0}, {"pearson", nullptr}, {"spearman", nullptr}};
  }
  bundle.rank_table_csv = rank_csv.str();

  m["cate"] = {{"pearson", guarded([&] { return nlohmann::json(pearson(cate_a, cate_b)); })},
               {"spearman", guarded([&] { return nlohmann::json(spearman(cate_a, cate_b)); })}};

  const auto qa = cate_quantile_curve(cate_a, options.quantile_points);
  const auto qb = cate_quantile_curve(cate_b, options.quantile_points);
  std::ostringstream q_csv;
  csv::write_record(q_csv, {"quantile", "cate_a", "cate_b"});
  for (std::size_t i = 0; i < qa.size(); ++i) {
    csv::write_record(q_csv, {format_real(qa[i].quantile), format_real(qa[i].value),
                              format_real(qb[i].value)});
  }
  bundle.cate_curve_csv = q_csv.str();

  const LiftCurve cross = lift_curve(sort_a, gain_b, options.lift_points);
  const LiftCurve optimal = lift_curve(gain_b, gain_b, options.lift_points);
  std::ostringstream l_csv;
  csv::write_record(l_csv, {"fraction", "gain_cross", "gain_optimal"});
  for (std::size_t i = 0; i < cross.points.size(); ++i) {
    csv::write_record(l_csv, {format_real(cross.points[i].fraction),
                              format_real(cross.points[i].gain),
                              format_real(optimal.points[i].gain)});
  }
  bundle.lift_curve_csv = l_csv.str();
  m["lift"] = {
      {"area_cross", cross.area},
      {"area_optimal", optimal.area},
      {"total_gain", optimal.total_gain()},
      {"area_baseline", to_string(options.area_baseline)},
      {"area_ratio",
       guarded([&] { return nlohmann::json(area_ratio(cross, optimal, options.area_baseline)); })},
      {"area_ratio_raw",
       guarded([&] { return nlohmann::json(area_ratio(cross, optimal, AreaBaseline::kNone)); })},
      {"gain_direction", options.gain_is_decrease ? "decrease" : "increase"}};

  std::ostringstream h_csv;
  csv::write_record(h_csv, {"run", "arm", "bin", "lower", "upper", "predicted", "actual"});
  histogram_rows(h_csv, "a", rows_a, options.histogram_bins);
  histogram_rows(h_csv, "b", rows_b, options.histogram_bins);
  bundle.histograms_csv = h_csv.str();
  return bundle;
}

void write_bundle(const ComparisonBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "metrics.json", dump_json(bundle.metrics));
  write_text(dir / "rank_table.csv", bundle.rank_table_csv);
  write_text(dir / "cate_curve.csv", bundle.cate_curve_csv);
  write_text(dir / "lift_curve.csv", bundle.lift_curve_csv);
  write_text(dir / "histograms.csv", bundle.histograms_csv);
}

}  // namespace textcausal
