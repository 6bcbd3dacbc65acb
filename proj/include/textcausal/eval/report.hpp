#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "textcausal/crossfit/result_io.hpp"
#include "textcausal/eval/curves.hpp"
#include "textcausal/eval/metrics.hpp"

namespace textcausal {

struct ReportOptions {
  int quantile_points = 101;
  int lift_points = 100;
  int histogram_bins = 50;
  AreaBaseline area_baseline = AreaBaseline::kDiagonal;
  // Effects are reductions: the gain of a unit is -cate. Set false when a
  // larger effect is the desirable direction.
  bool gain_is_decrease = true;
};

// Run A is the candidate sorter, run B the reference whose CATEs define gain.
struct ComparisonBundle {
  nlohmann::json metrics;       // metrics.json
  std::string rank_table_csv;   // rank_table.csv
  std::string cate_curve_csv;   // cate_curve.csv
  std::string lift_curve_csv;   // lift_curve.csv
  std::string histograms_csv;   // histograms.csv
};

ComparisonBundle compare_results(const StoredResult& a, const StoredResult& b,
                                 const ReportOptions& options = {});
void write_bundle(const ComparisonBundle& bundle, const std::filesystem::path& dir);

// Per-run section of the bundle: metrics, ATE/ATET, GATEs.
nlohmann::json run_summary(const StoredResult& run);

}  // namespace textcausal
