#include "textcausal/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>

#include "textcausal/cli/config_file.hpp"
#include "textcausal/common/json_fields.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/crossfit/crossfit.hpp"
#include "textcausal/crossfit/result_io.hpp"
#include "textcausal/synthetic/generator.hpp"

namespace textcausal {

namespace {

std::string fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

void print_estimates(std::ostream& out, const std::vector<Estimate>& estimates) {
  out << pad("estimand", 10) << pad("group", 14) << pad("point", 12) << pad("std_error", 12)
      << pad("ci_low", 12) << pad("ci_high", 12) << "n\n";
  for (const auto& e : estimates) {
    out << pad(to_string(e.estimand), 10) << pad(e.group.empty() ? "-" : e.group, 14)
        << pad(fixed(e.point), 12) << pad(fixed(e.std_error), 12) << pad(fixed(e.ci_low), 12)
        << pad(fixed(e.ci_high), 12) << e.n_effective << "\n";
  }
}

std::string describe(const nlohmann::json& v) {
  return v.is_null() ? std::string("undefined") : fixed(v.get<double>(), 4);
}

struct Overrides {
  std::string outcome_col, treatment_col, group_col, text_col, id_col, modality, learner;
  std::int64_t seed = -1, n_units = -1;
  int threads = -1;
  int folds = 0;
};

void apply_overrides(RunConfig& rc, const Overrides& o) {
  if (!o.outcome_col.empty()) rc.schema.outcome_column = o.outcome_col;
  if (!o.treatment_col.empty()) rc.schema.treatment_column = o.treatment_col;
  if (!o.group_col.empty()) rc.schema.group_column = o.group_col == "none" ? "" : o.group_col;
  if (!o.text_col.empty()) rc.schema.text_column = o.text_col == "none" ? "" : o.text_col;
  if (!o.id_col.empty()) rc.schema.id_column = o.id_col == "none" ? "" : o.id_col;
  if (!o.modality.empty()) {
    try {
      rc.crossfit.modality = modality_from_string(o.modality);
    } catch (const Error& e) {
      throw ConfigError(std::string("--modality: ") + e.what());
    }
    if (o.learner.empty()) {
      const bool text = rc.crossfit.modality == Modality::kText;
      if (text) rc.crossfit.learner.kind = LearnerKind::kTextTriple;
      if (!text && rc.crossfit.learner.kind == LearnerKind::kTextTriple) {
        rc.crossfit.learner.kind = LearnerKind::kGbt;
      }
    }
  }
  if (!o.learner.empty()) {
    try {
      rc.crossfit.learner.kind = learner_kind_from_string(o.learner);
    } catch (const Error& e) {
      throw ConfigError(std::string("--learner: ") + e.what());
    }
  }
  if (o.seed >= 0) rc.crossfit.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads >= 0) rc.crossfit.threads = static_cast<std::size_t>(o.threads);
  if (o.folds > 0) rc.crossfit.k_folds = o.folds;
  try {
    rc.crossfit.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("crossfit: ") + e.what());
  }
}

int cmd_generate(const std::string& config_path, const std::string& out_dir_flag,
                 std::int64_t seed, std::int64_t n_units, int threads, const std::string& format,
                 std::ostream& out) {
  SyntheticConfig sc;
  std::string out_dir = "synthetic_data";
  if (!config_path.empty()) {
    const auto j = load_config_file(config_path);
    if (j.contains("synthetic")) sc = synthetic_config_from_json(j.at("synthetic"));
    if (j.contains("output")) {
      const auto& o = fields::section(j, "output", "");
      fields::read(o, "dir", "output", out_dir);
    }
  }
  if (!out_dir_flag.empty()) out_dir = out_dir_flag;
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
  if (n_units >= 0) sc.n_units = static_cast<std::size_t>(n_units);
  try {
    sc.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("synthetic.") + e.what());
  }
  if (format != "csv" && format != "jsonl") {
    throw ConfigError("--format: expected 'csv' or 'jsonl', got '" + format + "'");
  }
  const auto sample = generate(sc, threads < 0 ? 0 : static_cast<std::size_t>(threads));

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir / "truth", ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const auto data_path = dir / (format == "csv" ? "dataset.csv" : "dataset.jsonl");
  if (format == "csv") {
    write_csv(sample.dataset, data_path);
  } else {
    write_jsonl(sample.dataset, data_path);
  }
  write_truth(sample.truth, sample.dataset, dir / "truth" / "truth.csv");
  write_text(dir / "truth" / "synthetic_config.json", dump_json(to_json(sc)));

  const auto oracle = oracle_estimands(sample.truth, sample.dataset);
  out << "wrote " << sample.dataset.size() << " units to " << data_path.string() << "\n"
      << "truth: " << (dir / "truth" / "truth.csv").string() << "\n"
      << "oracle ate " << fixed(oracle.ate) << "  atet " << fixed(oracle.atet) << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out_dir_flag, const Overrides& overrides, std::ostream& out) {
  RunConfig rc = default_run_config();
  if (!config_path.empty()) rc = run_config_from_json(load_config_file(config_path));
  apply_overrides(rc, overrides);
  if (!out_dir_flag.empty()) rc.output_dir = out_dir_flag;
  if (rc.save_models) rc.crossfit.model_dir = (std::filesystem::path(rc.output_dir) / "models").string();

  const Dataset dataset = load_dataset(data_path, rc.schema);
  if (!rc.crossfit.model_dir.empty()) std::filesystem::create_directories(rc.crossfit.model_dir);
  CrossfitResult result = run_crossfit(dataset, rc.crossfit);
  result.manifest["data_schema"] = to_json(rc.schema);
  write_result(result, rc.output_dir);

  out << "units " << dataset.size() << "  treated " << dataset.n_treated() << "  folds "
      << rc.crossfit.k_folds << "  learner " << to_string(rc.crossfit.learner.kind) << "\n";
  std::vector<Estimate> headline = {result.ate(), result.atet()};
  print_estimates(out, headline);
  const auto gates = result.gates();
  if (!gates.empty()) out << "gates: " << gates.size() << " groups";
  if (!result.skipped_groups.empty()) out << " (skipped " << result.skipped_groups.size() << ")";
  if (!gates.empty() || !result.skipped_groups.empty()) out << "\n";
  out << "results: " << rc.output_dir << "\n";
  return kExitOk;
}

int cmd_report(const std::string& dir_a, const std::string& dir_b, const std::string& out_dir,
               const std::string& config_path, const std::string& baseline,
               const std::string& direction, std::ostream& out) {
  ReportOptions options;
  if (!config_path.empty()) options = run_config_from_json(load_config_file(config_path)).report;
  if (!baseline.empty()) options.area_baseline = area_baseline_from_string(baseline);
  if (!direction.empty()) {
    if (direction != "decrease" && direction != "increase") {
      throw ConfigError("--gain-direction: expected 'decrease' or 'increase'");
    }
    options.gain_is_decrease = direction == "decrease";
  }
  const StoredResult a = read_result(dir_a);
  const StoredResult b = read_result(dir_b);
  const ComparisonBundle bundle = compare_results(a, b, options);
  write_bundle(bundle, out_dir);

  const auto& m = bundle.metrics;
  out << "ATE   a " << fixed(m["ate"]["a"]["point"].get<double>()) << "  b "
      << fixed(m["ate"]["b"]["point"].get<double>()) << "  ci overlap "
      << (m["ate"]["ci_overlap"].get<bool>() ? "yes" : "no") << "\n";
  out << "ATET  a " << fixed(m["atet"]["a"]["point"].get<double>()) << "  b "
      << fixed(m["atet"]["b"]["point"].get<double>()) << "  ci overlap "
      << (m["atet"]["ci_overlap"].get<bool>() ? "yes" : "no") << "\n";
  out << "GATE  pearson " << describe(m["gate"]["pearson"]) << "  spearman "
      << describe(m["gate"]["spearman"]) << "  groups " << m["gate"]["n_groups"] << "\n";
  out << "CATE  pearson " << describe(m["cate"]["pearson"]) << "  spearman "
      << describe(m["cate"]["spearman"]) << "\n";
  out << "lift  area ratio (" << m["lift"]["area_baseline"].get<std::string>() << ") "
      << describe(m["lift"]["area_ratio"]) << "\n";
  out << "report: " << out_dir << "\n";
  return kExitOk;
}

int cmd_inspect_scores(const std::string& dir, int head, std::ostream& out) {
  const auto rows = scores_from_csv(read_text(std::filesystem::path(dir) / "scores.csv"));
  std::map<int, std::size_t> per_fold;
  std::vector<double> cate, dr, mu;
  std::size_t treated = 0;
  for (const auto& r : rows) {
    ++per_fold[r.fold];
    cate.push_back(r.cate);
    dr.push_back(r.dr_label);
    mu.push_back(r.mu_hat);
    treated += r.treatment == 1;
  }
  out << "units " << rows.size() << "  treated " << treated << "\n";
  out << "fold sizes:";
  for (const auto& [fold, count] : per_fold) out << " " << fold << ":" << count;
  out << "\n";
  out << "mean dr_label " << fixed(mean(dr)) << "  sd " << fixed(population_sd(dr)) << "\n";
  out << "mean cate     " << fixed(mean(cate)) << "  min " << fixed(*std::min_element(cate.begin(), cate.end()))
      << "  max " << fixed(*std::max_element(cate.begin(), cate.end())) << "\n";
  out << "mu_hat range  " << fixed(*std::min_element(mu.begin(), mu.end())) << " .. "
      << fixed(*std::max_element(mu.begin(), mu.end())) << "\n";
  const std::size_t shown = std::min<std::size_t>(rows.size(), static_cast<std::size_t>(std::max(head, 0)));
  if (shown > 0) {
    out << pad("unit_id", 12) << pad("fold", 6) << pad("t", 3) << pad("g1_hat", 11)
        << pad("g0_hat", 11) << pad("mu_hat", 11) << pad("dr_label", 11) << "cate\n";
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& r = rows[i];
      out << pad(r.unit_id, 12) << pad(std::to_string(r.fold), 6)
          << pad(std::to_string(r.treatment), 3) << pad(fixed(r.g1_hat, 5), 11)
          << pad(fixed(r.g0_hat, 5), 11) << pad(fixed(r.mu_hat, 5), 11)
          << pad(fixed(r.dr_label, 5), 11) << fixed(r.cate, 5) << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return kExitConfig;
    case ErrorCategory::kData:
      return kExitData;
    case ErrorCategory::kTraining:
      return kExitTraining;
    case ErrorCategory::kInvariant:
      return kExitInvariant;
  }
  return kExitInvariant;
}

RunConfig default_run_config() {
  RunConfig rc;
  rc.schema = canonical_schema(true);
  rc.schema.optional_group_text = true;
  return rc;
}

nlohmann::json to_json(const Schema& s) {
  return {{"id_column", s.id_column},
          {"outcome_column", s.outcome_column},
          {"treatment_column", s.treatment_column},
          {"group_column", s.group_column},
          {"text_column", s.text_column},
          {"numeric_columns", s.numeric_columns},
          {"infer_numeric", s.infer_numeric},
          {"enforce_outcome_bounds", s.enforce_outcome_bounds}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  using fields::read;
  RunConfig rc = default_run_config();
  fields::check_keys(j, "", {"data", "crossfit", "report", "output", "synthetic"});
  if (j.contains("data")) {
    const auto& d = fields::section(j, "data", "");
    fields::check_keys(d, "data", {"id_column", "outcome_column", "treatment_column",
                                   "group_column", "text_column", "numeric_columns",
                                   "infer_numeric", "enforce_outcome_bounds"});
    auto& s = rc.schema;
    read(d, "id_column", "data", s.id_column);
    read(d, "outcome_column", "data", s.outcome_column);
    read(d, "treatment_column", "data", s.treatment_column);
    read(d, "group_column", "data", s.group_column);
    read(d, "text_column", "data", s.text_column);
    read(d, "numeric_columns", "data", s.numeric_columns);
    read(d, "infer_numeric", "data", s.infer_numeric);
    read(d, "enforce_outcome_bounds", "data", s.enforce_outcome_bounds);
  }
  if (j.contains("crossfit")) {
    rc.crossfit = crossfit_config_from_json(fields::section(j, "crossfit", ""), "crossfit");
  }
  if (j.contains("report")) {
    const auto& r = fields::section(j, "report", "");
    fields::check_keys(r, "report", {"quantile_points", "lift_points", "histogram_bins",
                                     "area_baseline", "gain_direction"});
    read(r, "quantile_points", "report", rc.report.quantile_points);
    read(r, "lift_points", "report", rc.report.lift_points);
    read(r, "histogram_bins", "report", rc.report.histogram_bins);
    std::string baseline, direction;
    read(r, "area_baseline", "report", baseline);
    read(r, "gain_direction", "report", direction);
    if (!baseline.empty()) {
      try {
        rc.report.area_baseline = area_baseline_from_string(baseline);
      } catch (const Error& e) {
        throw ConfigError(std::string("report.area_baseline: ") + e.what());
      }
    }
    if (!direction.empty()) {
      if (direction != "decrease" && direction != "increase") {
        throw ConfigError("report.gain_direction: expected 'decrease' or 'increase', got '" +
                          direction + "'");
      }
      rc.report.gain_is_decrease = direction == "decrease";
    }
    if (rc.report.quantile_points < 1) throw ConfigError("report.quantile_points: must be >= 1");
    if (rc.report.lift_points < 1) throw ConfigError("report.lift_points: must be >= 1");
    if (rc.report.histogram_bins < 1) throw ConfigError("report.histogram_bins: must be >= 1");
  }
  if (j.contains("output")) {
    const auto& o = fields::section(j, "output", "");
    fields::check_keys(o, "output", {"dir", "save_models"});
    read(o, "dir", "output", rc.output_dir);
    read(o, "save_models", "output", rc.save_models);
  }
  return rc;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"textcausal: doubly robust treatment effects from tabular or text covariates"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "csv";
  std::int64_t seed = -1, n_units = -1;
  int threads = -1;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset and its truth table");
  gen->add_option("--config,-c", config_path, "Config file with a [synthetic] section");
  gen->add_option("--out,-o", out_dir, "Output directory");
  gen->add_option("--seed", seed, "Override the generator seed");
  gen->add_option("--n-units", n_units, "Override the number of units");
  gen->add_option("--threads", threads, "Worker threads (0: machine parallelism)");
  gen->add_option("--format", format, "csv or jsonl");

  std::string data_path;
  Overrides ov;
  auto* fit = app.add_subcommand("fit", "Cross-fit nuisances and estimate ATE/ATET/GATE/CATE");
  fit->add_option("--config,-c", config_path, "Run config file");
  fit->add_option("--data,-d", data_path, "Dataset file (.csv or .jsonl)")->required();
  fit->add_option("--out,-o", out_dir, "Result directory");
  fit->add_option("--outcome-col", ov.outcome_col);
  fit->add_option("--treatment-col", ov.treatment_col);
  fit->add_option("--group-col", ov.group_col, "Group column ('none' to disable)");
  fit->add_option("--text-col", ov.text_col, "Text column ('none' to disable)");
  fit->add_option("--id-col", ov.id_col, "Unit id column ('none' for row numbers)");
  fit->add_option("--modality", ov.modality, "tabular or text");
  fit->add_option("--learner", ov.learner, "gbt, elastic_net, ols or text_triple");
  fit->add_option("--folds", ov.folds, "Number of folds");
  fit->add_option("--seed", ov.seed, "Override the cross-fitting seed");
  fit->add_option("--threads", ov.threads, "Worker threads (0: machine parallelism)");

  auto* report = app.add_subcommand("report", "Compare two result directories");
  report->require_subcommand(1);
  std::string dir_a, dir_b, baseline, direction;
  auto* compare = report->add_subcommand("compare", "A is the candidate sorter, B the reference");
  compare->add_option("run_a", dir_a)->required();
  compare->add_option("run_b", dir_b)->required();
  compare->add_option("--out,-o", out_dir, "Report directory");
  compare->add_option("--config,-c", config_path, "Config file with a [report] section");
  compare->add_option("--area-baseline", baseline, "diagonal or none");
  compare->add_option("--gain-direction", direction, "decrease or increase");

  auto* inspect = app.add_subcommand("inspect", "Summaries of stored results");
  inspect->require_subcommand(1);
  std::string scores_dir;
  int head = 5;
  auto* scores = inspect->add_subcommand("scores", "Summarize scores.csv of a result directory");
  scores->add_option("run", scores_dir)->required();
  scores->add_option("--head", head, "Rows to print");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_dir, seed, n_units, threads, format, out);
    if (fit->parsed()) return cmd_fit(config_path, data_path, out_dir, ov, out);
    if (compare->parsed()) {
      return cmd_report(dir_a, dir_b, out_dir.empty() ? "textcausal_report" : out_dir,
                        config_path, baseline, direction, out);
    }
    if (scores->parsed()) return cmd_inspect_scores(scores_dir, head, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}

}  // namespace textcausal
