#include "textcausal/crossfit/result_io.hpp"

#include <fstream>
#include <sstream>

#include "textcausal/common/errors.hpp"
#include "textcausal/data/csv.hpp"

namespace textcausal {

namespace {

const std::vector<std::string> kScoreColumns = {
    "unit_id", "fold", "group", "outcome", "treatment", "g1_hat", "g0_hat",
    "mu_hat", "h_tilde", "theta_tilde", "dr_label", "cate"};

double parse_real(const std::string& s, std::size_t row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(row, "column '" + column + "' is not a number: '" + s + "'");
  }
}

}  // namespace

std::vector<Estimate> StoredResult::gates() const {
  std::vector<Estimate> out;
  for (const auto& e : estimates) {
    if (e.estimand == Estimand::kGate) out.push_back(e);
  }
  return out;
}

const Estimate& StoredResult::find(Estimand estimand) const {
  for (const auto& e : estimates) {
    if (e.estimand == estimand) return e;
  }
  throw SchemaError(std::string("result has no ") + to_string(estimand) + " estimate");
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scores_to_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  csv::write_record(out, kScoreColumns);
  for (const auto& r : rows) {
    csv::write_record(out, {r.unit_id, std::to_string(r.fold), r.group, format_real(r.outcome),
                            std::to_string(r.treatment), format_real(r.g1_hat),
                            format_real(r.g0_hat), format_real(r.mu_hat), format_real(r.h_tilde),
                            format_real(r.theta_tilde), format_real(r.dr_label),
                            format_real(r.cate)});
  }
  return out.str();
}

std::vector<ScoreRow> scores_from_csv(std::string_view content) {
  const auto records = csv::parse(content);
  if (records.empty()) throw EmptyDatasetError("scores table is empty");
  if (records[0] != kScoreColumns) throw SchemaError("scores table has unexpected columns");
  std::vector<ScoreRow> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != kScoreColumns.size()) throw ValidationError(i, "wrong number of fields");
    ScoreRow r;
    r.unit_id = rec[0];
    r.fold = static_cast<int>(parse_real(rec[1], i, "fold"));
    r.group = rec[2];
    r.outcome = parse_real(rec[3], i, "outcome");
    r.treatment = static_cast<int>(parse_real(rec[4], i, "treatment"));
    r.g1_hat = parse_real(rec[5], i, "g1_hat");
    r.g0_hat = parse_real(rec[6], i, "g0_hat");
    r.mu_hat = parse_real(rec[7], i, "mu_hat");
    r.h_tilde = parse_real(rec[8], i, "h_tilde");
    r.theta_tilde = parse_real(rec[9], i, "theta_tilde");
    r.dr_label = parse_real(rec[10], i, "dr_label");
    r.cate = parse_real(rec[11], i, "cate");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_result(const CrossfitResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  write_text(dir / "scores.csv", scores_to_csv(result.score_rows));

  nlohmann::json estimates = nlohmann::json::array();
  for (const auto& e : result.estimates) estimates.push_back(to_json(e));
  write_text(dir / "estimates.json",
             dump_json({{"estimates", estimates}, {"skipped_groups", result.skipped_groups}}));

  nlohmann::json blp = nlohmann::json::array();
  for (const auto& b : result.blp_per_fold) blp.push_back(to_json(b));
  write_text(dir / "blp.json", dump_json({{"folds", blp}}));

  write_text(dir / "manifest.json", dump_json(result.manifest));
}

StoredResult read_result(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("result directory '" + dir.string() + "' does not exist");
  }
  StoredResult out;
  out.score_rows = scores_from_csv(read_text(dir / "scores.csv"));
  try {
    const auto est = nlohmann::json::parse(read_text(dir / "estimates.json"));
    for (const auto& e : est.at("estimates")) out.estimates.push_back(estimate_from_json(e));
    const auto blp = nlohmann::json::parse(read_text(dir / "blp.json"));
    for (const auto& b : blp.at("folds")) out.blp_per_fold.push_back(blp_from_json(b));
    out.manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed result file in '" + dir.string() + "': " + e.what());
  }
  return out;
}

}  // namespace textcausal
