#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/crossfit/crossfit.hpp"

namespace textcausal {

// On-disk form of a cross-fit run:
//   scores.csv      one row per unit
//   estimates.json  ATE, ATET, GATEs, skipped groups
//   blp.json        per-fold BLP coefficients
//   manifest.json   config echo, fingerprints, fold diagnostics
struct StoredResult {
  std::vector<ScoreRow> score_rows;
  std::vector<Estimate> estimates;
  std::vector<BlpCoefficients> blp_per_fold;
  nlohmann::json manifest;

  std::vector<Estimate> gates() const;
  const Estimate& find(Estimand estimand) const;
};

void write_result(const CrossfitResult& result, const std::filesystem::path& dir);
StoredResult read_result(const std::filesystem::path& dir);

std::string scores_to_csv(const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> scores_from_csv(std::string_view content);

// Serialized text of a file with a trailing newline; used for every JSON
// artifact so outputs are byte-stable.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
std::string dump_json(const nlohmann::json& doc);

}  // namespace textcausal
