#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace textcausal {

// One observed individual: outcome Y, binary treatment T, group label and the
// two covariate views (tabular numbers and free text).
struct Unit {
  std::string id;
  double outcome = 0.0;
  int treatment = 0;
  std::string group;
  std::vector<double> tabular;
  std::string text;

  bool operator==(const Unit&) const = default;
};

enum class Modality { kTabular, kText, kBoth };

const char* to_string(Modality modality);
Modality modality_from_string(const std::string& name);

// Immutable collection of units. Construction validates the invariants:
// non-empty, both arms present, treatment in {0,1}, consistent tabular width.
class Dataset {
 public:
  Dataset(std::vector<Unit> units, std::vector<std::string> feature_names,
          bool has_text, bool enforce_outcome_bounds = true);

  const std::vector<Unit>& units() const { return units_; }
  const Unit& operator[](std::size_t i) const { return units_[i]; }
  std::size_t size() const { return units_.size(); }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  std::size_t width() const { return feature_names_.size(); }
  bool has_text() const { return has_text_; }
  Modality modality() const { return modality_; }

  std::size_t n_treated() const;

  // Tabular covariates for the given rows (all rows when `rows` is empty
  // and all_rows is true).
  Eigen::MatrixXd tabular_matrix(std::span<const std::size_t> rows) const;
  Eigen::MatrixXd tabular_matrix() const;

  // Stable content hash of every field, in order.
  std::string content_hash() const;

  bool operator==(const Dataset& other) const {
    return units_ == other.units_ && feature_names_ == other.feature_names_ &&
           has_text_ == other.has_text_;
  }

 private:
  std::vector<Unit> units_;
  std::vector<std::string> feature_names_;
  bool has_text_;
  Modality modality_;
};

// Column-role mapping for ingestion. Empty optional columns are absent.
// With infer_numeric set and numeric_columns empty, every column not bound to
// a role is read as a numeric covariate.
struct Schema {
  std::string id_column;  // empty: ids are the 1-based row numbers
  std::string outcome_column = "y";
  std::string treatment_column = "t";
  std::string group_column;
  std::string text_column;
  std::vector<std::string> numeric_columns;
  bool infer_numeric = true;
  bool enforce_outcome_bounds = true;
  // When set, a group or text column missing from the file is treated as
  // not supplied instead of being a schema error.
  bool optional_group_text = false;
};

// Reads CSV (RFC-4180) or JSONL (by .jsonl / .ndjson extension).
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv_dataset(std::string_view content, const Schema& schema);
Dataset parse_jsonl_dataset(std::string_view content, const Schema& schema);

// Canonical writers. Columns: id, y, t, group, <features...>, text.
// Reals are written with 17 significant digits so reading back is exact.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);
void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);
std::string to_csv_string(const Dataset& dataset);
std::string to_jsonl_string(const Dataset& dataset);

// Schema matching the canonical writers.
Schema canonical_schema(bool with_text = true);

std::string format_real(double value);

}  // namespace textcausal
