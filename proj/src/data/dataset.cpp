#include "textcausal/data/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/data/csv.hpp"

namespace textcausal {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(out);
}

int parse_treatment(double value, std::size_t row, std::string_view raw) {
  if (value == 0.0) return 0;
  if (value == 1.0) return 1;
  throw ValidationError(row, "treatment must be 0 or 1, got '" +
                                 std::string(raw) + "'");
}

void check_outcome(double y, std::size_t row, bool enforce) {
  if (enforce && (y < 0.0 || y > 1.0)) {
    throw ValidationError(row, "outcome " + format_real(y) +
                                   " outside [0, 1] (set outcome_bounds=none "
                                   "to disable)");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Columns bound to a role, used to infer the numeric set.
bool is_role_column(const Schema& schema, const std::string& name) {
  return name == schema.id_column || name == schema.outcome_column ||
         name == schema.treatment_column || name == schema.group_column ||
         name == schema.text_column;
}

}  // namespace

const char* to_string(Modality modality) {
  switch (modality) {
    case Modality::kTabular:
      return "tabular";
    case Modality::kText:
      return "text";
    case Modality::kBoth:
      return "both";
  }
  return "unknown";
}

Modality modality_from_string(const std::string& name) {
  if (name == "tabular") return Modality::kTabular;
  if (name == "text") return Modality::kText;
  if (name == "both") return Modality::kBoth;
  throw ConfigError("unknown modality '" + name + "'");
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Dataset::Dataset(std::vector<Unit> units, std::vector<std::string> feature_names,
                 bool has_text, bool enforce_outcome_bounds)
    : units_(std::move(units)),
      feature_names_(std::move(feature_names)),
      has_text_(has_text) {
  if (units_.empty()) throw EmptyDatasetError("dataset has no units");
  std::size_t treated = 0;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const Unit& u = units_[i];
    if (u.treatment != 0 && u.treatment != 1) {
      throw ValidationError(i + 1, "treatment must be 0 or 1");
    }
    if (!std::isfinite(u.outcome)) {
      throw ValidationError(i + 1, "outcome is not finite");
    }
    check_outcome(u.outcome, i + 1, enforce_outcome_bounds);
    if (u.tabular.size() != feature_names_.size()) {
      throw ValidationError(i + 1, "tabular width " +
                                       std::to_string(u.tabular.size()) +
                                       " != feature count " +
                                       std::to_string(feature_names_.size()));
    }
    for (double v : u.tabular) {
      if (!std::isfinite(v)) throw ValidationError(i + 1, "non-finite covariate");
    }
    treated += static_cast<std::size_t>(u.treatment);
  }
  if (treated == 0 || treated == units_.size()) {
    throw SchemaError("dataset must contain both treated and control units");
  }
  if (!feature_names_.empty() && has_text_) {
    modality_ = Modality::kBoth;
  } else if (has_text_) {
    modality_ = Modality::kText;
  } else {
    modality_ = Modality::kTabular;
  }
}

std::size_t Dataset::n_treated() const {
  std::size_t n = 0;
  for (const Unit& u : units_) n += static_cast<std::size_t>(u.treatment);
  return n;
}

Eigen::MatrixXd Dataset::tabular_matrix(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(width()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& tab = units_.at(rows[r]).tabular;
    for (std::size_t c = 0; c < tab.size(); ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = tab[c];
    }
  }
  return x;
}

Eigen::MatrixXd Dataset::tabular_matrix() const {
  std::vector<std::size_t> all(units_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return tabular_matrix(all);
}

std::string Dataset::content_hash() const {
  Fingerprint fp;
  for (const auto& name : feature_names_) fp.add(name);
  fp.add(static_cast<std::int64_t>(has_text_));
  for (const Unit& u : units_) {
    fp.add(u.id).add(u.outcome).add(static_cast<std::int64_t>(u.treatment));
    fp.add(u.group);
    for (double v : u.tabular) fp.add(v);
    fp.add(u.text);
  }
  return fp.hex();
}

Dataset parse_csv_dataset(std::string_view content, const Schema& schema) {
  auto records = csv::parse(content);
  if (records.empty()) throw EmptyDatasetError("csv file is empty");
  const csv::Record& header = records.front();
  if (records.size() == 1) throw EmptyDatasetError("csv file has no data rows");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    index.emplace(std::string(trim(header[c])), c);
  }
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError("missing column '" + name + "'");
    return it->second;
  };
  const std::size_t outcome_col = column(schema.outcome_column);
  const std::size_t treatment_col = column(schema.treatment_column);
  const long id_col = schema.id_column.empty() ? -1L : static_cast<long>(column(schema.id_column));
  auto optional_column = [&](const std::string& name) -> long {
    if (name.empty() || (schema.optional_group_text && !index.count(name))) return -1L;
    return static_cast<long>(column(name));
  };
  const long group_col = optional_column(schema.group_column);
  const long text_col = optional_column(schema.text_column);

  std::vector<std::string> features = schema.numeric_columns;
  if (features.empty() && schema.infer_numeric) {
    for (const auto& raw : header) {
      std::string name(trim(raw));
      if (!is_role_column(schema, name)) features.push_back(name);
    }
  }
  std::vector<std::size_t> feature_cols;
  for (const auto& f : features) feature_cols.push_back(column(f));

  std::vector<Unit> units;
  units.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    const std::size_t row = r;
    if (rec.size() != header.size()) {
      throw ValidationError(row, "expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(rec.size()));
    }
    Unit u;
    u.id = id_col >= 0 ? rec[static_cast<std::size_t>(id_col)] : std::to_string(row);
    if (!parse_real(rec[outcome_col], u.outcome)) {
      throw ValidationError(row, "cannot parse outcome '" + rec[outcome_col] + "'");
    }
    check_outcome(u.outcome, row, schema.enforce_outcome_bounds);
    double t = 0.0;
    if (!parse_real(rec[treatment_col], t)) {
      throw ValidationError(row, "treatment must be 0 or 1, got '" +
                                     rec[treatment_col] + "'");
    }
    u.treatment = parse_treatment(t, row, rec[treatment_col]);
    if (group_col >= 0) u.group = rec[static_cast<std::size_t>(group_col)];
    if (text_col >= 0) u.text = rec[static_cast<std::size_t>(text_col)];
    u.tabular.reserve(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      double v = 0.0;
      if (!parse_real(rec[feature_cols[f]], v)) {
        throw ValidationError(row, "missing or non-numeric value in column '" +
                                       features[f] + "'");
      }
      u.tabular.push_back(v);
    }
    units.push_back(std::move(u));
  }
  return Dataset(std::move(units), std::move(features), text_col >= 0,
                 schema.enforce_outcome_bounds);
}

Dataset parse_jsonl_dataset(std::string_view content, const Schema& schema) {
  using ordered = nlohmann::ordered_json;
  std::vector<ordered> objects;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = trim(content.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.empty()) continue;
    ++line_no;
    try {
      objects.push_back(ordered::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(line_no, std::string("invalid json: ") + e.what());
    }
    if (!objects.back().is_object()) {
      throw ValidationError(line_no, "expected a json object");
    }
  }
  if (objects.empty()) throw EmptyDatasetError("jsonl file has no records");

  auto supplied = [&](const std::string& name) {
    return !name.empty() && (!schema.optional_group_text || objects.front().contains(name));
  };
  const bool use_group = supplied(schema.group_column);
  const bool use_text = supplied(schema.text_column);

  std::vector<std::string> features = schema.numeric_columns;
  if (features.empty() && schema.infer_numeric) {
    for (const auto& [key, value] : objects.front().items()) {
      if (!is_role_column(schema, key)) features.push_back(key);
    }
  }

  auto field = [&](const ordered& obj, const std::string& key,
                   std::size_t row) -> const ordered& {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (row == 1) throw SchemaError("missing column '" + key + "'");
      throw ValidationError(row, "missing field '" + key + "'");
    }
    return *it;
  };
  auto as_string = [](const ordered& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return v.dump();
  };
  auto as_real = [&](const ordered& v, std::size_t row, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    double out = 0.0;
    if (v.is_string() && parse_real(v.get<std::string>(), out)) return out;
    throw ValidationError(row, "missing or non-numeric value in column '" + key + "'");
  };

  std::vector<Unit> units;
  units.reserve(objects.size());
  for (std::size_t r = 0; r < objects.size(); ++r) {
    const ordered& obj = objects[r];
    const std::size_t row = r + 1;
    Unit u;
    u.id = schema.id_column.empty() ? std::to_string(row)
                                    : as_string(field(obj, schema.id_column, row));
    u.outcome = as_real(field(obj, schema.outcome_column, row), row,
                        schema.outcome_column);
    check_outcome(u.outcome, row, schema.enforce_outcome_bounds);
    const auto& t = field(obj, schema.treatment_column, row);
    double tv = 0.0;
    if (t.is_boolean()) {
      tv = t.get<bool>() ? 1.0 : 0.0;
    } else if (t.is_number()) {
      tv = t.get<double>();
    } else if (!(t.is_string() && parse_real(t.get<std::string>(), tv))) {
      throw ValidationError(row, "treatment must be 0 or 1, got " + t.dump());
    }
    u.treatment = parse_treatment(tv, row, t.dump());
    if (use_group) u.group = as_string(field(obj, schema.group_column, row));
    if (use_text) u.text = as_string(field(obj, schema.text_column, row));
    for (const auto& f : features) {
      u.tabular.push_back(as_real(field(obj, f, row), row, f));
    }
    units.push_back(std::move(u));
  }
  return Dataset(std::move(units), std::move(features), use_text,
                 schema.enforce_outcome_bounds);
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema) {
  if (!std::filesystem::exists(path)) {
    throw IoError("dataset file not found: " + path.string());
  }
  const std::string content = read_file(path);
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return parse_jsonl_dataset(content, schema);
  return parse_csv_dataset(content, schema);
}

Schema canonical_schema(bool with_text) {
  Schema s;
  s.id_column = "id";
  s.outcome_column = "y";
  s.treatment_column = "t";
  s.group_column = "group";
  s.text_column = with_text ? "text" : "";
  return s;
}

std::string to_csv_string(const Dataset& dataset) {
  std::ostringstream out;
  csv::Record header{"id", "y", "t", "group"};
  for (const auto& f : dataset.feature_names()) header.push_back(f);
  if (dataset.has_text()) header.push_back("text");
  csv::write_record(out, header);
  for (const Unit& u : dataset.units()) {
    csv::Record rec{u.id, format_real(u.outcome), std::to_string(u.treatment),
                    u.group};
    for (double v : u.tabular) rec.push_back(format_real(v));
    if (dataset.has_text()) rec.push_back(u.text);
    csv::write_record(out, rec);
  }
  return out.str();
}

std::string to_jsonl_string(const Dataset& dataset) {
  std::ostringstream out;
  for (const Unit& u : dataset.units()) {
    nlohmann::ordered_json obj;
    obj["id"] = u.id;
    obj["y"] = u.outcome;
    obj["t"] = u.treatment;
    obj["group"] = u.group;
    for (std::size_t f = 0; f < u.tabular.size(); ++f) {
      obj[dataset.feature_names()[f]] = u.tabular[f];
    }
    if (dataset.has_text()) obj["text"] = u.text;
    out << obj.dump() << '\n';
  }
  return out.str();
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}
}  // namespace

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  write_text(path, to_csv_string(dataset));
}

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  write_text(path, to_jsonl_string(dataset));
}

}  // namespace textcausal
