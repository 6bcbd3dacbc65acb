#include "textcausal/text/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"

namespace textcausal {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

}  // namespace

const char* to_string(TfWeighting weighting) {
  switch (weighting) {
    case TfWeighting::kBinary:
      return "binary";
    case TfWeighting::kCount:
      return "count";
    case TfWeighting::kLogCount:
      return "log_count";
  }
  return "unknown";
}

TfWeighting tf_weighting_from_string(const std::string& name) {
  if (name == "binary") return TfWeighting::kBinary;
  if (name == "count") return TfWeighting::kCount;
  if (name == "log_count") return TfWeighting::kLogCount;
  throw ConfigError("unknown tf_weighting '" + name + "'");
}

void FeaturizerConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 3) {
    throw ParameterError("ngram range must satisfy 1 <= ngram_min <= ngram_max <= 3");
  }
  if (hash_dim < 256 || (hash_dim & (hash_dim - 1)) != 0) {
    throw ParameterError("hash_dim must be a power of two >= 256");
  }
}

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(lowercase && c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t ngram_hash(std::string_view ngram) { return mix64(fnv1a64(ngram)); }

SparseVector featurize(const FeaturizerConfig& config, std::string_view text) {
  config.validate();
  const auto tokens = tokenize(text, config.lowercase);
  // Ordered map keeps accumulation order independent of hash-table layout.
  std::map<std::string, int> counts;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < width; ++k) {
        gram.push_back(' ');
        gram += tokens[i + k];
      }
      ++counts[gram];
    }
  }
  std::map<std::uint32_t, double> buckets;
  const std::uint64_t mask = config.hash_dim - 1;
  for (const auto& [gram, count] : counts) {
    const std::uint64_t h = ngram_hash(gram);
    const auto bucket = static_cast<std::uint32_t>(h & mask);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    double weight = 1.0;
    switch (config.tf_weighting) {
      case TfWeighting::kBinary:
        weight = 1.0;
        break;
      case TfWeighting::kCount:
        weight = static_cast<double>(count);
        break;
      case TfWeighting::kLogCount:
        weight = 1.0 + std::log(static_cast<double>(count));
        break;
    }
    buckets[bucket] += sign * weight;
  }
  SparseVector out;
  for (const auto& [index, value] : buckets) {
    if (value == 0.0) continue;
    out.indices.push_back(index);
    out.values.push_back(value);
  }
  return out;
}

nlohmann::json to_json(const FeaturizerConfig& config) {
  return nlohmann::json{{"ngram_min", config.ngram_min},
                        {"ngram_max", config.ngram_max},
                        {"hash_dim", config.hash_dim},
                        {"lowercase", config.lowercase},
                        {"tf_weighting", to_string(config.tf_weighting)}};
}

FeaturizerConfig featurizer_config_from_json(const nlohmann::json& j) {
  FeaturizerConfig c;
  c.ngram_min = j.value("ngram_min", c.ngram_min);
  c.ngram_max = j.value("ngram_max", c.ngram_max);
  c.hash_dim = j.value("hash_dim", c.hash_dim);
  c.lowercase = j.value("lowercase", c.lowercase);
  if (j.contains("tf_weighting")) {
    c.tf_weighting = tf_weighting_from_string(j.at("tf_weighting").get<std::string>());
  }
  c.validate();
  return c;
}

}  // namespace textcausal
