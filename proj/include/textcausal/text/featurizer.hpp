#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace textcausal {

enum class TfWeighting { kBinary, kCount, kLogCount };

const char* to_string(TfWeighting weighting);
TfWeighting tf_weighting_from_string(const std::string& name);

struct FeaturizerConfig {
  int ngram_min = 1;
  int ngram_max = 1;  // bigrams of reordered phrases add mostly noise
  std::uint32_t hash_dim = 1u << 18;  // power of two, >= 256
  bool lowercase = true;
  TfWeighting tf_weighting = TfWeighting::kLogCount;

  // Throws ParameterError when an invariant is violated.
  void validate() const;
};

// Sparse vector with strictly increasing indices and no explicit zeros.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool operator==(const SparseVector&) const = default;
};

// Lowercases (ASCII, if configured) and splits on every byte that is not an
// ASCII letter or digit. Bytes >= 0x80 are kept inside tokens so UTF-8
// sequences are never cut.
std::vector<std::string> tokenize(std::string_view text, bool lowercase);

// 64-bit n-gram hash: FNV-1a over the tokens joined by a single space,
// followed by the splitmix64 finalizer. The low bits pick the bucket
// (hash & (hash_dim - 1)); bit 63 picks the sign.
std::uint64_t ngram_hash(std::string_view ngram);

// Hashed bag of word n-grams with the sign trick. Each distinct n-gram with
// count c contributes sign * w(c) to its bucket, where w is 1, c or 1+log(c)
// for binary, count and log_count weighting.
SparseVector featurize(const FeaturizerConfig& config, std::string_view text);

nlohmann::json to_json(const FeaturizerConfig& config);
FeaturizerConfig featurizer_config_from_json(const nlohmann::json& j);

}  // namespace textcausal
