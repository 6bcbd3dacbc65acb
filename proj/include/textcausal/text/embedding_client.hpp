#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace textcausal {

// Minimal JSON embedding protocol:
//   POST <endpoint_url>  {"texts": [...]}
//   200                  {"embeddings": [[...], ...]}
struct EmbeddingProviderConfig {
  std::string endpoint_url;  // http://host:port/path
  int timeout_ms = 30000;
  int batch_size = 64;
  int dim = 0;
  // Batches may be issued in parallel (order is restored by index).
  bool concurrent_safe = false;
  int max_concurrency = 4;

  void validate() const;
};

// Environment variable holding an optional bearer token for the provider.
inline constexpr const char* kEmbeddingTokenEnv = "TEXTCAUSAL_EMBEDDING_TOKEN";

// One row per input text, in input order. Zero texts returns a 0 x dim matrix
// without touching the network. Any transport failure, non-200 status or
// shape mismatch raises ProviderError carrying the batch index.
Eigen::MatrixXd embed_remote(const EmbeddingProviderConfig& config,
                             const std::vector<std::string>& texts);

nlohmann::json to_json(const EmbeddingProviderConfig& config);
EmbeddingProviderConfig embedding_config_from_json(const nlohmann::json& j);

}  // namespace textcausal
