#include "textcausal/text/embedding_client.hpp"

#include <cstdlib>
#include <optional>

#include <httplib.h>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/parallel.hpp"

namespace textcausal {

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("embedding endpoint_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

Eigen::MatrixXd request_batch(const EmbeddingProviderConfig& config,
                              const Endpoint& endpoint, std::size_t batch_index,
                              const std::vector<std::string>& texts) {
  httplib::Client client(endpoint.base);
  const auto sec = config.timeout_ms / 1000;
  const auto usec = (config.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  if (const char* token = std::getenv(kEmbeddingTokenEnv); token && *token) {
    client.set_bearer_token_auth(token);
  }
  const nlohmann::json body = {{"texts", texts}};
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw ProviderError(batch_index, "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError(batch_index, "provider returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(batch_index, std::string("malformed response: ") + e.what());
  }
  if (!parsed.contains("embeddings") || !parsed["embeddings"].is_array()) {
    throw ProviderError(batch_index, "response lacks an 'embeddings' array");
  }
  const auto& rows = parsed["embeddings"];
  if (rows.size() != texts.size()) {
    throw ProviderError(batch_index, "shape mismatch: expected " +
                                         std::to_string(texts.size()) + " rows, got " +
                                         std::to_string(rows.size()));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(texts.size()), config.dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != config.dim) {
      throw ProviderError(batch_index,
                          "shape mismatch: expected width " + std::to_string(config.dim) +
                              ", got " + std::to_string(row.is_array() ? row.size() : 0));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) throw ProviderError(batch_index, "non-numeric embedding value");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return out;
}

}  // namespace

void EmbeddingProviderConfig::validate() const {
  if (dim <= 0) throw ParameterError("embedding dim must be > 0");
  if (batch_size < 1) throw ParameterError("embedding batch_size must be >= 1");
  if (timeout_ms < 1) throw ParameterError("embedding timeout_ms must be >= 1");
}

Eigen::MatrixXd embed_remote(const EmbeddingProviderConfig& config,
                             const std::vector<std::string>& texts) {
  config.validate();
  if (texts.empty()) return Eigen::MatrixXd(0, config.dim);
  const Endpoint endpoint = split_url(config.endpoint_url);
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<Eigen::MatrixXd> parts(n_batches);
  auto run = [&](std::size_t b) {
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(texts.size(), lo + batch);
    std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(lo),
                                   texts.begin() + static_cast<std::ptrdiff_t>(hi));
    parts[b] = request_batch(config, endpoint, b, chunk);
  };
  const std::size_t workers =
      config.concurrent_safe ? static_cast<std::size_t>(std::max(config.max_concurrency, 1)) : 1;
  parallel_for(n_batches, workers, run);

  Eigen::MatrixXd out(static_cast<Eigen::Index>(texts.size()), config.dim);
  Eigen::Index row = 0;
  for (const auto& part : parts) {
    out.middleRows(row, part.rows()) = part;
    row += part.rows();
  }
  return out;
}

nlohmann::json to_json(const EmbeddingProviderConfig& config) {
  return nlohmann::json{{"endpoint_url", config.endpoint_url},
                        {"timeout_ms", config.timeout_ms},
                        {"batch_size", config.batch_size},
                        {"dim", config.dim},
                        {"concurrent_safe", config.concurrent_safe},
                        {"max_concurrency", config.max_concurrency}};
}

EmbeddingProviderConfig embedding_config_from_json(const nlohmann::json& j) {
  EmbeddingProviderConfig c;
  c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.dim = j.value("dim", c.dim);
  c.concurrent_safe = j.value("concurrent_safe", c.concurrent_safe);
  c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
  c.validate();
  return c;
}

}  // namespace textcausal
