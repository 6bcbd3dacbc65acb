#include <gtest/gtest.h>


#include <cmath>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/text/embedding_client.hpp"
#include "textcausal/text/featurizer.hpp"

// After Eigen: resolv.h (pulled in by httplib) defines a _res macro.
#include <httplib.h>

namespace textcausal {
namespace {

TEST(TokenizeTest, SplitsOnNonAlphanumeric) {
  EXPECT_EQ(tokenize("Red-shoes, SIZE 42!", true),
            (std::vector<std::string>{"red", "shoes", "size", "42"}));
  EXPECT_EQ(tokenize("Red", false), (std::vector<std::string>{"Red"}));
  EXPECT_TRUE(tokenize("  ...  ", true).empty());
}

TEST(TokenizeTest, KeepsUtf8Sequences) {
  const auto tokens = tokenize("caf\xc3\xa9 cr\xc3\xa8me", true);
  EXPECT_EQ(tokens, (std::vector<std::string>{"caf\xc3\xa9", "cr\xc3\xa8me"}));
}

TEST(FeaturizeTest, EmptyTextIsZeroVector) {
  EXPECT_TRUE(featurize(FeaturizerConfig{}, "").empty());
  EXPECT_TRUE(featurize(FeaturizerConfig{}, " ,; ").empty());
}

TEST(FeaturizeTest, MatchesHandComputedBuckets) {
  FeaturizerConfig config;
  config.ngram_max = 2;
  const SparseVector v = featurize(config, "soft soft cotton");
  std::map<std::uint32_t, double> expected;
  const auto add = [&](const std::string& gram, double w) {
    const std::uint64_t h = mix64(fnv1a64(gram));
    expected[static_cast<std::uint32_t>(h & (config.hash_dim - 1))] += (h >> 63 ? -1.0 : 1.0) * w;
  };
  add("soft", 1.0 + std::log(2.0));
  add("cotton", 1.0);
  add("soft soft", 1.0);
  add("soft cotton", 1.0);
  ASSERT_EQ(v.nnz(), expected.size());
  std::size_t k = 0;
  for (const auto& [index, value] : expected) {
    EXPECT_EQ(v.indices[k], index);
    EXPECT_DOUBLE_EQ(v.values[k], value);
    ++k;
  }
}

TEST(FeaturizeTest, WeightingModes) {
  FeaturizerConfig config;
  config.tf_weighting = TfWeighting::kCount;
  const SparseVector count = featurize(config, "a a a");
  ASSERT_EQ(count.nnz(), 1u);
  EXPECT_DOUBLE_EQ(std::abs(count.values[0]), 3.0);
  config.tf_weighting = TfWeighting::kBinary;
  EXPECT_DOUBLE_EQ(std::abs(featurize(config, "a a a").values[0]), 1.0);
}

TEST(FeaturizeTest, DeterministicAndCaseFolded) {
  const FeaturizerConfig config;
  EXPECT_EQ(featurize(config, "Blue Denim Jacket"), featurize(config, "blue denim jacket"));
  FeaturizerConfig keep_case = config;
  keep_case.lowercase = false;
  EXPECT_NE(featurize(keep_case, "Blue"), featurize(keep_case, "blue"));
}

TEST(FeaturizeTest, CollisionRateOnThousandTokens) {
  const FeaturizerConfig config;
  std::set<std::uint32_t> buckets;
  const int vocabulary = 1000;
  for (int i = 0; i < vocabulary; ++i) {
    const SparseVector v = featurize(config, "token" + std::to_string(i));
    ASSERT_EQ(v.nnz(), 1u);
    buckets.insert(v.indices[0]);
  }
  const double collision_rate = 1.0 - double(buckets.size()) / vocabulary;
  EXPECT_LT(collision_rate, 0.01);
}

TEST(FeaturizeTest, DisjointTextsHaveDisjointBuckets) {
  const FeaturizerConfig config;
  const SparseVector a = featurize(config, "red wool scarf");
  const SparseVector b = featurize(config, "green silk tie");
  for (auto i : a.indices) {
    EXPECT_EQ(std::count(b.indices.begin(), b.indices.end(), i), 0);
  }
}

TEST(FeaturizeTest, ConfigValidation) {
  FeaturizerConfig config;
  config.hash_dim = 1000;
  EXPECT_THROW(config.validate(), ParameterError);
  config = FeaturizerConfig{};
  config.ngram_min = 2;
  config.ngram_max = 1;
  EXPECT_THROW(config.validate(), ParameterError);
  config = FeaturizerConfig{};
  config.ngram_max = 3;
  config.tf_weighting = TfWeighting::kBinary;
  const FeaturizerConfig back = featurizer_config_from_json(to_json(config));
  EXPECT_EQ(back.ngram_max, 3);
  EXPECT_EQ(back.tf_weighting, TfWeighting::kBinary);
}

// Local provider: each text maps to [length, first byte, index in batch].
class StubProvider {
 public:
  explicit StubProvider(int width_delta = 0, int fail_on_batch = -1) {
    server_.Post("/embed", [=, this](const httplib::Request& req, httplib::Response& res) {
      const int batch = calls_++;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        last_auth_ = req.get_header_value("Authorization");
      }
      if (batch == fail_on_batch) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json rows = nlohmann::json::array();
      int k = 0;
      for (const auto& t : body.at("texts")) {
        const std::string s = t.get<std::string>();
        std::vector<double> row = {double(s.size()), s.empty() ? 0.0 : double(s[0]), double(k++)};
        row.resize(static_cast<std::size_t>(3 + width_delta), 0.5);
        rows.push_back(row);
      }
      res.set_content(nlohmann::json{{"embeddings", rows}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubProvider() {
    server_.stop();
    thread_.join();
  }

  EmbeddingProviderConfig config(int batch_size) const {
    EmbeddingProviderConfig c;
    c.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + "/embed";
    c.batch_size = batch_size;
    c.dim = 3;
    c.timeout_ms = 5000;
    return c;
  }
  int calls() const { return calls_; }
  std::string last_auth() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return last_auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  mutable std::mutex mutex_;
  std::string last_auth_;
};

TEST(EmbedRemoteTest, ZeroTextsSkipsNetwork) {
  EmbeddingProviderConfig c;
  c.endpoint_url = "http://127.0.0.1:9/unreachable";
  c.dim = 8;
  const Eigen::MatrixXd out = embed_remote(c, {});
  EXPECT_EQ(out.rows(), 0);
  EXPECT_EQ(out.cols(), 8);
}

TEST(EmbedRemoteTest, RowsReturnedInInputOrder) {
  StubProvider stub;
  const std::vector<std::string> texts = {"a", "bb", "ccc", "dddd", "eeeee"};
  for (bool concurrent : {false, true}) {
    EmbeddingProviderConfig c = stub.config(2);
    c.concurrent_safe = concurrent;
    const Eigen::MatrixXd out = embed_remote(c, texts);
    ASSERT_EQ(out.rows(), 5);
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ(out(i, 0), double(texts[i].size()));
      EXPECT_EQ(out(i, 1), double(texts[i][0]));
      EXPECT_EQ(out(i, 2), double(i % 2));
    }
  }
  EXPECT_EQ(stub.calls(), 6);
}

TEST(EmbedRemoteTest, WrongWidthNamesExpectedAndActual) {
  StubProvider stub(-1);
  try {
    embed_remote(stub.config(4), {"x", "y"});
    FAIL() << "expected a provider error";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.batch(), 0u);
    EXPECT_NE(std::string(e.what()).find("expected width 3, got 2"), std::string::npos) << e.what();
  }
}

TEST(EmbedRemoteTest, HttpFailureCarriesBatchIndex) {
  StubProvider stub(0, 1);
  try {
    embed_remote(stub.config(1), {"x", "y", "z"});
    FAIL() << "expected a provider error";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.batch(), 1u);
    EXPECT_NE(std::string(e.what()).find("503"), std::string::npos);
  }
}

TEST(EmbedRemoteTest, UnreachableProviderFails) {
  EmbeddingProviderConfig c;
  c.endpoint_url = "http://127.0.0.1:9/embed";
  c.dim = 2;
  c.timeout_ms = 500;
  EXPECT_THROW(embed_remote(c, {"x"}), ProviderError);
}

TEST(EmbedRemoteTest, BearerTokenFromEnvironment) {
  StubProvider stub;
  ::setenv(kEmbeddingTokenEnv, "secret", 1);
  embed_remote(stub.config(8), {"x"});
  ::unsetenv(kEmbeddingTokenEnv);
  EXPECT_EQ(stub.last_auth(), "Bearer secret");
}

TEST(EmbedRemoteTest, ConfigValidation) {
  EmbeddingProviderConfig c;
  c.endpoint_url = "http://localhost/embed";
  EXPECT_THROW(c.validate(), ParameterError);
  c.dim = 4;
  EXPECT_NO_THROW(c.validate());
  const auto back = embedding_config_from_json(to_json(c));
  EXPECT_EQ(back.endpoint_url, c.endpoint_url);
  EXPECT_EQ(back.dim, 4);
}

}  // namespace
}  // namespace textcausal
