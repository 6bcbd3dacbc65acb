#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/common/parallel.hpp"
#include "textcausal/common/random.hpp"

namespace textcausal {
namespace {

TEST(HashTest, Fnv1aKnownVectors) {
  // Published FNV-1a 64-bit test vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(HashTest, FingerprintSeparatesBoundaries) {
  Fingerprint a, b;
  a.add("ab").add("c");
  b.add("a").add("bc");
  EXPECT_NE(a.hex(), b.hex());
  Fingerprint c;
  c.add("ab").add("c");
  EXPECT_EQ(a.hex(), c.hex());
  EXPECT_EQ(a.hex().size(), 16u);
}

TEST(HashTest, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
}

TEST(RngTest, UniformRangeAndDeterminism) {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.uniform());
  }
}

TEST(RngTest, BelowIsUnbiasedEnough) {
  Rng rng(3);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(6)];
  for (int c : counts) EXPECT_NEAR(c, n / 6, 5 * std::sqrt(n / 6.0));
}

TEST(RngTest, NormalMoments) {
  Rng rng(11);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(RngTest, ShuffleIsPermutation) {
  Rng rng(5);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(NumericTest, StableSumCancels) {
  const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(stable_sum(v), 2.0);
}

TEST(NumericTest, MeanAndPopulationSd) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(population_sd(v), 2.0);
  EXPECT_THROW(mean(std::vector<double>{}), EstimationError);
}

TEST(NumericTest, NormalCriticalValues) {
  EXPECT_NEAR(normal_critical_value(0.95), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_critical_value(0.90), 1.6448536269514722, 1e-12);
  EXPECT_THROW(normal_critical_value(1.0), ParameterError);
  EXPECT_THROW(normal_critical_value(0.0), ParameterError);
}

TEST(ParallelTest, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 4u, 0u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelTest, RethrowsLowestFailingIndex) {
  for (std::size_t threads : {1u, 4u}) {
    try {
      parallel_for(20, threads, [](std::size_t i) {
        if (i == 7 || i == 13) throw std::runtime_error("index " + std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "index 7");
    }
  }
}

TEST(ErrorsTest, CategoriesAndMessages) {
  const ValidationError v(4, "bad value");
  EXPECT_EQ(v.category(), ErrorCategory::kData);
  EXPECT_EQ(v.row(), 4u);
  EXPECT_STREQ(v.what(), "row 4: bad value");
  EXPECT_EQ(ConfigError("x").category(), ErrorCategory::kConfig);
  EXPECT_EQ(SingularityError("x").category(), ErrorCategory::kTraining);
  EXPECT_EQ(InvariantError("x").category(), ErrorCategory::kInvariant);
  const ProviderError p(2, "timeout");
  EXPECT_EQ(p.batch(), 2u);
}

}  // namespace
}  // namespace textcausal
