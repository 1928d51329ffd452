#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "partret/rng.hpp"

#include "stats_util.hpp"

using namespace partret;

TEST_CASE("splitmix64 streams are reproducible and distinct") {
  SplitMix64 a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const uint64_t va = a.next_u64();
    REQUIRE(va == b.next_u64());
  }
  bool any_diff = false;
  SplitMix64 a2(42);
  for (int i = 0; i < 100; ++i) any_diff |= a2.next_u64() != c.next_u64();
  REQUIRE(any_diff);

  REQUIRE(derive_stream_seed(7, 0) != derive_stream_seed(7, 1));
  REQUIRE(derive_stream_seed(7, 0) != derive_stream_seed(8, 0));
  REQUIRE(derive_stream_seed(7, 3) == derive_stream_seed(7, 3));
}

TEST_CASE("uniform01 and below stay in range") {
  SplitMix64 g(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = g.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    REQUIRE(g.below(7) < 7);
  }
  std::vector<double> counts(8, 0.0);
  for (int i = 0; i < 80000; ++i) counts[g.below(8)] += 1.0;
  for (const double c : counts) {
    REQUIRE(c > 10000 * 0.85);
    REQUIRE(c < 10000 * 1.15);
  }
}

TEST_CASE("normal draws match the first two moments") {
  SplitMix64 g(9001);
  const size_t n = 100000;
  std::vector<double> x(n);
  for (auto& v : x) v = g.normal();
  const double se_mean = 1.0 / std::sqrt(static_cast<double>(n));
  REQUIRE(std::abs(stats::mean(x)) < 4 * se_mean);
  REQUIRE(std::abs(stats::sample_sd(x) - 1.0) < 4 * se_mean);
}

TEST_CASE("sample_subset draws distinct in-range values") {
  SplitMix64 g(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<uint32_t> out;
    sample_subset(g, 50, 7, out);
    REQUIRE(out.size() == 7);
    std::sort(out.begin(), out.end());
    REQUIRE(std::adjacent_find(out.begin(), out.end()) == out.end());
    REQUIRE(out.back() < 50);
  }
  // m == universe selects everything
  std::vector<uint32_t> all;
  sample_subset(g, 6, 6, all);
  std::sort(all.begin(), all.end());
  for (uint32_t i = 0; i < 6; ++i) REQUIRE(all[i] == i);
}

TEST_CASE("shuffle preserves the multiset") {
  SplitMix64 g(11);
  std::vector<int> v{1, 2, 2, 3, 5, 8, 13};
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  shuffle(g, v);
  std::sort(v.begin(), v.end());
  REQUIRE(v == sorted);
}
