#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace partret {

// SplitMix64 (Steele, Lea & Flood; Vigna's fixed-increment variant).
// Chosen because independent streams can be derived by key mixing alone,
// which keeps every draw reproducible no matter how work is spread across
// threads. The generator, the stream derivation and every sampling routine
// below are part of the output contract: a given seed yields the same
// datasets, subset draws and permutations on every run.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // unbiased integer in [0, bound), bound > 0; Lemire multiply-shift with rejection
  uint64_t below(uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<uint64_t>(m);
    if (lo < bound) {
      const uint64_t cutoff = (0 - bound) % bound;
      while (lo < cutoff) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // standard normal via Marsaglia's polar method; one value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Seed of an independent stream derived from (seed, stream). Work item i
// always sees stream i, so results cannot depend on worker count or on the
// order in which items are processed.
inline uint64_t derive_stream_seed(uint64_t seed, uint64_t stream) {
  return detail::mix64(detail::mix64(seed) ^ detail::mix64(stream ^ 0x6a09e667f3bcc909ULL));
}

inline SplitMix64 stream_rng(uint64_t seed, uint64_t stream) {
  return SplitMix64(derive_stream_seed(seed, stream));
}

// Uniform m-subset of [0, universe) via Floyd's algorithm; appends m distinct
// values to out (unsorted). O(m) draws and no O(universe) scratch.
inline void sample_subset(SplitMix64& g, uint64_t universe, uint32_t m, std::vector<uint32_t>& out) {
  const size_t base = out.size();
  for (uint64_t j = universe - m; j < universe; ++j) {
    const auto t = static_cast<uint32_t>(g.below(j + 1));
    bool seen = false;
    for (size_t p = base; p < out.size(); ++p) {
      if (out[p] == t) {
        seen = true;
        break;
      }
    }
    out.push_back(seen ? static_cast<uint32_t>(j) : t);
  }
}

// Fisher-Yates, descending index order.
template <typename T>
inline void shuffle(SplitMix64& g, std::vector<T>& v) {
  for (size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<size_t>(g.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace partret
