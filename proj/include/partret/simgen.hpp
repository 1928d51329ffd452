#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "partret/dataset.hpp"
#include "partret/rng.hpp"

namespace partret {

namespace detail {

inline CodeMatrix alloc_cols(uint32_t s, uint64_t n) {
  return CodeMatrix(s, std::vector<uint8_t>(n, 0));
}

inline void require_n(uint64_t n) {
  if (n == 0) throw config_error("n must be positive");
}

inline double example4_mean(uint32_t r) {
  const double rr = r;
  return 4.0 * (rr * (rr - 1.0) + (10.0 - rr) * (9.0 - rr));
}

inline std::pair<double, double> example5_location_scale(bool group1, bool group2, double mu0) {
  const double mu1 = group1 ? mu0 : 0.0;
  const double mu2 = group2 ? 1.5 * mu0 : 0.0;
  const double s1 = group1 ? 2.0 : 1.0;
  const double s2 = group2 ? 3.0 : 1.0;
  return {std::max(mu1, mu2) + 0.1 * (mu1 + mu2), std::max(s1, s2)};
}

}  // namespace detail

// Six independent binary variables with success probabilities
// 0.7, 0.7, 0.5, 0.5, 0.5, 0.5; y ~ Normal(X1*X2, 1).
inline Dataset gen_example1(uint64_t n, uint64_t seed) {
  detail::require_n(n);
  constexpr std::array<double, 6> kP = {0.7, 0.7, 0.5, 0.5, 0.5, 0.5};
  CodeMatrix cols = detail::alloc_cols(6, n);
  std::vector<double> y(n);
  SplitMix64 g = stream_rng(seed, 1);
  for (uint64_t i = 0; i < n; ++i) {
    for (size_t s = 0; s < kP.size(); ++s) cols[s][i] = g.bernoulli(kP[s]) ? 1 : 0;
    y[i] = static_cast<double>(cols[0][i] & cols[1][i]) + g.normal();
  }
  return make_dataset(std::move(cols), std::move(y), YModel::random_y, {},
                      std::vector<uint32_t>(6, 2));
}

// Three independent binaries; the response is exactly X1*X2 (raw 0/1,
// normalization left to the caller).
inline Dataset gen_example2(uint64_t n, std::array<double, 3> probs, uint64_t seed) {
  detail::require_n(n);
  CodeMatrix cols = detail::alloc_cols(3, n);
  std::vector<double> y(n);
  SplitMix64 g = stream_rng(seed, 1);
  for (uint64_t i = 0; i < n; ++i) {
    for (size_t s = 0; s < 3; ++s) cols[s][i] = g.bernoulli(probs[s]) ? 1 : 0;
    y[i] = static_cast<double>(cols[0][i] & cols[1][i]);
  }
  return make_dataset(std::move(cols), std::move(y), YModel::random_y, {},
                      std::vector<uint32_t>(3, 2));
}

// (X1, X2) drawn from the four cells (1,1), (1,0), (0,1), (0,0) with
// probabilities q1, q0, q0, q1; y = X1*X2 + (1-X1)*(1-X2). Both variables
// are influential but neither has a marginal observable effect when the
// cells are balanced. Optional fair-coin noise columns can be appended.
inline Dataset gen_example3(uint64_t n, double q0, double q1, uint32_t noise_vars, uint64_t seed) {
  detail::require_n(n);
  if (!(q0 > 0.0) || !(q1 > 0.0) || std::abs(2.0 * q0 + 2.0 * q1 - 1.0) > 1e-9) {
    throw config_error("cell probabilities must be positive with 2*q0 + 2*q1 = 1");
  }
  const uint32_t S = 2 + noise_vars;
  CodeMatrix cols = detail::alloc_cols(S, n);
  std::vector<double> y(n);
  SplitMix64 g = stream_rng(seed, 1);
  for (uint64_t i = 0; i < n; ++i) {
    const double u = g.uniform01();
    uint8_t x1 = 0, x2 = 0;
    if (u < q1) {
      x1 = 1;
      x2 = 1;
    } else if (u < q1 + q0) {
      x1 = 1;
    } else if (u < q1 + 2.0 * q0) {
      x2 = 1;
    }
    cols[0][i] = x1;
    cols[1][i] = x2;
    y[i] = static_cast<double>((x1 & x2) | ((1 - x1) & (1 - x2)));
    for (uint32_t s = 2; s < S; ++s) cols[s][i] = g.bernoulli(0.5) ? 1 : 0;
  }
  return make_dataset(std::move(cols), std::move(y), YModel::random_y, {},
                      std::vector<uint32_t>(S, 2));
}

// 500 binaries, the first 10 influential: R ~ uniform{1..9} of them are set
// per subject, the subset chosen uniformly. Noise columns get a success
// probability drawn once per dataset from Uniform(0.4, 0.6). Given R,
// y ~ Normal(mu, mu) with mu = 4*(R*(R-1) + (10-R)*(9-R)).
inline Dataset gen_example4(uint64_t n, uint64_t seed) {
  detail::require_n(n);
  const uint32_t S = 500;
  CodeMatrix cols = detail::alloc_cols(S, n);
  std::vector<double> y(n);
  SplitMix64 gp = stream_rng(seed, 0);
  std::vector<double> p(S, 0.0);
  for (uint32_t s = 10; s < S; ++s) p[s] = gp.uniform(0.4, 0.6);
  SplitMix64 g = stream_rng(seed, 1);
  std::vector<uint32_t> ones;
  for (uint64_t i = 0; i < n; ++i) {
    const auto r = static_cast<uint32_t>(1 + g.below(9));
    ones.clear();
    sample_subset(g, 10, r, ones);
    for (const uint32_t v : ones) cols[v][i] = 1;
    for (uint32_t s = 10; s < S; ++s) cols[s][i] = g.bernoulli(p[s]) ? 1 : 0;
    const double mu = detail::example4_mean(r);
    y[i] = mu + std::sqrt(mu) * g.normal();
  }
  return make_dataset(std::move(cols), std::move(y), YModel::random_y, {},
                      std::vector<uint32_t>(S, 2));
}

// 1000 binaries with two interacting influential groups, X1..X3 and X4..X7:
// mu1 = mu0*X1X2X3, mu2 = 1.5*mu0*X4X5X6X7, sigma1 = 1 + X1X2X3,
// sigma2 = 1 + 2*X4X5X6X7, y ~ Normal(max(mu1,mu2) + 0.1*(mu1+mu2),
// max(sigma1,sigma2)^2). The seven influential probabilities are fixed;
// noise probabilities are drawn once per dataset from Uniform(0.4, 0.6).
// The response is normalized before the dataset is returned.
inline Dataset gen_example5(uint64_t n, double mu0, uint64_t seed) {
  detail::require_n(n);
  if (!(mu0 > 0.0)) throw config_error("mu0 must be positive");
  const uint32_t S = 1000;
  constexpr std::array<double, 7> kP = {0.4, 0.5, 0.6, 0.35, 0.45, 0.55, 0.65};
  CodeMatrix cols = detail::alloc_cols(S, n);
  std::vector<double> y(n);
  SplitMix64 gp = stream_rng(seed, 0);
  std::vector<double> p(S, 0.0);
  for (size_t s = 0; s < kP.size(); ++s) p[s] = kP[s];
  for (uint32_t s = 7; s < S; ++s) p[s] = gp.uniform(0.4, 0.6);
  SplitMix64 g = stream_rng(seed, 1);
  for (uint64_t i = 0; i < n; ++i) {
    for (uint32_t s = 0; s < S; ++s) cols[s][i] = g.bernoulli(p[s]) ? 1 : 0;
    const bool group1 = cols[0][i] && cols[1][i] && cols[2][i];
    const bool group2 = cols[3][i] && cols[4][i] && cols[5][i] && cols[6][i];
    const auto [mu, sigma] = detail::example5_location_scale(group1, group2, mu0);
    y[i] = mu + sigma * g.normal();
  }
  Dataset d = make_dataset(std::move(cols), std::move(y), YModel::random_y, {},
                           std::vector<uint32_t>(S, 2));
  return normalize_response(d);
}

struct ExampleSpec {
  int example = 1;
  uint64_t n = 0;  // 0 = the example's default sample size
  double mu0 = 4.0;
  double q0 = 0.25;
  double q1 = 0.25;
  std::array<double, 3> probs = {0.5, 0.5, 0.5};
  uint32_t noise_vars = 0;
  uint64_t seed = 0;
};

inline Dataset gen_example(const ExampleSpec& spec) {
  uint64_t n = spec.n;
  switch (spec.example) {
    case 1:
      return gen_example1(n ? n : 200, spec.seed);
    case 2:
      return gen_example2(n ? n : 200, spec.probs, spec.seed);
    case 3:
      return gen_example3(n ? n : 400, spec.q0, spec.q1, spec.noise_vars, spec.seed);
    case 4:
      return gen_example4(n ? n : 400, spec.seed);
    case 5:
      return gen_example5(n ? n : 400, spec.mu0, spec.seed);
    default:
      throw config_error("example must be 1..5");
  }
}

}  // namespace partret
