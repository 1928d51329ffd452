#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "partret/ranking.hpp"
#include "partret/rng.hpp"
#include "partret/screening.hpp"

namespace partret {

// Uniform random permutation of the response; the explanatory matrix is
// shared untouched, so the relationships among the X columns survive.
inline Dataset permute_response(const Dataset& d, uint64_t seed) {
  Dataset out = d;
  SplitMix64 g = stream_rng(seed, 0x7065726dULL);
  shuffle(g, out.y);
  return out;
}

// Spiked permutation: the listed columns keep their alignment with y while
// every other column is realigned by one shared row permutation. Marginal
// statistics of the listed columns are unchanged; the rest go to the null.
inline Dataset spike_permute(const Dataset& d, std::span<const uint32_t> keep, uint64_t seed) {
  std::vector<bool> kept(d.n_vars(), false);
  for (const uint32_t v : keep) {
    if (v >= d.n_vars()) throw config_error("spiked column index out of range");
    kept[v] = true;
  }
  std::vector<uint32_t> perm(d.n_rows());
  std::iota(perm.begin(), perm.end(), 0u);
  SplitMix64 g = stream_rng(seed, 0x7370696bULL);
  shuffle(g, perm);
  CodeMatrix cols(d.n_vars());
  for (uint32_t s = 0; s < d.n_vars(); ++s) {
    if (kept[s]) {
      cols[s] = d.col(s);
    } else {
      cols[s].resize(d.n_rows());
      for (size_t i = 0; i < d.n_rows(); ++i) cols[s][i] = d.col(s)[perm[i]];
    }
  }
  Dataset out = d;
  out.columns = std::make_shared<const CodeMatrix>(std::move(cols));
  return out;
}

// Observed screening run plus b replicates on permuted responses. Permutation
// k uses seed ^ k, so a study can be extended without recomputing earlier
// replicates; the screening seed is shared, pairing the subset draws.
struct PermutationStudy {
  uint64_t b = 0;
  uint64_t seed = 0;
  std::vector<double> observed;                 // stopping-I per subset
  std::vector<std::vector<double>> null_stats;  // b lists, same length as observed
  RetentionTally observed_tally;
};

inline PermutationStudy run_permutation_study(const Dataset& d, const ScreeningConfig& cfg,
                                              uint64_t b, uint64_t seed, unsigned workers = 0) {
  if (b < 1) throw config_error("permutation count b must be at least 1");
  PermutationStudy study;
  study.b = b;
  study.seed = seed;
  study.observed_tally = screen(d, cfg, workers);
  study.observed = stopping_values(study.observed_tally);
  study.null_stats.resize(b);
  for (uint64_t k = 1; k <= b; ++k) {
    const Dataset permuted = permute_response(d, seed ^ k);
    study.null_stats[k - 1] = stopping_values(screen(permuted, cfg, workers));
  }
  return study;
}

struct FdrPoint {
  double threshold = 0;
  uint64_t m1 = 0;        // observed stopping-I values >= threshold
  double p0_median = 0;   // median over b of the null exceedance proportions
  double fdr = 0;         // raw ratio; can exceed 1
  double fdr_capped = 0;  // min(fdr, 1) as reported
};

struct FdrCurve {
  std::vector<FdrPoint> points;  // ascending threshold
  uint64_t n_s = 0;
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// fdr(threshold) = median over permutations of the null exceedance
// proportion, divided by M1/n_s. Candidate thresholds are the distinct
// observed stopping-I values; all comparisons are >=.
inline FdrCurve fdr_curve(const PermutationStudy& study) {
  if (study.observed.empty()) throw config_error("study has no observed statistics");
  if (study.null_stats.empty()) throw config_error("study has no permutation replicates");
  const size_t n_s = study.observed.size();
  std::vector<double> obs = study.observed;
  std::sort(obs.begin(), obs.end(), std::greater<>());
  std::vector<std::vector<double>> nulls = study.null_stats;
  for (auto& list : nulls) {
    if (list.size() != n_s) throw config_error("permutation replicate length mismatch");
    std::sort(list.begin(), list.end(), std::greater<>());
  }
  FdrCurve curve;
  curve.n_s = n_s;
  std::vector<size_t> ptr(nulls.size(), 0);
  std::vector<double> p0(nulls.size());
  size_t i = 0;
  while (i < n_s) {
    const double threshold = obs[i];
    size_t j = i;
    while (j + 1 < n_s && obs[j + 1] == threshold) ++j;
    const uint64_t m1 = j + 1;
    for (size_t k = 0; k < nulls.size(); ++k) {
      while (ptr[k] < n_s && nulls[k][ptr[k]] >= threshold) ++ptr[k];
      p0[k] = static_cast<double>(ptr[k]) / static_cast<double>(n_s);
    }
    std::vector<double> tmp = p0;
    const double med = detail::median_inplace(tmp);
    const double fdr = med / (static_cast<double>(m1) / static_cast<double>(n_s));
    curve.points.push_back({threshold, m1, med, fdr, std::min(fdr, 1.0)});
    i = j + 1;
  }
  std::reverse(curve.points.begin(), curve.points.end());
  return curve;
}

// Smallest threshold whose (capped) fdr estimate is <= alpha.
inline double threshold_at(const FdrCurve& curve, double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) throw config_error("alpha must be in (0, 1]");
  for (const auto& p : curve.points) {
    if (p.fdr_capped <= alpha) return p.threshold;
  }
  throw data_error("no threshold reaches the requested false-discovery level");
}

struct Selection {
  double threshold = 0;
  uint64_t qualifying_subsets = 0;
  std::vector<uint32_t> vars;               // union over qualifying retained sets
  std::vector<uint64_t> qualifying_counts;  // per selected variable
};

// Union of the retained variables of every subset whose stopping I reaches
// the threshold, with per-variable counts of qualifying subsets.
inline Selection select_above(const RetentionTally& tally, double threshold) {
  const size_t S = tally.sampled.size();
  std::vector<uint64_t> counts(S, 0);
  Selection sel;
  sel.threshold = threshold;
  for (const auto& out : tally.outcomes) {
    if (out.stopping_i >= threshold) {
      ++sel.qualifying_subsets;
      for (const uint32_t v : out.retained) ++counts[v];
    }
  }
  for (uint32_t v = 0; v < S; ++v) {
    if (counts[v] > 0) {
      sel.vars.push_back(v);
      sel.qualifying_counts.push_back(counts[v]);
    }
  }
  return sel;
}

struct CoveragePoint {
  uint64_t retained_count = 0;    // variables kept when sweeping the ranking
  double qualified_fraction = 0;  // share of the qualified set captured
};

// Sweeps the rank cutoff and reports how many variables must be retained to
// capture each successive fraction of the qualified set.
inline std::vector<CoveragePoint> rank_coverage_curve(const RankingTable& ranking,
                                                      std::span<const uint32_t> qualified) {
  if (qualified.empty()) throw data_error("qualified set is empty");
  std::vector<bool> is_qualified;
  for (const uint32_t v : qualified) {
    const auto it = std::lower_bound(ranking.vars.begin(), ranking.vars.end(), v);
    if (it == ranking.vars.end() || *it != v) {
      throw data_error("qualified variable " + std::to_string(v) + " is not in the ranking");
    }
    if (is_qualified.size() <= v) is_qualified.resize(v + 1, false);
    is_qualified[v] = true;
  }
  const std::vector<uint32_t> order = order_by_rank(ranking);
  std::vector<CoveragePoint> curve;
  size_t captured = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    const uint32_t v = order[k];
    if (v < is_qualified.size() && is_qualified[v]) {
      ++captured;
      curve.push_back({k + 1, static_cast<double>(captured) / static_cast<double>(qualified.size())});
      if (captured == qualified.size()) break;
    }
  }
  return curve;
}

}  // namespace partret
