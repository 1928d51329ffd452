#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "partret/parallel.hpp"
#include "partret/partition.hpp"
#include "partret/ranking.hpp"

namespace partret {

// |t| of the pooled-variance two-sample t test on y split by a binary
// variable. Perfect separation (no within-group variance, unequal means)
// is reported as +infinity with a warning instead of failing the scan.
inline double t_statistic(const Dataset& d, uint32_t var, Warnings* warnings = nullptr) {
  if (var >= d.n_vars()) throw config_error("variable index out of range");
  if (d.arity[var] != 2) {
    throw data_error("t statistic needs a binary variable; '" + d.names[var] + "' has arity " +
                     std::to_string(d.arity[var]));
  }
  const auto& col = d.col(var);
  const size_t n = d.n_rows();
  double sum[2] = {0, 0};
  size_t cnt[2] = {0, 0};
  for (size_t i = 0; i < n; ++i) {
    sum[col[i]] += d.y[i];
    ++cnt[col[i]];
  }
  if (cnt[0] == 0 || cnt[1] == 0) {
    throw data_error("variable '" + d.names[var] + "' has an empty group");
  }
  const double m0 = sum[0] / static_cast<double>(cnt[0]);
  const double m1 = sum[1] / static_cast<double>(cnt[1]);
  double within = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dev = d.y[i] - (col[i] ? m1 : m0);
    within += dev * dev;
  }
  if (n < 3 || within == 0.0) {
    if (m0 == m1) {
      warn(warnings, "variable '" + d.names[var] + "': no within-group variance and equal means; t = 0");
      return 0.0;
    }
    warn(warnings, "variable '" + d.names[var] + "': perfect separation; |t| reported as infinity");
    return std::numeric_limits<double>::infinity();
  }
  const double sp2 = within / static_cast<double>(n - 2);
  const double se = std::sqrt(sp2 * (1.0 / static_cast<double>(cnt[0]) + 1.0 / static_cast<double>(cnt[1])));
  return std::abs(m1 - m0) / se;
}

// Marginal influence of a single variable: I over its one-variable partition.
inline double i1(const Dataset& d, uint32_t var) {
  if (var >= d.n_vars()) throw config_error("variable index out of range");
  const uint32_t r = d.arity[var];
  std::vector<double> wsum(r, 0.0);
  std::vector<uint32_t> cnt(r, 0);
  const auto& col = d.col(var);
  const size_t n = d.n_rows();
  double total = 0;
  for (size_t i = 0; i < n; ++i) {
    wsum[col[i]] += d.y[i];
    ++cnt[col[i]];
    total += d.y[i];
  }
  const double ybar = total / static_cast<double>(n);
  double acc = 0;
  for (uint32_t c = 0; c < r; ++c) {
    if (cnt[c] == 0) continue;
    const double dev = wsum[c] - static_cast<double>(cnt[c]) * ybar;
    acc += dev * dev;
  }
  return acc / static_cast<double>(n);
}

inline std::vector<double> i1_scores(const Dataset& d) {
  std::vector<double> out(d.n_vars());
  for (uint32_t v = 0; v < d.n_vars(); ++v) out[v] = i1(d, v);
  return out;
}

// Pearson chi-square of the variable x label contingency table. The response
// must carry the specified-Y tag and take few distinct values (labels);
// cells with zero expected count are skipped with a warning.
inline double chi_square(const Dataset& d, uint32_t var, Warnings* warnings = nullptr) {
  if (var >= d.n_vars()) throw config_error("variable index out of range");
  if (d.y_model != YModel::specified_y) {
    throw data_error("chi-square needs a specified-response (label) dataset");
  }
  std::vector<double> labels(d.y);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() > 32) {
    throw data_error("response has " + std::to_string(labels.size()) +
                     " distinct values; too many to be treated as labels");
  }
  const size_t L = labels.size();
  const uint32_t r = d.arity[var];
  std::vector<double> table(static_cast<size_t>(r) * L, 0.0);
  const auto& col = d.col(var);
  const size_t n = d.n_rows();
  for (size_t i = 0; i < n; ++i) {
    const size_t l = static_cast<size_t>(
        std::lower_bound(labels.begin(), labels.end(), d.y[i]) - labels.begin());
    table[col[i] * L + l] += 1.0;
  }
  std::vector<double> row_tot(r, 0.0), col_tot(L, 0.0);
  for (uint32_t a = 0; a < r; ++a) {
    for (size_t l = 0; l < L; ++l) {
      row_tot[a] += table[a * L + l];
      col_tot[l] += table[a * L + l];
    }
  }
  double stat = 0;
  size_t skipped = 0;
  for (uint32_t a = 0; a < r; ++a) {
    for (size_t l = 0; l < L; ++l) {
      const double expected = row_tot[a] * col_tot[l] / static_cast<double>(n);
      if (expected <= 0.0) {
        ++skipped;
        continue;
      }
      const double dev = table[a * L + l] - expected;
      stat += dev * dev / expected;
    }
  }
  if (skipped > 0) {
    warn(warnings, "variable '" + d.names[var] + "': " + std::to_string(skipped) +
                       " cells with zero expected count excluded");
  }
  return stat;
}

struct ScoredPair {
  uint32_t a = 0;  // variable ids, a < b
  uint32_t b = 0;
  double i2 = 0;
};

struct PairScan {
  std::vector<uint32_t> vars;      // universe, ascending
  std::vector<ScoredPair> pairs;   // descending i2; ties by (a, b)
};

// I for every unordered pair of the universe, sorted descending. The per-pair
// partition fuses the two code columns directly; pairs are scanned in
// parallel and written to fixed slots, so the result is order-independent.
inline PairScan pair_scan(const Dataset& d, std::span<const uint32_t> vars = {},
                          unsigned workers = 0) {
  PairScan scan;
  if (vars.empty()) {
    scan.vars.resize(d.n_vars());
    std::iota(scan.vars.begin(), scan.vars.end(), 0u);
  } else {
    scan.vars.assign(vars.begin(), vars.end());
    std::sort(scan.vars.begin(), scan.vars.end());
    detail::validate_subset(d, scan.vars);
  }
  const size_t k = scan.vars.size();
  if (k < 2) throw config_error("pair scan needs at least two variables");
  const size_t n_pairs = k * (k - 1) / 2;
  scan.pairs.resize(n_pairs);
  const size_t n = d.n_rows();
  double total = 0;
  for (const double v : d.y) total += v;
  const double ybar = total / static_cast<double>(n);
  if (workers == 0) workers = default_workers();

  parallel_chunks(k - 1, workers, 1, [&](size_t lo, size_t hi) {
    std::vector<double> wsum;
    std::vector<uint32_t> cnt;
    for (size_t ia = lo; ia < hi; ++ia) {
      const uint32_t va = scan.vars[ia];
      const uint8_t* xa = d.col(va).data();
      const uint32_t ra = d.arity[va];
      // slot of (ia, ia+1) in the flattened upper triangle
      size_t slot = ia * k - ia * (ia + 1) / 2;
      for (size_t ib = ia + 1; ib < k; ++ib, ++slot) {
        const uint32_t vb = scan.vars[ib];
        const uint8_t* xb = d.col(vb).data();
        const uint32_t rb = d.arity[vb];
        const uint32_t space = ra * rb;
        wsum.assign(space, 0.0);
        cnt.assign(space, 0);
        for (size_t i = 0; i < n; ++i) {
          const uint32_t key = static_cast<uint32_t>(xa[i]) * rb + xb[i];
          wsum[key] += d.y[i];
          ++cnt[key];
        }
        double acc = 0;
        for (uint32_t c = 0; c < space; ++c) {
          if (cnt[c] == 0) continue;
          const double dev = wsum[c] - static_cast<double>(cnt[c]) * ybar;
          acc += dev * dev;
        }
        scan.pairs[slot] = {va, vb, acc / static_cast<double>(n)};
      }
    }
  });

  std::sort(scan.pairs.begin(), scan.pairs.end(), [](const ScoredPair& x, const ScoredPair& y) {
    if (x.i2 != y.i2) return x.i2 > y.i2;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  return scan;
}

// Scans pairs in descending I and ranks a variable by how many distinct
// variables have appeared before its first pair. When a pair introduces two
// new variables at once they are ordered by their marginal I (higher first).
// Variables that never appear share the trailing mean rank.
inline RankingTable rank_i2_first_appearance(const PairScan& scan,
                                             std::span<const double> i1_by_var) {
  if (scan.pairs.empty()) throw config_error("pair list is empty");
  const size_t k = scan.vars.size();
  std::vector<size_t> position(k, 0);  // 1-based appearance order, 0 = unseen
  std::vector<size_t> var_index(i1_by_var.size(), k);
  for (size_t i = 0; i < k; ++i) {
    if (scan.vars[i] >= i1_by_var.size()) {
      throw config_error("marginal scores do not cover the pair universe");
    }
    var_index[scan.vars[i]] = i;
  }
  size_t next_pos = 1;
  for (const auto& p : scan.pairs) {
    const size_t ia = var_index[p.a];
    const size_t ib = var_index[p.b];
    const bool new_a = position[ia] == 0;
    const bool new_b = position[ib] == 0;
    if (new_a && new_b) {
      const bool a_first = i1_by_var[p.a] != i1_by_var[p.b] ? i1_by_var[p.a] > i1_by_var[p.b]
                                                            : p.a < p.b;
      position[a_first ? ia : ib] = next_pos++;
      position[a_first ? ib : ia] = next_pos++;
    } else if (new_a) {
      position[ia] = next_pos++;
    } else if (new_b) {
      position[ib] = next_pos++;
    }
    if (next_pos > k) break;
  }
  // higher score = earlier appearance; unseen variables share score 0
  std::vector<double> scores(k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    if (position[i] != 0) scores[i] = static_cast<double>(k + 1 - position[i]);
  }
  return make_ranking("i2", scan.vars, std::move(scores));
}

// Ranks variables by how often they appear among the n_r top pairs.
inline RankingTable rank_i2f(const PairScan& scan, size_t n_r) {
  if (n_r < 1 || n_r > scan.pairs.size()) {
    throw config_error("n_r must be between 1 and the number of pairs (" +
                       std::to_string(scan.pairs.size()) + ")");
  }
  const size_t k = scan.vars.size();
  std::vector<size_t> var_index(scan.vars.empty() ? 0 : scan.vars.back() + 1, k);
  for (size_t i = 0; i < k; ++i) var_index[scan.vars[i]] = i;
  std::vector<double> counts(k, 0.0);
  for (size_t p = 0; p < n_r; ++p) {
    counts[var_index[scan.pairs[p].a]] += 1.0;
    counts[var_index[scan.pairs[p].b]] += 1.0;
  }
  return make_ranking("i2f", scan.vars, std::move(counts));
}

// Whole-dataset marginal ranking for one method tag: "t", "i1" or "chisq".
inline RankingTable marginal_ranking(const Dataset& d, const std::string& method,
                                     Warnings* warnings = nullptr) {
  std::vector<uint32_t> vars(d.n_vars());
  std::iota(vars.begin(), vars.end(), 0u);
  std::vector<double> scores(d.n_vars());
  if (method == "t") {
    for (uint32_t v = 0; v < d.n_vars(); ++v) scores[v] = t_statistic(d, v, warnings);
  } else if (method == "i1") {
    for (uint32_t v = 0; v < d.n_vars(); ++v) scores[v] = i1(d, v);
  } else if (method == "chisq") {
    for (uint32_t v = 0; v < d.n_vars(); ++v) scores[v] = chi_square(d, v, warnings);
  } else {
    throw config_error("unknown marginal method: " + method);
  }
  return make_ranking(method, std::move(vars), std::move(scores));
}

}  // namespace partret
