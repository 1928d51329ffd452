#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "partret/errors.hpp"

namespace partret {

// 1-based ranks with larger scores first; tied scores share the mean rank.
inline std::vector<double> ranks_descending(std::span<const double> scores) {
  const size_t n = scores.size();
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean_rank = static_cast<double>(i + 1 + j + 1) / 2.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

// Per-variable scores and 1-based mean-tie ranks for one method. vars lists
// the covered variable ids in ascending order; score and rank are parallel.
struct RankingTable {
  std::string method;
  std::vector<uint32_t> vars;
  std::vector<double> score;
  std::vector<double> rank;
};

inline RankingTable make_ranking(std::string method, std::vector<uint32_t> vars,
                                 std::vector<double> scores) {
  RankingTable t;
  t.method = std::move(method);
  t.vars = std::move(vars);
  t.score = std::move(scores);
  t.rank = ranks_descending(t.score);
  return t;
}

// Variable ids ordered by (rank ascending, id ascending).
inline std::vector<uint32_t> order_by_rank(const RankingTable& t) {
  std::vector<uint32_t> idx(t.vars.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    if (t.rank[a] != t.rank[b]) return t.rank[a] < t.rank[b];
    return t.vars[a] < t.vars[b];
  });
  std::vector<uint32_t> out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = t.vars[idx[i]];
  return out;
}

inline double rank_of(const RankingTable& t, uint32_t var) {
  const auto it = std::lower_bound(t.vars.begin(), t.vars.end(), var);
  if (it == t.vars.end() || *it != var) {
    throw data_error("variable " + std::to_string(var) + " is not covered by the ranking");
  }
  return t.rank[static_cast<size_t>(it - t.vars.begin())];
}

}  // namespace partret
