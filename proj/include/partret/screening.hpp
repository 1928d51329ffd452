#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partret/elimination.hpp"
#include "partret/parallel.hpp"
#include "partret/ranking.hpp"
#include "partret/rng.hpp"

namespace partret {

// Stratified draw: k_in variables from list_vars, m - k_in from outside it.
struct Strata {
  std::vector<uint32_t> list_vars;
  uint32_t k_in = 0;
};

struct ScreeningConfig {
  uint32_t m = 7;
  uint64_t n_s = 20000;
  uint64_t seed = 0;
  StoppingRule rule = StoppingRule::all_d_positive();
  std::optional<Strata> strata;
};

struct SubsetOutcome {
  std::vector<uint32_t> vars;      // drawn subset, ascending
  std::vector<uint32_t> retained;  // ascending
  double stopping_i = 0;
};

struct RetentionTally {
  std::vector<uint64_t> sampled;   // per variable
  std::vector<uint64_t> retained;  // per variable
  std::vector<SubsetOutcome> outcomes;  // indexed by draw id
};

inline std::vector<double> stopping_values(const RetentionTally& t) {
  std::vector<double> out(t.outcomes.size());
  for (size_t i = 0; i < t.outcomes.size(); ++i) out[i] = t.outcomes[i].stopping_i;
  return out;
}

namespace detail {

inline void validate_screening(const Dataset& d, const ScreeningConfig& cfg) {
  const uint32_t S = d.n_vars();
  if (cfg.m < 1) throw config_error("subset size m must be at least 1");
  if (cfg.m > S) throw config_error("subset size m exceeds the variable count");
  if (cfg.n_s < 1) throw config_error("number of subsets n_s must be at least 1");
  if (!cfg.strata) return;
  const auto& strata = *cfg.strata;
  std::vector<uint32_t> list = strata.list_vars;
  std::sort(list.begin(), list.end());
  for (size_t i = 0; i < list.size(); ++i) {
    if (list[i] >= S) throw config_error("strata list contains an out-of-range variable");
    if (i > 0 && list[i] == list[i - 1]) throw config_error("strata list contains duplicates");
  }
  const uint64_t L = list.size();
  if (strata.k_in > cfg.m) throw config_error("k_in exceeds subset size m");
  if (strata.k_in > L) throw config_error("k_in exceeds the strata list size");
  if (static_cast<uint64_t>(cfg.m - strata.k_in) > S - L) {
    throw config_error("not enough variables outside the strata list");
  }
}

}  // namespace detail

// Draws n_s random m-subsets (stratified when configured), runs backward
// elimination on each, and tallies how often every variable was sampled and
// retained. Subset i derives its own stream from (seed, i), so the result is
// identical for any worker count.
inline RetentionTally screen(const Dataset& d, const ScreeningConfig& cfg, unsigned workers = 0) {
  detail::validate_screening(d, cfg);
  const uint32_t S = d.n_vars();
  if (workers == 0) workers = default_workers();

  std::vector<uint32_t> list, outside;
  if (cfg.strata) {
    list = cfg.strata->list_vars;
    std::sort(list.begin(), list.end());
    std::vector<bool> in_list(S, false);
    for (const uint32_t v : list) in_list[v] = true;
    outside.reserve(S - list.size());
    for (uint32_t v = 0; v < S; ++v) {
      if (!in_list[v]) outside.push_back(v);
    }
  }
  const uint32_t k_in = cfg.strata ? cfg.strata->k_in : 0;

  RetentionTally tally;
  tally.sampled.assign(S, 0);
  tally.retained.assign(S, 0);
  tally.outcomes.resize(cfg.n_s);

  parallel_chunks(cfg.n_s, workers, 64, [&](size_t lo, size_t hi) {
    detail::Eliminator engine(d);
    std::vector<uint32_t> subset;
    std::vector<uint32_t> drawn;
    for (size_t i = lo; i < hi; ++i) {
      SplitMix64 g = stream_rng(cfg.seed, i);
      subset.clear();
      if (cfg.strata) {
        drawn.clear();
        sample_subset(g, list.size(), k_in, drawn);
        for (const uint32_t p : drawn) subset.push_back(list[p]);
        drawn.clear();
        sample_subset(g, outside.size(), cfg.m - k_in, drawn);
        for (const uint32_t p : drawn) subset.push_back(outside[p]);
      } else {
        sample_subset(g, S, cfg.m, subset);
      }
      std::sort(subset.begin(), subset.end());
      SubsetOutcome& out = tally.outcomes[i];
      out.vars = subset;
      StopReason reason = StopReason::single_variable_left;
      engine.run(subset, cfg.rule, out.retained, out.stopping_i, reason);
    }
  });

  for (const auto& out : tally.outcomes) {
    for (const uint32_t v : out.vars) ++tally.sampled[v];
    for (const uint32_t v : out.retained) ++tally.retained[v];
  }
  return tally;
}

enum class RetentionRankMode { raw_count, rate };

inline RankingTable rank_by_retention(const RetentionTally& t, RetentionRankMode mode) {
  if (t.sampled.empty()) throw config_error("empty retention tally");
  const size_t S = t.sampled.size();
  std::vector<uint32_t> vars(S);
  std::iota(vars.begin(), vars.end(), 0u);
  std::vector<double> scores(S, 0.0);
  for (size_t v = 0; v < S; ++v) {
    if (mode == RetentionRankMode::raw_count) {
      scores[v] = static_cast<double>(t.retained[v]);
    } else {
      scores[v] = t.sampled[v] == 0
                      ? 0.0
                      : static_cast<double>(t.retained[v]) / static_cast<double>(t.sampled[v]);
    }
  }
  return make_ranking(mode == RetentionRankMode::raw_count ? "retention_count" : "retention_rate",
                      std::move(vars), std::move(scores));
}

struct ResuscitationStage {
  uint32_t list_size = 10;
  uint32_t k_in = 3;
  uint64_t n_s = 100000;
};

struct StageResult {
  std::vector<uint32_t> list;  // the reduced list used for this stage
  RetentionTally tally;
  RankingTable ranking;
};

namespace detail {

// Stage ranking: list members first, ordered by in-stage retention rate
// (their sampling frequency is forced, so raw counts would only restate the
// design), then everything else by raw retention count.
inline RankingTable stage_ranking(const RetentionTally& tally, std::span<const uint32_t> list,
                                  std::string method) {
  const size_t S = tally.sampled.size();
  std::vector<bool> in_list(S, false);
  for (const uint32_t v : list) in_list[v] = true;

  std::vector<uint32_t> in_vars, out_vars;
  std::vector<double> in_scores, out_scores;
  for (uint32_t v = 0; v < S; ++v) {
    if (in_list[v]) {
      in_vars.push_back(v);
      in_scores.push_back(tally.sampled[v] == 0 ? 0.0
                                                : static_cast<double>(tally.retained[v]) /
                                                      static_cast<double>(tally.sampled[v]));
    } else {
      out_vars.push_back(v);
      out_scores.push_back(static_cast<double>(tally.retained[v]));
    }
  }
  const std::vector<double> in_ranks = ranks_descending(in_scores);
  const std::vector<double> out_ranks = ranks_descending(out_scores);

  RankingTable t;
  t.method = std::move(method);
  t.vars.resize(S);
  std::iota(t.vars.begin(), t.vars.end(), 0u);
  t.score.assign(S, 0.0);
  t.rank.assign(S, 0.0);
  for (size_t i = 0; i < in_vars.size(); ++i) {
    t.score[in_vars[i]] = in_scores[i];
    t.rank[in_vars[i]] = in_ranks[i];
  }
  const double offset = static_cast<double>(in_vars.size());
  for (size_t i = 0; i < out_vars.size(); ++i) {
    t.score[out_vars[i]] = out_scores[i];
    t.rank[out_vars[i]] = out_ranks[i] + offset;
  }
  return t;
}

}  // namespace detail

// Stratified re-screening: stage t takes the top list_size variables of the
// previous ranking as the reduced list, draws k_in of each subset from it,
// and re-ranks. Stage results are labeled ud1, ud2, ... after the rounds.
inline std::vector<StageResult> resuscitate(const Dataset& d, const RankingTable& initial,
                                            std::span<const ResuscitationStage> plan,
                                            const ScreeningConfig& base, unsigned workers = 0) {
  if (plan.empty()) throw config_error("resuscitation plan is empty");
  if (initial.vars.size() != d.n_vars()) {
    throw config_error("initial ranking must cover every variable");
  }
  std::vector<StageResult> results;
  const RankingTable* prev = &initial;
  for (size_t t = 0; t < plan.size(); ++t) {
    const ResuscitationStage& stage = plan[t];
    if (stage.list_size > d.n_vars()) throw config_error("stage list size exceeds variable count");
    const std::vector<uint32_t> by_rank = order_by_rank(*prev);
    StageResult res;
    res.list.assign(by_rank.begin(), by_rank.begin() + stage.list_size);
    std::sort(res.list.begin(), res.list.end());

    ScreeningConfig cfg = base;
    cfg.n_s = stage.n_s;
    cfg.seed = derive_stream_seed(base.seed, t + 1);
    cfg.strata = Strata{res.list, stage.k_in};
    res.tally = screen(d, cfg, workers);
    res.ranking = detail::stage_ranking(res.tally, res.list, "ud" + std::to_string(t + 1));
    results.push_back(std::move(res));
    prev = &results.back().ranking;
  }
  return results;
}

}  // namespace partret
