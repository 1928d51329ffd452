#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "partret/elimination.hpp"
#include "partret/marginal.hpp"
#include "partret/permfdr.hpp"
#include "partret/ranking.hpp"
#include "partret/screening.hpp"

namespace partret {

inline std::string fmt_num(double v, int precision = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline void write_comments(std::ostream& os, std::span<const std::string> comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
}

// columns: variable  score  rank   (rows ordered by rank, then variable id)
inline void write_ranking_tsv(std::ostream& os, const RankingTable& t,
                              std::span<const std::string> names,
                              std::span<const std::string> comments) {
  write_comments(os, comments);
  os << "variable\tscore\trank\n";
  std::vector<uint32_t> idx(t.vars.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    if (t.rank[a] != t.rank[b]) return t.rank[a] < t.rank[b];
    return t.vars[a] < t.vars[b];
  });
  for (const uint32_t i : idx) {
    os << names[t.vars[i]] << '\t' << fmt_num(t.score[i]) << '\t' << fmt_num(t.rank[i]) << '\n';
  }
}

// columns: variable  sampled  retained  rate  rank
inline void write_tally_tsv(std::ostream& os, const RetentionTally& tally, const RankingTable& t,
                            std::span<const std::string> names,
                            std::span<const std::string> comments) {
  write_comments(os, comments);
  os << "variable\tsampled\tretained\trate\trank\n";
  std::vector<uint32_t> idx(t.vars.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    if (t.rank[a] != t.rank[b]) return t.rank[a] < t.rank[b];
    return t.vars[a] < t.vars[b];
  });
  for (const uint32_t i : idx) {
    const uint32_t v = t.vars[i];
    const double rate = tally.sampled[v] == 0 ? 0.0
                                              : static_cast<double>(tally.retained[v]) /
                                                    static_cast<double>(tally.sampled[v]);
    os << names[v] << '\t' << tally.sampled[v] << '\t' << tally.retained[v] << '\t'
       << fmt_num(rate) << '\t' << fmt_num(t.rank[i]) << '\n';
  }
}

// columns: var_a  var_b  I   (top_k rows, already sorted descending)
inline void write_pairs_tsv(std::ostream& os, const PairScan& scan, size_t top_k,
                            std::span<const std::string> names,
                            std::span<const std::string> comments) {
  write_comments(os, comments);
  os << "var_a\tvar_b\tI\n";
  const size_t k = std::min(top_k, scan.pairs.size());
  for (size_t p = 0; p < k; ++p) {
    const auto& pair = scan.pairs[p];
    os << names[pair.a] << '\t' << names[pair.b] << '\t' << fmt_num(pair.i2) << '\n';
  }
}

// columns: threshold  m1  p0_median  fdr  fdr_capped
inline void write_fdr_tsv(std::ostream& os, const FdrCurve& curve,
                          std::span<const std::string> comments) {
  write_comments(os, comments);
  os << "threshold\tm1\tp0_median\tfdr\tfdr_capped\n";
  for (const auto& p : curve.points) {
    os << fmt_num(p.threshold) << '\t' << p.m1 << '\t' << fmt_num(p.p0_median) << '\t'
       << fmt_num(p.fdr) << '\t' << fmt_num(p.fdr_capped) << '\n';
  }
}

// columns: retained_count  qualified_fraction
inline void write_coverage_tsv(std::ostream& os, std::span<const CoveragePoint> curve,
                               std::span<const std::string> comments) {
  write_comments(os, comments);
  os << "retained_count\tqualified_fraction\n";
  for (const auto& p : curve) {
    os << p.retained_count << '\t' << fmt_num(p.qualified_fraction) << '\n';
  }
}

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::all_d_positive:
      return "all_d_positive";
    case StopReason::single_variable_left:
      return "single_variable_left";
    case StopReason::threshold_rule:
      return "threshold_rule";
  }
  return "unknown";
}

inline nlohmann::json to_json(const DropScore& s, std::span<const std::string> names) {
  return {{"variable", names[s.variable]},
          {"d", s.d_value},
          {"i_coarse", s.i_coarse},
          {"i_fine", s.i_fine}};
}

inline nlohmann::json to_json(const EliminationTrace& t, std::span<const std::string> names) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : t.steps) {
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : step.drop_scores) scores.push_back(to_json(s, names));
    steps.push_back({{"i_before", step.i_before},
                     {"drop_scores", scores},
                     {"dropped", names[step.dropped]}});
  }
  nlohmann::json retained = nlohmann::json::array();
  for (const uint32_t v : t.retained) retained.push_back(names[v]);
  nlohmann::json final_scores = nlohmann::json::array();
  for (const auto& s : t.final_scores) final_scores.push_back(to_json(s, names));
  return {{"steps", steps},
          {"retained", retained},
          {"stopping_i", t.stopping_i},
          {"stop_reason", stop_reason_name(t.stop_reason)},
          {"final_scores", final_scores}};
}

inline nlohmann::json to_json(const Selection& sel, std::span<const std::string> names) {
  nlohmann::json vars = nlohmann::json::array();
  for (size_t i = 0; i < sel.vars.size(); ++i) {
    vars.push_back({{"variable", names[sel.vars[i]]},
                    {"qualifying_subsets", sel.qualifying_counts[i]}});
  }
  return {{"threshold", sel.threshold},
          {"qualifying_subsets", sel.qualifying_subsets},
          {"n_selected", sel.vars.size()},
          {"selected", vars}};
}

inline nlohmann::json ranking_to_json(const RankingTable& t, std::span<const std::string> names) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < t.vars.size(); ++i) {
    rows.push_back({{"variable", names[t.vars[i]]}, {"score", t.score[i]}, {"rank", t.rank[i]}});
  }
  return {{"method", t.method}, {"rows", rows}};
}

// A ranking read back from a TSV report: variables are names here, scores
// and ranks as printed.
struct NamedRanking {
  std::vector<std::string> names;
  std::vector<double> score;
  std::vector<double> rank;
};

inline NamedRanking read_ranking_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open ranking file: " + path.string());
  NamedRanking out;
  std::string line;
  bool header_seen = false;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string var, score, rank;
    if (!(row >> var >> score >> rank)) {
      throw data_error("ranking file " + path.string() + ": malformed line " + std::to_string(line_no));
    }
    if (!header_seen && var == "variable") {
      header_seen = true;
      continue;
    }
    double s = 0, r = 0;
    if (!detail::parse_double(score, s) || !detail::parse_double(rank, r)) {
      if (score == "inf") {
        s = std::numeric_limits<double>::infinity();
        detail::parse_double(rank, r);
      } else {
        throw data_error("ranking file " + path.string() + ": non-numeric line " + std::to_string(line_no));
      }
    }
    out.names.push_back(var);
    out.score.push_back(s);
    out.rank.push_back(r);
  }
  if (out.names.empty()) throw data_error("ranking file has no rows: " + path.string());
  return out;
}

// One variable name per line; blank lines and # comments ignored.
inline std::vector<std::string> read_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto trimmed = std::string(detail::trim(line));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    out.push_back(trimmed);
  }
  return out;
}

}  // namespace partret
