// partret: partition-retention screening of influential discrete variables.
//
// Subcommands: simulate | marginal | pairs | screen | resuscitate | fdr | report
// Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasible config.

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partret/partret.hpp"

namespace {

using namespace partret;

struct CommonOpts {
  std::string in;
  std::string response = "Y";
  std::string y_model = "random";
  std::string discretize_spec;
  bool raw_response = false;

  int example = 0;
  uint64_t n = 0;
  double mu0 = 4.0;
  double q0 = 0.25;
  double q1 = 0.25;
  std::vector<double> probs{0.5, 0.5, 0.5};
  uint32_t noise_vars = 0;
  uint64_t gen_seed = 0;

  std::string out;
  std::string format = "tsv";
  unsigned workers = 0;
  bool json_errors = false;
};

// Adds the shared dataset/source/output flags to an analysis subcommand.
void add_common(CLI::App* cmd, CommonOpts& o, bool needs_dataset) {
  if (needs_dataset) {
    auto* in = cmd->add_option("--in", o.in, "input CSV (header row, comma separated)");
    auto* ex = cmd->add_option("--example", o.example, "generate an artificial dataset (1..5) instead of --in")
                   ->check(CLI::Range(1, 5));
    in->excludes(ex);
    ex->excludes(in);
    cmd->add_option("--response", o.response, "response column name for --in")->capture_default_str();
    cmd->add_option("--y-model", o.y_model, "response sampling model tag: random | specified")
        ->check(CLI::IsMember({"random", "specified"}))
        ->capture_default_str();
    cmd->add_flag("--raw-response", o.raw_response,
                  "skip response normalization (default normalizes to mean 0, second moment 1)");
    cmd->add_option("--discretize", o.discretize_spec,
                    "cutoffs for real-valued columns, e.g. \"X1:0.5,1.5;X3:0\" "
                    "(a value below a cutoff falls in the lower bin)");
    cmd->add_option("--n", o.n, "rows to generate with --example (0 = example default)");
    cmd->add_option("--mu0", o.mu0, "signal strength for example 5")->capture_default_str();
    cmd->add_option("--q0", o.q0, "off-diagonal cell probability for example 3")->capture_default_str();
    cmd->add_option("--q1", o.q1, "diagonal cell probability for example 3")->capture_default_str();
    cmd->add_option("--probs", o.probs, "success probabilities for example 2 (three values)")
        ->expected(3);
    cmd->add_option("--noise", o.noise_vars, "noise columns appended by example 3");
    cmd->add_option("--gen-seed", o.gen_seed, "seed for --example generation (required with --example)");
  }
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "primary report format: tsv | json")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();
  cmd->add_option("--workers", o.workers,
                  "worker threads (0 = all cores); never changes the results");
  cmd->add_flag("--json-errors", o.json_errors, "emit errors as JSON on stderr");
}

DiscretizationSpec parse_discretize_spec(const std::string& text) {
  DiscretizationSpec spec;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) {
    const size_t colon = part.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw config_error("malformed --discretize entry '" + part + "' (want NAME:c1,c2,...)");
    }
    std::vector<double> cuts;
    std::istringstream cs(part.substr(colon + 1));
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      double v = 0;
      if (!detail::parse_double(cell, v)) {
        throw config_error("non-numeric cutoff '" + cell + "' in --discretize");
      }
      cuts.push_back(v);
    }
    spec.columns.push_back({part.substr(0, colon), std::move(cuts)});
  }
  if (spec.columns.empty()) throw config_error("--discretize is empty");
  return spec;
}

Dataset resolve_dataset(const CLI::App* cmd, const CommonOpts& o, Warnings* warnings) {
  Dataset d;
  if (o.example != 0) {
    if (cmd->count("--gen-seed") == 0) {
      throw config_error("--example needs --gen-seed (stochastic steps must be seeded)");
    }
    ExampleSpec spec;
    spec.example = o.example;
    spec.n = o.n;
    spec.mu0 = o.mu0;
    spec.q0 = o.q0;
    spec.q1 = o.q1;
    spec.probs = {o.probs[0], o.probs[1], o.probs[2]};
    spec.noise_vars = o.noise_vars;
    spec.seed = o.gen_seed;
    d = gen_example(spec);
  } else if (!o.in.empty()) {
    const YModel model = o.y_model == "specified" ? YModel::specified_y : YModel::random_y;
    DiscretizationSpec spec;
    if (!o.discretize_spec.empty()) spec = parse_discretize_spec(o.discretize_spec);
    d = load_csv(o.in, o.response, o.discretize_spec.empty() ? nullptr : &spec, model, warnings);
  } else {
    throw config_error("exactly one dataset source is required: --in or --example");
  }
  if (!o.raw_response) d = normalize_response(d);
  return d;
}

// Every report opens with the full effective configuration. The worker count
// is deliberately not part of it: results never depend on it.
std::vector<std::string> config_header(const std::string& sub, const CLI::App* cmd,
                                       const CommonOpts& o,
                                       const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream line;
  line << "partret " << sub;
  if (o.example != 0) {
    line << " --example " << o.example << " --n " << o.n << " --gen-seed " << o.gen_seed;
    if (o.example == 5) line << " --mu0 " << fmt_num(o.mu0);
    if (o.example == 3) {
      line << " --q0 " << fmt_num(o.q0) << " --q1 " << fmt_num(o.q1) << " --noise " << o.noise_vars;
    }
    if (o.example == 2) {
      line << " --probs " << fmt_num(o.probs[0]) << " " << fmt_num(o.probs[1]) << " "
           << fmt_num(o.probs[2]);
    }
  } else if (cmd != nullptr && cmd->count("--in") > 0) {
    line << " --in " << o.in << " --response " << o.response << " --y-model " << o.y_model;
  }
  if (o.raw_response) line << " --raw-response";
  for (const auto& [k, v] : extra) line << " --" << k << " " << v;
  return {line.str()};
}

std::unique_ptr<std::ostream> open_out(const std::string& path, std::ostream*& os) {
  if (path.empty()) {
    os = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw data_error("cannot write file: " + path);
  os = file.get();
  return file;
}

void print_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void emit_ranking(const CommonOpts& o, const RankingTable& ranking,
                  std::span<const std::string> names, std::vector<std::string> comments) {
  std::ostream* os = nullptr;
  const auto holder = open_out(o.out, os);
  if (o.format == "json") {
    nlohmann::json doc = ranking_to_json(ranking, names);
    doc["config"] = comments.empty() ? "" : comments[0];
    *os << doc.dump(2) << '\n';
  } else {
    write_ranking_tsv(*os, ranking, names, comments);
  }
}

uint64_t require_seed(const CLI::App* cmd, uint64_t seed) {
  if (cmd->count("--seed") == 0) {
    throw config_error("--seed is required (stochastic steps must be seeded)");
  }
  return seed;
}

int run_simulate(const CLI::App* cmd, CommonOpts& o, uint64_t seed) {
  ExampleSpec spec;
  spec.example = o.example;
  spec.n = o.n;
  spec.mu0 = o.mu0;
  spec.q0 = o.q0;
  spec.q1 = o.q1;
  spec.probs = {o.probs[0], o.probs[1], o.probs[2]};
  spec.noise_vars = o.noise_vars;
  spec.seed = require_seed(cmd, seed);
  const Dataset d = gen_example(spec);
  if (o.out.empty()) {
    write_csv(d, std::cout);
  } else {
    write_csv(d, std::filesystem::path(o.out));
  }
  return 0;
}

int run_marginal(const CLI::App* cmd, CommonOpts& o, const std::string& method) {
  Warnings warnings;
  const Dataset d = resolve_dataset(cmd, o, &warnings);
  const RankingTable ranking = marginal_ranking(d, method, &warnings);
  print_warnings(warnings);
  emit_ranking(o, ranking, d.names, config_header("marginal", cmd, o, {{"method", method}}));
  return 0;
}

int run_pairs(const CLI::App* cmd, CommonOpts& o, size_t top_k, uint64_t n_r_flag) {
  Warnings warnings;
  const Dataset d = resolve_dataset(cmd, o, &warnings);
  print_warnings(warnings);
  const PairScan scan = pair_scan(d, {}, o.workers);
  const std::vector<double> i1s = i1_scores(d);
  const size_t n_r = n_r_flag > 0
                         ? n_r_flag
                         : std::max<size_t>(1, static_cast<size_t>(0.01 * static_cast<double>(scan.pairs.size()) + 0.5));
  const RankingTable first_appearance = rank_i2_first_appearance(scan, i1s);
  const RankingTable frequency = rank_i2f(scan, n_r);

  const auto comments = config_header("pairs", cmd, o,
                                      {{"top", std::to_string(top_k)}, {"nr", std::to_string(n_r)}});
  std::ostream* os = nullptr;
  const auto holder = open_out(o.out, os);
  if (o.format == "json") {
    nlohmann::json pairs = nlohmann::json::array();
    const size_t k = std::min(top_k, scan.pairs.size());
    for (size_t p = 0; p < k; ++p) {
      pairs.push_back({{"var_a", d.names[scan.pairs[p].a]},
                       {"var_b", d.names[scan.pairs[p].b]},
                       {"I", scan.pairs[p].i2}});
    }
    nlohmann::json doc{{"config", comments[0]},
                       {"pairs", pairs},
                       {"ranking_i2", ranking_to_json(first_appearance, d.names)},
                       {"ranking_i2f", ranking_to_json(frequency, d.names)}};
    *os << doc.dump(2) << '\n';
  } else {
    std::vector<std::string> section = comments;
    section.push_back("section pairs");
    write_pairs_tsv(*os, scan, top_k, d.names, section);
    *os << '\n';
    write_ranking_tsv(*os, first_appearance, d.names, std::vector<std::string>{"section ranking_i2"});
    *os << '\n';
    write_ranking_tsv(*os, frequency, d.names,
                      std::vector<std::string>{"section ranking_i2f nr=" + std::to_string(n_r)});
  }
  return 0;
}

ScreeningConfig make_screen_config(const CLI::App* cmd, uint32_t m, uint64_t n_s, uint64_t seed) {
  ScreeningConfig cfg;
  cfg.m = m;
  cfg.n_s = n_s;
  cfg.seed = require_seed(cmd, seed);
  cfg.rule = StoppingRule::all_d_positive();
  return cfg;
}

int run_screen(const CLI::App* cmd, CommonOpts& o, uint32_t m, uint64_t n_s, uint64_t seed,
               const std::string& rank_by, size_t trace_k, const std::string& trace_out) {
  Warnings warnings;
  const Dataset d = resolve_dataset(cmd, o, &warnings);
  print_warnings(warnings);
  const ScreeningConfig cfg = make_screen_config(cmd, m, n_s, seed);
  const RetentionTally tally = screen(d, cfg, o.workers);
  const RetentionRankMode mode =
      rank_by == "rate" ? RetentionRankMode::rate : RetentionRankMode::raw_count;
  const RankingTable ranking = rank_by_retention(tally, mode);

  const auto comments = config_header(
      "screen", cmd, o,
      {{"m", std::to_string(m)}, {"ns", std::to_string(n_s)}, {"seed", std::to_string(cfg.seed)},
       {"rank-by", rank_by}});
  std::ostream* os = nullptr;
  const auto holder = open_out(o.out, os);
  if (o.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (uint32_t v = 0; v < d.n_vars(); ++v) {
      rows.push_back({{"variable", d.names[v]},
                      {"sampled", tally.sampled[v]},
                      {"retained", tally.retained[v]},
                      {"rank", ranking.rank[v]}});
    }
    nlohmann::json doc{{"config", comments[0]}, {"rows", rows}};
    *os << doc.dump(2) << '\n';
  } else {
    write_tally_tsv(*os, tally, ranking, d.names, comments);
  }

  if (trace_k > 0) {
    nlohmann::json traces = nlohmann::json::array();
    const size_t k = std::min(trace_k, tally.outcomes.size());
    for (size_t i = 0; i < k; ++i) {
      const EliminationTrace trace = eliminate(d, tally.outcomes[i].vars, cfg.rule);
      traces.push_back(to_json(trace, d.names));
    }
    std::ofstream tf(trace_out);
    if (!tf) throw data_error("cannot write file: " + trace_out);
    tf << traces.dump(2) << '\n';
  }
  return 0;
}

std::vector<ResuscitationStage> parse_stage_plan(const std::string& text) {
  std::vector<ResuscitationStage> plan;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    unsigned long long l = 0, k = 0, ns = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ps(part);
    if (!(ps >> l >> c1 >> k >> c2 >> ns) || c1 != ':' || c2 != ':' || !(ps >> std::ws).eof()) {
      throw config_error("malformed stage plan entry '" + part + "' (want L:k_in:n_s)");
    }
    plan.push_back({static_cast<uint32_t>(l), static_cast<uint32_t>(k), ns});
  }
  if (plan.empty()) throw config_error("stage plan is empty");
  return plan;
}

int run_resuscitate(const CLI::App* cmd, CommonOpts& o, uint32_t m, uint64_t seed,
                    const std::string& method, const std::string& ranking_file,
                    const std::string& stages, uint64_t n_r_flag) {
  Warnings warnings;
  const Dataset d = resolve_dataset(cmd, o, &warnings);

  RankingTable initial;
  if (!ranking_file.empty()) {
    const NamedRanking named = read_ranking_tsv(ranking_file);
    std::vector<double> scores(d.n_vars(), 0.0);
    std::vector<bool> seen(d.n_vars(), false);
    for (size_t i = 0; i < named.names.size(); ++i) {
      bool matched = false;
      for (uint32_t v = 0; v < d.n_vars(); ++v) {
        if (d.names[v] == named.names[i]) {
          scores[v] = named.score[i];
          seen[v] = true;
          matched = true;
          break;
        }
      }
      if (!matched) throw data_error("ranking file names unknown variable '" + named.names[i] + "'");
    }
    for (uint32_t v = 0; v < d.n_vars(); ++v) {
      if (!seen[v]) throw data_error("ranking file does not cover variable '" + d.names[v] + "'");
    }
    std::vector<uint32_t> vars(d.n_vars());
    std::iota(vars.begin(), vars.end(), 0u);
    initial = make_ranking("file", std::move(vars), std::move(scores));
  } else if (method == "i2f") {
    const PairScan scan = pair_scan(d, {}, o.workers);
    const size_t n_r = n_r_flag > 0
                           ? n_r_flag
                           : std::max<size_t>(1, static_cast<size_t>(0.01 * static_cast<double>(scan.pairs.size()) + 0.5));
    initial = rank_i2f(scan, n_r);
  } else {
    initial = marginal_ranking(d, method, &warnings);
  }
  print_warnings(warnings);

  const std::vector<ResuscitationStage> plan = parse_stage_plan(stages);
  ScreeningConfig base;
  base.m = m;
  base.seed = require_seed(cmd, seed);
  base.rule = StoppingRule::all_d_positive();
  const std::vector<StageResult> results = resuscitate(d, initial, plan, base, o.workers);

  const auto comments = config_header(
      "resuscitate", cmd, o,
      {{"m", std::to_string(m)}, {"seed", std::to_string(base.seed)},
       {"method", ranking_file.empty() ? method : "file:" + ranking_file}, {"stages", stages}});

  std::ostream* os = nullptr;
  const auto holder = open_out(o.out, os);
  if (o.format == "json") {
    nlohmann::json doc{{"config", comments[0]}, {"initial", ranking_to_json(initial, d.names)}};
    nlohmann::json stage_docs = nlohmann::json::array();
    for (const auto& res : results) {
      nlohmann::json list = nlohmann::json::array();
      for (const uint32_t v : res.list) list.push_back(d.names[v]);
      stage_docs.push_back({{"stage", res.ranking.method},
                            {"list", list},
                            {"ranking", ranking_to_json(res.ranking, d.names)}});
    }
    doc["stages"] = stage_docs;
    *os << doc.dump(2) << '\n';
  } else {
    // side-by-side summary ordered by the final stage's ranks
    std::vector<std::string> section = comments;
    section.push_back("section summary");
    write_comments(*os, section);
    *os << "variable\trank_initial";
    for (const auto& res : results) *os << "\trank_" << res.ranking.method;
    *os << '\n';
    const RankingTable& last = results.back().ranking;
    const std::vector<uint32_t> order = order_by_rank(last);
    for (const uint32_t v : order) {
      *os << d.names[v] << '\t' << fmt_num(rank_of(initial, v));
      for (const auto& res : results) *os << '\t' << fmt_num(rank_of(res.ranking, v));
      *os << '\n';
    }
    for (const auto& res : results) {
      *os << '\n';
      std::ostringstream head;
      head << "section " << res.ranking.method << " list=";
      for (size_t i = 0; i < res.list.size(); ++i) {
        if (i > 0) head << ',';
        head << d.names[res.list[i]];
      }
      write_tally_tsv(*os, res.tally, res.ranking, d.names,
                      std::vector<std::string>{head.str()});
    }
  }
  return 0;
}

int run_fdr(const CLI::App* cmd, CommonOpts& o, uint32_t m, uint64_t n_s, uint64_t seed,
            uint64_t permutations, double alpha, const std::string& json_out) {
  Warnings warnings;
  const Dataset d = resolve_dataset(cmd, o, &warnings);
  print_warnings(warnings);
  const ScreeningConfig cfg = make_screen_config(cmd, m, n_s, seed);
  const PermutationStudy study = run_permutation_study(d, cfg, permutations, cfg.seed, o.workers);
  const FdrCurve curve = fdr_curve(study);

  const auto comments = config_header(
      "fdr", cmd, o,
      {{"m", std::to_string(m)}, {"ns", std::to_string(n_s)}, {"seed", std::to_string(cfg.seed)},
       {"permutations", std::to_string(permutations)}, {"alpha", fmt_num(alpha)}});
  {
    std::ostream* os = nullptr;
    const auto holder = open_out(o.out, os);
    if (o.format == "json") {
      nlohmann::json points = nlohmann::json::array();
      for (const auto& p : curve.points) {
        points.push_back({{"threshold", p.threshold},
                          {"m1", p.m1},
                          {"p0_median", p.p0_median},
                          {"fdr", p.fdr},
                          {"fdr_capped", p.fdr_capped}});
      }
      nlohmann::json doc{{"config", comments[0]}, {"curve", points}};
      *os << doc.dump(2) << '\n';
    } else {
      write_fdr_tsv(*os, curve, comments);
    }
  }

  const double threshold = threshold_at(curve, alpha);  // data_error when unreachable
  const Selection sel = select_above(study.observed_tally, threshold);
  nlohmann::json doc = to_json(sel, d.names);
  doc["alpha"] = alpha;
  doc["config"] = comments[0];
  if (json_out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream jf(json_out);
    if (!jf) throw data_error("cannot write file: " + json_out);
    jf << doc.dump(2) << '\n';
  }
  return 0;
}

int run_report(CommonOpts& o, const std::string& ranking_file, const std::string& qualified_file) {
  const NamedRanking named = read_ranking_tsv(ranking_file);
  const std::vector<std::string> qualified_names = read_name_list(qualified_file);
  if (qualified_names.empty()) throw data_error("qualified set is empty");

  std::vector<uint32_t> vars(named.names.size());
  std::iota(vars.begin(), vars.end(), 0u);
  RankingTable ranking;
  ranking.method = "file";
  ranking.vars = vars;
  ranking.score = named.score;
  ranking.rank = named.rank;

  std::vector<uint32_t> qualified;
  for (const auto& q : qualified_names) {
    bool found = false;
    for (size_t i = 0; i < named.names.size(); ++i) {
      if (named.names[i] == q) {
        qualified.push_back(static_cast<uint32_t>(i));
        found = true;
        break;
      }
    }
    if (!found) throw data_error("qualified variable '" + q + "' is not in the ranking");
  }
  const auto curve = rank_coverage_curve(ranking, qualified);

  std::vector<std::string> comments{"partret report --ranking " + ranking_file + " --qualified " +
                                    qualified_file};
  std::ostream* os = nullptr;
  const auto holder = open_out(o.out, os);
  if (o.format == "json") {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : curve) {
      points.push_back({{"retained_count", p.retained_count},
                        {"qualified_fraction", p.qualified_fraction}});
    }
    nlohmann::json doc{{"config", comments[0]}, {"curve", points}};
    *os << doc.dump(2) << '\n';
  } else {
    write_coverage_tsv(*os, curve, comments);
  }
  return 0;
}

int report_error(const CommonOpts& o, int code, const char* kind, const std::string& message) {
  if (o.json_errors) {
    nlohmann::json doc{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << doc.dump() << '\n';
  } else {
    std::cerr << "error: " << message << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "partret: partition-retention screening for influential discrete variables.\n"
      "Rankings are TSV columns (variable, score, rank); retention tallies are\n"
      "(variable, sampled, retained, rate, rank); pair dumps are (var_a, var_b, I);\n"
      "fdr curves are (threshold, m1, p0_median, fdr, fdr_capped); coverage curves\n"
      "are (retained_count, qualified_fraction). Reports open with '# partret ...'\n"
      "stating the effective configuration. Worker count never changes results.\n"
      "Discretization bins: a value below a cutoff falls in the lower bin."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file mirroring the flags; use a [subcommand] section and pass "
                 "--config before the subcommand (command-line flags win)");

  CommonOpts o;
  uint64_t seed = 0;
  uint32_t m = 7;
  uint64_t n_s = 20000;
  std::string method = "i1";
  std::string rank_by = "count";
  size_t top_k = 100;
  uint64_t n_r = 0;
  size_t trace_k = 0;
  std::string trace_out = "traces.json";
  std::string stages = "10:3:100000,15:3:100000";
  std::string ranking_file;
  std::string qualified_file;
  uint64_t permutations = 50;
  double alpha = 0.3;
  std::string json_out;

  auto* sim = app.add_subcommand("simulate", "generate an artificial dataset as CSV");
  sim->add_option("--example", o.example, "example id (1..5)")->required()->check(CLI::Range(1, 5));
  sim->add_option("--n", o.n, "rows (0 = example default)");
  sim->add_option("--mu0", o.mu0, "signal strength for example 5")->capture_default_str();
  sim->add_option("--q0", o.q0, "off-diagonal cell probability for example 3")->capture_default_str();
  sim->add_option("--q1", o.q1, "diagonal cell probability for example 3")->capture_default_str();
  sim->add_option("--probs", o.probs, "success probabilities for example 2")->expected(3);
  sim->add_option("--noise", o.noise_vars, "noise columns appended by example 3");
  sim->add_option("--seed", seed, "generation seed (required)");
  sim->add_option("--out", o.out, "output CSV (default: stdout)");
  sim->add_flag("--json-errors", o.json_errors, "emit errors as JSON on stderr");

  auto* marg = app.add_subcommand("marginal", "first-order ranking: |t|, I1 or chi-square");
  add_common(marg, o, true);
  marg->add_option("--method", method, "t | i1 | chisq")
      ->check(CLI::IsMember({"t", "i1", "chisq"}))
      ->capture_default_str();

  auto* pairs = app.add_subcommand("pairs", "exhaustive pair scan plus pair-derived rankings");
  add_common(pairs, o, true);
  pairs->add_option("--top", top_k, "pairs to dump")->capture_default_str();
  pairs->add_option("--nr", n_r, "top pairs counted by the frequency ranking (0 = 1% of pairs)");

  auto* scr = app.add_subcommand("screen", "random-subset partition retention screening");
  add_common(scr, o, true);
  scr->add_option("--m", m, "subset size")->capture_default_str();
  scr->add_option("--ns", n_s, "number of subsets")->capture_default_str();
  scr->add_option("--seed", seed, "screening seed (required)");
  scr->add_option("--rank-by", rank_by, "count | rate")
      ->check(CLI::IsMember({"count", "rate"}))
      ->capture_default_str();
  scr->add_option("--trace", trace_k, "dump elimination traces for the first K subsets");
  scr->add_option("--trace-out", trace_out, "trace JSON path")->capture_default_str();

  auto* res = app.add_subcommand("resuscitate", "stratified re-screening from a reduced list");
  add_common(res, o, true);
  res->add_option("--m", m, "subset size")->capture_default_str();
  res->add_option("--seed", seed, "screening seed (required)");
  res->add_option("--method", method, "initial ranking method: t | i1 | i2f")
      ->check(CLI::IsMember({"t", "i1", "i2f"}))
      ->capture_default_str();
  res->add_option("--ranking", ranking_file, "initial ranking TSV (overrides --method)");
  res->add_option("--stages", stages, "stage plan L:k_in:n_s[,L:k_in:n_s...]")
      ->capture_default_str();
  res->add_option("--nr", n_r, "top pairs counted when --method i2f (0 = 1% of pairs)");

  auto* fdr = app.add_subcommand("fdr", "permutation-null study and fdr thresholding");
  add_common(fdr, o, true);
  fdr->add_option("--m", m, "subset size")->capture_default_str();
  fdr->add_option("--ns", n_s, "number of subsets")->capture_default_str();
  fdr->add_option("--seed", seed, "study seed (required)");
  fdr->add_option("--permutations", permutations, "number of response permutations")
      ->capture_default_str();
  fdr->add_option("--alpha", alpha, "fdr level for the selection threshold")->capture_default_str();
  fdr->add_option("--json-out", json_out, "selection JSON path (default: stdout)");

  auto* rep = app.add_subcommand("report", "rank-coverage curve of a ranking vs a qualified set");
  rep->add_option("--ranking", ranking_file, "ranking TSV")->required();
  rep->add_option("--qualified", qualified_file, "qualified variable names, one per line")->required();
  rep->add_option("--out", o.out, "output file (default: stdout)");
  rep->add_option("--format", o.format, "tsv | json")->check(CLI::IsMember({"tsv", "json"}));
  rep->add_flag("--json-errors", o.json_errors, "emit errors as JSON on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (o.json_errors) {
      nlohmann::json doc{{"error", {{"code", 2}, {"kind", "usage"}, {"message", e.what()}}}};
      std::cerr << doc.dump() << '\n';
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sim, o, seed);
    if (marg->parsed()) return run_marginal(marg, o, method);
    if (pairs->parsed()) return run_pairs(pairs, o, top_k, n_r);
    if (scr->parsed()) {
      return run_screen(scr, o, m, n_s, seed, rank_by, trace_k, trace_out);
    }
    if (res->parsed()) {
      return run_resuscitate(res, o, m, seed, method, ranking_file, stages, n_r);
    }
    if (fdr->parsed()) {
      return run_fdr(fdr, o, m, n_s, seed, permutations, alpha, json_out);
    }
    if (rep->parsed()) return run_report(o, ranking_file, qualified_file);
  } catch (const config_error& e) {
    return report_error(o, 4, "config", e.what());
  } catch (const data_error& e) {
    return report_error(o, 3, "data", e.what());
  } catch (const std::exception& e) {
    return report_error(o, 3, "data", e.what());
  }
  return 0;
}
