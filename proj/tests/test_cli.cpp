#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef PARTRET_CLI_PATH
#define PARTRET_CLI_PATH "./partret"
#endif

namespace fs = std::filesystem;

namespace {

const std::string kCli = PARTRET_CLI_PATH;

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "partret_cli_out.txt";
  const fs::path err = fs::temp_directory_path() / "partret_cli_err.txt";
  const std::string cmd = kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("simulate writes a loadable CSV") {
  const auto csv = tmp("cli_sim.csv");
  const auto r = run("simulate --example 1 --n 60 --seed 5 --out " + csv.string());
  REQUIRE(r.code == 0);
  const std::string content = slurp(csv);
  REQUIRE(content.rfind("Y,X1,X2,X3,X4,X5,X6", 0) == 0);

  // seed is mandatory
  const auto no_seed = run("simulate --example 1 --n 60");
  REQUIRE(no_seed.code == 4);
}

TEST_CASE("marginal ranks a CSV dataset") {
  const auto csv = tmp("cli_marg.csv");
  REQUIRE(run("simulate --example 1 --n 120 --seed 9 --out " + csv.string()).code == 0);
  const auto r = run("marginal --in " + csv.string() + " --method i1");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("# partret marginal") != std::string::npos);
  REQUIRE(r.out.find("variable\tscore\trank") != std::string::npos);

  const auto json = run("marginal --in " + csv.string() + " --method i1 --format json");
  REQUIRE(json.code == 0);
  REQUIRE(json.out.find("\"method\": \"i1\"") != std::string::npos);
}

TEST_CASE("discretization cutoffs apply while loading") {
  const auto csv = tmp("cli_disc.csv");
  {
    std::ofstream out(csv);
    out << "Y,X1,X2\n1.5,0.1,0\n2.5,0.6,1\n0.5,0.9,0\n3.5,0.4,1\n";
  }
  const auto r = run("marginal --in " + csv.string() + " --method i1 --discretize X1:0.5");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("X1") != std::string::npos);
  // without the spec the real-valued column is rejected
  REQUIRE(run("marginal --in " + csv.string() + " --method i1").code == 3);
  // malformed spec is a config error
  REQUIRE(run("marginal --in " + csv.string() + " --method i1 --discretize nonsense").code == 4);
}

TEST_CASE("a config file mirrors flags and flags win") {
  const auto csv = tmp("cli_cfg.csv");
  REQUIRE(run("simulate --example 1 --n 80 --seed 3 --out " + csv.string()).code == 0);
  const auto cfg = tmp("cli_cfg.ini");
  {
    std::ofstream out(cfg);
    out << "[marginal]\nin=" << csv.string() << "\nmethod=i1\n";
  }
  const auto from_file = run("--config " + cfg.string() + " marginal");
  REQUIRE(from_file.code == 0);
  REQUIRE(from_file.out.find("variable\tscore\trank") != std::string::npos);
  // the command line overrides the file
  const auto overridden = run("--config " + cfg.string() + " marginal --method t");
  REQUIRE(overridden.code == 0);
  REQUIRE(overridden.out.find("--method t") != std::string::npos);
}

TEST_CASE("exit codes distinguish usage, data and config errors") {
  REQUIRE(run("marginal --no-such-flag").code == 2);
  REQUIRE(run("marginal --in /does/not/exist.csv").code == 3);

  const auto csv = tmp("cli_codes.csv");
  REQUIRE(run("simulate --example 1 --n 40 --seed 2 --out " + csv.string()).code == 0);
  // m larger than the variable count is an infeasible config
  REQUIRE(run("screen --in " + csv.string() + " --m 25 --ns 10 --seed 1").code == 4);

  const auto jr = run("screen --in " + csv.string() + " --m 25 --ns 10 --seed 1 --json-errors");
  REQUIRE(jr.code == 4);
  REQUIRE(jr.err.find("\"code\":4") != std::string::npos);
  REQUIRE(jr.err.find("\"kind\":\"config\"") != std::string::npos);
}

TEST_CASE("screen emits a tally and optional traces") {
  const auto csv = tmp("cli_screen.csv");
  REQUIRE(run("simulate --example 1 --n 150 --seed 4 --out " + csv.string()).code == 0);
  const auto traces = tmp("cli_traces.json");
  const auto out = tmp("cli_screen.tsv");
  const auto r = run("screen --in " + csv.string() + " --m 4 --ns 200 --seed 12 --out " +
                     out.string() + " --trace 3 --trace-out " + traces.string());
  REQUIRE(r.code == 0);
  const std::string tally = slurp(out);
  REQUIRE(tally.find("variable\tsampled\tretained\trate\trank") != std::string::npos);
  const std::string trace = slurp(traces);
  REQUIRE(trace.find("\"stopping_i\"") != std::string::npos);
  REQUIRE(trace.find("\"drop_scores\"") != std::string::npos);
}

TEST_CASE("worker count never changes the primary report") {
  const auto csv = tmp("cli_det.csv");
  REQUIRE(run("simulate --example 1 --n 200 --seed 8 --out " + csv.string()).code == 0);
  const auto out1 = tmp("cli_det_w1.tsv");
  const auto out2 = tmp("cli_det_w3.tsv");
  const std::string base = "screen --in " + csv.string() + " --m 5 --ns 300 --seed 21 --out ";
  REQUIRE(run(base + out1.string() + " --workers 1").code == 0);
  REQUIRE(run(base + out2.string() + " --workers 3").code == 0);
  REQUIRE(slurp(out1) == slurp(out2));
}

TEST_CASE("pairs emits the dump and both rankings") {
  const auto r = run("pairs --example 1 --n 100 --gen-seed 3 --top 5");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("section pairs") != std::string::npos);
  REQUIRE(r.out.find("var_a\tvar_b\tI") != std::string::npos);
  REQUIRE(r.out.find("section ranking_i2") != std::string::npos);
  REQUIRE(r.out.find("section ranking_i2f") != std::string::npos);
}

TEST_CASE("fdr emits a curve and a selection JSON") {
  const auto curve = tmp("cli_fdr.tsv");
  const auto sel = tmp("cli_fdr.json");
  const auto r = run("fdr --example 1 --n 150 --gen-seed 6 --m 3 --ns 150 --seed 33"
                     " --permutations 3 --alpha 0.3 --out " +
                     curve.string() + " --json-out " + sel.string());
  REQUIRE(r.code == 0);
  REQUIRE(slurp(curve).find("threshold\tm1\tp0_median\tfdr\tfdr_capped") != std::string::npos);
  const std::string selection = slurp(sel);
  REQUIRE(selection.find("\"threshold\"") != std::string::npos);
  REQUIRE(selection.find("\"selected\"") != std::string::npos);
}

TEST_CASE("resuscitate and report run end to end") {
  const auto csv = tmp("cli_resus.csv");
  REQUIRE(run("simulate --example 1 --n 150 --seed 14 --out " + csv.string()).code == 0);
  const auto out = tmp("cli_resus.tsv");
  const auto r = run("resuscitate --in " + csv.string() +
                     " --m 3 --seed 5 --method i1 --stages 3:1:200,4:1:200 --out " + out.string());
  REQUIRE(r.code == 0);
  const std::string text = slurp(out);
  REQUIRE(text.find("section summary") != std::string::npos);
  REQUIRE(text.find("rank_ud1") != std::string::npos);
  REQUIRE(text.find("rank_ud2") != std::string::npos);
  REQUIRE(text.find("section ud2") != std::string::npos);

  // build a ranking file with marginal, then a coverage report against it
  const auto ranking = tmp("cli_rank.tsv");
  REQUIRE(run("marginal --in " + csv.string() + " --method i1 --out " + ranking.string()).code == 0);

  // the ranking file can seed resuscitation directly
  const auto from_file = run("resuscitate --in " + csv.string() + " --seed 5 --m 3 --ranking " +
                             ranking.string() + " --stages 3:1:150");
  REQUIRE(from_file.code == 0);
  REQUIRE(from_file.out.find("rank_ud1") != std::string::npos);
  const auto qualified = tmp("cli_qualified.txt");
  {
    std::ofstream q(qualified);
    q << "X1\nX2\n";
  }
  const auto cov = run("report --ranking " + ranking.string() + " --qualified " + qualified.string());
  REQUIRE(cov.code == 0);
  REQUIRE(cov.out.find("retained_count\tqualified_fraction") != std::string::npos);

  const auto empty_q = tmp("cli_qualified_empty.txt");
  std::ofstream(empty_q) << "";
  REQUIRE(run("report --ranking " + ranking.string() + " --qualified " + empty_q.string()).code == 3);
}
