#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "partret/elimination.hpp"
#include "partret/simgen.hpp"

#include "oracles.hpp"
#include "stats_util.hpp"

using namespace partret;

TEST_CASE("stopping rules fire on strict exceedance") {
  const StoppingRule all_pos = StoppingRule::all_d_positive();
  const std::vector<double> retained_scores{0.68, 0.57};
  REQUIRE(all_pos.fires(retained_scores, 0));

  const std::vector<double> with_zero{0.68, 0.0};
  REQUIRE_FALSE(all_pos.fires(with_zero, 0));

  const StoppingRule exceeds = StoppingRule::d_exceeds(0.1);
  const std::vector<double> mixed{0.05, 0.2};
  REQUIRE_FALSE(exceeds.fires(mixed, 0));
  const std::vector<double> above{0.15, 0.2};
  REQUIRE(exceeds.fires(above, 0));

  const StoppingRule schedule = StoppingRule::d_exceeds_schedule({0.0, 0.0, 0.0});
  SplitMix64 g(12);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> scores(1 + g.below(6));
    for (auto& s : scores) s = g.normal();
    const size_t step = g.below(6);
    REQUIRE(schedule.fires(scores, step) == all_pos.fires(scores, step));
  }
  REQUIRE_THROWS_AS(StoppingRule::d_exceeds_schedule({}), config_error);

  const StoppingRule ramp = StoppingRule::d_exceeds_schedule({0.0, 1.0});
  REQUIRE(ramp.threshold_at_step(0) == 0.0);
  REQUIRE(ramp.threshold_at_step(1) == 1.0);
  REQUIRE(ramp.threshold_at_step(5) == 1.0);  // clamped to the last entry
}

TEST_CASE("single-variable subsets are retained immediately") {
  const Dataset d = make_dataset({{1, 1, 1, 1}}, {1, 2, 3, 4});
  const std::vector<uint32_t> solo{0};
  const auto trace = eliminate(d, solo);
  REQUIRE(trace.retained == solo);
  REQUIRE(trace.stop_reason == StopReason::single_variable_left);
  REQUIRE(trace.stopping_i == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(trace.steps.empty());

  REQUIRE_THROWS_AS(eliminate(d, std::vector<uint32_t>{}), config_error);
}

TEST_CASE("all-zero drop scores keep eliminating down to one variable") {
  // constant response: every D is exactly 0, the positive-D rule never fires
  const Dataset d = make_dataset({{0, 1, 0, 1}, {0, 0, 1, 1}, {1, 0, 1, 0}}, {3, 3, 3, 3});
  const std::vector<uint32_t> subset{0, 1, 2};
  const auto trace = eliminate(d, subset);
  REQUIRE(trace.stop_reason == StopReason::single_variable_left);
  REQUIRE(trace.retained.size() == 1);
  // ties resolve to the lowest index: 0 drops first, then 1
  REQUIRE(trace.steps.size() == 2);
  REQUIRE(trace.steps[0].dropped == 0);
  REQUIRE(trace.steps[1].dropped == 1);
  REQUIRE(trace.retained[0] == 2);
}

TEST_CASE("trace bookkeeping invariants on generated data") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const Dataset d = normalize_response(gen_example1(150, seed));
    const std::vector<uint32_t> subset{0, 1, 2, 3, 4, 5};
    const auto trace = eliminate(d, subset);

    for (size_t t = 0; t < trace.steps.size(); ++t) {
      const auto& step = trace.steps[t];
      // the recorded drop is the argmin D (ties to lowest id)
      double min_d = step.drop_scores[0].d_value;
      uint32_t min_var = step.drop_scores[0].variable;
      for (const auto& s : step.drop_scores) {
        if (s.d_value < min_d) {
          min_d = s.d_value;
          min_var = s.variable;
        }
      }
      REQUIRE(step.dropped == min_var);
      // i_before - 2 * min D = next i_before
      const double next_i = t + 1 < trace.steps.size()
                                ? trace.steps[t + 1].i_before
                                : (trace.stop_reason == StopReason::single_variable_left
                                       ? trace.stopping_i
                                       : trace.final_scores[0].i_fine);
      REQUIRE(step.i_before - 2.0 * min_d == Catch::Approx(next_i).margin(1e-9));
      // every score shares the same fine I, equal to i_before
      for (const auto& s : step.drop_scores) {
        REQUIRE(s.i_fine == Catch::Approx(step.i_before).margin(1e-12));
        REQUIRE(s.d_value == Catch::Approx(0.5 * (s.i_fine - s.i_coarse)).margin(1e-12));
      }
    }
    // replay: I over the retained set equals stopping_i
    const auto p = build_partition(d, trace.retained);
    REQUIRE(influence_i(p) == Catch::Approx(trace.stopping_i).margin(1e-9));
  }
}

TEST_CASE("the engine matches a from-scratch replay of the procedure") {
  // independent replay: recompute every step with fresh partitions built by
  // the enumeration oracle and mirror the decision rule
  SplitMix64 g(314);
  for (int rep = 0; rep < 25; ++rep) {
    const size_t n = 20 + g.below(150);
    const uint32_t s_vars = 6;
    CodeMatrix cols(s_vars, std::vector<uint8_t>(n));
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
      for (auto& c : cols) c[i] = g.bernoulli(0.5) ? 1 : 0;
      y[i] = g.normal() + 1.5 * (cols[0][i] & cols[1][i]);
    }
    const Dataset d = normalize_response(make_dataset(cols, y));
    std::vector<uint32_t> subset{0, 1, 2, 3, 4, 5};
    const auto trace = eliminate(d, subset);

    std::vector<uint32_t> remaining = subset;
    std::vector<uint32_t> expected_drops;
    std::vector<uint32_t> expected_retained;
    while (true) {
      if (remaining.size() == 1) {
        expected_retained = remaining;
        break;
      }
      const double i_fine = oracle::influence_i(d, remaining);
      size_t victim_pos = 0;
      double min_d = 0;
      bool all_positive = true;
      for (size_t p = 0; p < remaining.size(); ++p) {
        std::vector<uint32_t> coarse;
        for (const uint32_t v : remaining) {
          if (v != remaining[p]) coarse.push_back(v);
        }
        const double dv = 0.5 * (i_fine - oracle::influence_i(d, coarse));
        if (!(dv > 0)) all_positive = false;
        if (p == 0 || dv < min_d) {
          min_d = dv;
          victim_pos = p;
        }
      }
      if (all_positive) {
        expected_retained = remaining;
        break;
      }
      expected_drops.push_back(remaining[victim_pos]);
      remaining.erase(remaining.begin() + static_cast<ptrdiff_t>(victim_pos));
    }
    REQUIRE(trace.retained == expected_retained);
    REQUIRE(trace.steps.size() == expected_drops.size());
    for (size_t t = 0; t < expected_drops.size(); ++t) {
      REQUIRE(trace.steps[t].dropped == expected_drops[t]);
    }
  }
}

TEST_CASE("subset order does not change the outcome") {
  const Dataset d = normalize_response(gen_example1(120, 99));
  const std::vector<uint32_t> fwd{0, 1, 2, 3, 4, 5};
  const std::vector<uint32_t> rev{5, 4, 3, 2, 1, 0};
  const auto a = eliminate(d, fwd);
  const auto b = eliminate(d, rev);
  REQUIRE(a.retained == b.retained);
  REQUIRE(a.stopping_i == Catch::Approx(b.stopping_i).margin(1e-12));
}

TEST_CASE("the generated two-variable signal is retained in most runs") {
  size_t hits = 0;
  const size_t runs = 100;
  for (uint64_t seed = 0; seed < runs; ++seed) {
    const Dataset d = normalize_response(gen_example1(200, 1000 + seed));
    const std::vector<uint32_t> subset{0, 1, 2, 3, 4, 5};
    const auto trace = eliminate(d, subset);
    if (trace.retained == std::vector<uint32_t>{0, 1}) ++hits;
  }
  REQUIRE(hits >= 90);
}

TEST_CASE("initial I grows with the number of influential variables present") {
  const size_t runs = 200;
  std::vector<double> both(runs), one(runs), none(runs);
  for (uint64_t seed = 0; seed < runs; ++seed) {
    const Dataset d = normalize_response(gen_example1(200, 5000 + seed));
    both[seed] = influence_i(build_partition(d, std::vector<uint32_t>{0, 1, 2, 3, 4, 5}));
    one[seed] = influence_i(build_partition(d, std::vector<uint32_t>{1, 2, 3, 4, 5}));
    none[seed] = influence_i(build_partition(d, std::vector<uint32_t>{2, 3, 4, 5}));
  }
  REQUIRE(stats::mean(both) > stats::mean(one));
  REQUIRE(stats::mean(one) > stats::mean(none));
}
