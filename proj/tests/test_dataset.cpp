#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "partret/dataset.hpp"
#include "partret/partition.hpp"
#include "partret/rng.hpp"

using namespace partret;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("load_csv parses a small file") {
  const auto p = temp_file("partret_basic.csv");
  write_file(p, "Y,X1,X2\n1,0,0\n2,1,0\n3,1,1\n");
  Warnings warnings;
  const Dataset d = load_csv(p, "Y", nullptr, YModel::random_y, &warnings);
  REQUIRE(d.n_rows() == 3);
  REQUIRE(d.n_vars() == 2);
  REQUIRE(d.arity == std::vector<uint32_t>{2, 2});
  REQUIRE(d.y == std::vector<double>{1, 2, 3});
  REQUIRE(d.col(0) == std::vector<uint8_t>{0, 1, 1});
  REQUIRE(d.names == std::vector<std::string>{"X1", "X2"});
  REQUIRE(warnings.empty());
}

TEST_CASE("load_csv infers arity from the largest observed code") {
  const auto p = temp_file("partret_arity.csv");
  write_file(p, "Y,X1\n0.5,0\n1.5,1\n2.5,2\n");
  const Dataset d = load_csv(p, "Y");
  REQUIRE(d.arity[0] == 3);
}

TEST_CASE("load_csv error reporting") {
  const auto bad_cell = temp_file("partret_bad.csv");
  write_file(bad_cell, "Y,X1\n1,0\n2,zebra\n");
  try {
    load_csv(bad_cell, "Y");
    FAIL("expected data_error");
  } catch (const data_error& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("line 3") != std::string::npos);
    REQUIRE(msg.find("X1") != std::string::npos);
  }

  REQUIRE_THROWS_AS(load_csv(temp_file("partret_nonexistent.csv"), "Y"), data_error);
  REQUIRE_THROWS_AS(load_csv(bad_cell, "Z"), data_error);

  const auto missing = temp_file("partret_missing.csv");
  write_file(missing, "Y,X1\n1,0\n2,\n");
  REQUIRE_THROWS_AS(load_csv(missing, "Y"), data_error);

  const auto fractional = temp_file("partret_frac.csv");
  write_file(fractional, "Y,X1\n1,0\n2,0.5\n");
  REQUIRE_THROWS_AS(load_csv(fractional, "Y"), data_error);
}

TEST_CASE("constant explanatory column is accepted with a warning") {
  const auto p = temp_file("partret_const.csv");
  write_file(p, "Y,X1,X2\n1,0,1\n2,1,1\n3,0,1\n");
  Warnings warnings;
  const Dataset d = load_csv(p, "Y", nullptr, YModel::random_y, &warnings);
  REQUIRE(warnings.size() == 1);
  REQUIRE(warnings[0].find("X2") != std::string::npos);
  REQUIRE(d.arity[1] == 2);  // clamped so codes stay below arity
}

TEST_CASE("discretization spec codes real columns while loading") {
  const auto p = temp_file("partret_disc.csv");
  write_file(p, "Y,X1\n1,0.1\n2,0.5\n3,0.9\n");
  DiscretizationSpec spec;
  spec.columns.push_back({"X1", {0.5}});
  const Dataset d = load_csv(p, "Y", &spec);
  REQUIRE(d.col(0) == std::vector<uint8_t>{0, 1, 1});
  REQUIRE(d.arity[0] == 2);
}

TEST_CASE("discretize follows the value-below-cutoff convention") {
  const std::vector<double> v1{0.1, 0.5, 0.9};
  REQUIRE(discretize(v1, std::vector<double>{0.5}) == std::vector<uint8_t>{0, 1, 1});

  const std::vector<double> v2{3.0, -1.0, 7.5};
  REQUIRE(discretize(v2, std::vector<double>{}) == std::vector<uint8_t>{0, 0, 0});

  const std::vector<double> v3{-1.0, 0.0, 1.0};
  REQUIRE(discretize(v3, std::vector<double>{-0.5, 0.5}) == std::vector<uint8_t>{0, 1, 2});

  REQUIRE_THROWS_AS(discretize(v3, std::vector<double>{0.5, 0.5}), data_error);
  REQUIRE_THROWS_AS(discretize(v3, std::vector<double>{1.0, -1.0}), data_error);
}

TEST_CASE("normalize_response centers and scales to unit second moment") {
  Dataset d = make_dataset({{0, 0, 1, 1}}, {1, 1, 3, 3});
  const Dataset norm = normalize_response(d);
  REQUIRE(norm.y == std::vector<double>{-1, -1, 1, 1});

  const Dataset two = normalize_response(make_dataset({{0, 1}}, {5, -5}));
  REQUIRE(two.y == std::vector<double>{1, -1});

  REQUIRE_THROWS_AS(normalize_response(make_dataset({{0, 1, 0}}, {0, 0, 0})), data_error);
}

TEST_CASE("normalize_response is idempotent and affine-equivariant") {
  SplitMix64 g(77);
  for (int rep = 0; rep < 20; ++rep) {
    const size_t n = 5 + g.below(40);
    CodeMatrix cols{std::vector<uint8_t>(n, 0)};
    std::vector<double> y(n);
    for (auto& v : y) v = g.normal() * 3 + 1;
    for (auto& c : cols[0]) c = g.bernoulli(0.5) ? 1 : 0;
    const Dataset d = make_dataset(cols, y);
    const Dataset n1 = normalize_response(d);

    double mean = 0, second = 0;
    for (const double v : n1.y) mean += v;
    mean /= static_cast<double>(n);
    for (const double v : n1.y) second += v * v;
    second /= static_cast<double>(n);
    REQUIRE(std::abs(mean) < 1e-12);
    REQUIRE(std::abs(second - 1.0) < 1e-12);

    const Dataset n2 = normalize_response(n1);
    for (size_t i = 0; i < n; ++i) REQUIRE(n2.y[i] == Catch::Approx(n1.y[i]).margin(1e-12));

    const double a = g.uniform01() < 0.5 ? -2.5 : 1.75;
    const double b = g.normal();
    Dataset affine = d;
    for (auto& v : affine.y) v = a * v + b;
    const Dataset n3 = normalize_response(affine);
    const double sign = a > 0 ? 1.0 : -1.0;
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(n3.y[i] == Catch::Approx(sign * n1.y[i]).margin(1e-9));
    }
  }
}

TEST_CASE("affine response transforms leave I, J and D invariant") {
  SplitMix64 g(1234);
  const size_t n = 60;
  CodeMatrix cols(3, std::vector<uint8_t>(n));
  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = static_cast<uint8_t>(g.below(2));
    y[i] = g.normal() + cols[0][i];
  }
  const Dataset base = normalize_response(make_dataset(cols, y));
  std::vector<double> y2(y);
  for (auto& v : y2) v = -3.0 * v + 7.0;
  const Dataset transformed = normalize_response(make_dataset(cols, y2));

  const std::vector<uint32_t> subset{0, 1, 2};
  const auto p1 = build_partition(base, subset);
  const auto p2 = build_partition(transformed, subset);
  REQUIRE(influence_i(p1) == Catch::Approx(influence_i(p2)).margin(1e-9));
  REQUIRE(influence_j(p1) == Catch::Approx(influence_j(p2)).margin(1e-9));
  const auto d1 = drop_score(base, subset, 1);
  const auto d2 = drop_score(transformed, subset, 1);
  REQUIRE(d1.d_value == Catch::Approx(d2.d_value).margin(1e-9));
}

TEST_CASE("write_csv round-trips exactly") {
  SplitMix64 g(31);
  const size_t n = 40;
  CodeMatrix cols(4, std::vector<uint8_t>(n));
  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t s = 0; s < 4; ++s) cols[s][i] = static_cast<uint8_t>(g.below(3));
    y[i] = g.normal();
  }
  const Dataset d = make_dataset(cols, y);
  const auto p = temp_file("partret_roundtrip.csv");
  write_csv(d, p);
  const Dataset back = load_csv(p, "Y");
  REQUIRE(back.n_vars() == d.n_vars());
  for (uint32_t s = 0; s < d.n_vars(); ++s) REQUIRE(back.col(s) == d.col(s));
  REQUIRE(back.y == d.y);
  REQUIRE(back.names == d.names);
}
