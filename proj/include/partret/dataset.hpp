#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "partret/errors.hpp"

namespace partret {

// Sampling model of the response: random_y when Y is drawn given X,
// specified_y when the Y totals are fixed by design (case-control).
enum class YModel { random_y, specified_y };

// code = number of cutoffs <= value, so a value below every cutoff lands in
// bin 0 and a value equal to a cutoff goes to the upper bin.
inline std::vector<uint8_t> discretize(std::span<const double> values, std::span<const double> cutoffs) {
  for (size_t i = 1; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i - 1] < cutoffs[i])) throw data_error("cutoffs must be strictly increasing");
  }
  if (cutoffs.size() > 254) throw data_error("too many cutoffs (at most 254)");
  std::vector<uint8_t> codes(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const auto it = std::upper_bound(cutoffs.begin(), cutoffs.end(), values[i]);
    codes[i] = static_cast<uint8_t>(it - cutoffs.begin());
  }
  return codes;
}

// Per-column cutoff lists, keyed by CSV header name. Columns named here are
// parsed as reals and coded; all other explanatory columns must already be
// small non-negative integer codes.
struct DiscretizationSpec {
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  const std::vector<double>* find(std::string_view name) const {
    for (const auto& [col, cuts] : columns) {
      if (col == name) return &cuts;
    }
    return nullptr;
  }
};

using CodeMatrix = std::vector<std::vector<uint8_t>>;

// Immutable after construction; safe to share read-only across workers.
// Column s holds codes in [0, arity[s]); the response y is kept as loaded
// until normalize_response is applied.
struct Dataset {
  std::shared_ptr<const CodeMatrix> columns;
  std::vector<uint32_t> arity;
  std::vector<double> y;
  YModel y_model = YModel::random_y;
  std::vector<std::string> names;
  std::string response_name = "Y";

  size_t n_rows() const { return y.size(); }
  uint32_t n_vars() const { return columns ? static_cast<uint32_t>(columns->size()) : 0u; }
  const std::vector<uint8_t>& col(uint32_t s) const { return (*columns)[s]; }
};

inline Dataset make_dataset(CodeMatrix cols, std::vector<double> y,
                            YModel model = YModel::random_y,
                            std::vector<std::string> names = {},
                            std::vector<uint32_t> arity = {}) {
  if (cols.empty()) throw data_error("dataset needs at least one explanatory variable");
  if (y.empty()) throw data_error("dataset needs at least one row");
  const size_t n = y.size();
  for (size_t s = 0; s < cols.size(); ++s) {
    if (cols[s].size() != n) {
      throw data_error("column " + std::to_string(s + 1) + " has " + std::to_string(cols[s].size()) +
                       " rows, response has " + std::to_string(n));
    }
  }
  if (arity.empty()) {
    arity.resize(cols.size());
    for (size_t s = 0; s < cols.size(); ++s) {
      uint8_t mx = 0;
      for (const uint8_t c : cols[s]) mx = std::max(mx, c);
      arity[s] = std::max<uint32_t>(2, static_cast<uint32_t>(mx) + 1);
    }
  } else {
    if (arity.size() != cols.size()) throw data_error("arity list does not match column count");
    for (size_t s = 0; s < cols.size(); ++s) {
      if (arity[s] < 2 || arity[s] > 256) throw data_error("arity out of range for column " + std::to_string(s + 1));
      for (const uint8_t c : cols[s]) {
        if (c >= arity[s]) throw data_error("code exceeds arity in column " + std::to_string(s + 1));
      }
    }
  }
  if (names.empty()) {
    names.reserve(cols.size());
    for (size_t s = 0; s < cols.size(); ++s) names.push_back("X" + std::to_string(s + 1));
  } else if (names.size() != cols.size()) {
    throw data_error("name list does not match column count");
  }
  Dataset d;
  d.columns = std::make_shared<const CodeMatrix>(std::move(cols));
  d.arity = std::move(arity);
  d.y = std::move(y);
  d.y_model = model;
  d.names = std::move(names);
  return d;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    const std::string_view cell = trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    out.emplace_back(cell);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !s.empty();
}

}  // namespace detail

// CSV ingestion: comma separated, UTF-8, mandatory header row. The response
// column is selected by name; every other column is an explanatory variable.
// Missing values are not supported and fail the load. Constant explanatory
// columns are accepted but flagged through the warning sink.
inline Dataset load_csv(const std::filesystem::path& path, const std::string& response_column,
                        const DiscretizationSpec* spec = nullptr,
                        YModel model = YModel::random_y, Warnings* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path.string());
  const std::vector<std::string> header = detail::split_csv_line(line);
  size_t response_idx = header.size();
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_column) {
      response_idx = c;
      break;
    }
  }
  if (response_idx == header.size()) {
    throw data_error("response column '" + response_column + "' not found in header of " + path.string());
  }
  const size_t n_cols = header.size();
  if (n_cols < 2) throw data_error("no explanatory columns in " + path.string());

  std::vector<std::string> names;
  std::vector<const std::vector<double>*> cutoffs;  // per explanatory column, may be null
  for (size_t c = 0; c < n_cols; ++c) {
    if (c == response_idx) continue;
    names.push_back(header[c]);
    cutoffs.push_back(spec ? spec->find(header[c]) : nullptr);
  }

  CodeMatrix cols(names.size());
  std::vector<double> y;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != n_cols) {
      throw data_error("line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) +
                       " cells, found " + std::to_string(cells.size()));
    }
    size_t x = 0;
    for (size_t c = 0; c < n_cols; ++c) {
      double v = 0;
      if (cells[c].empty()) {
        throw data_error("line " + std::to_string(line_no) + ", column '" + header[c] + "': missing value");
      }
      if (!detail::parse_double(cells[c], v)) {
        throw data_error("line " + std::to_string(line_no) + ", column '" + header[c] + "': non-numeric cell '" +
                         cells[c] + "'");
      }
      if (c == response_idx) {
        y.push_back(v);
        continue;
      }
      if (cutoffs[x] != nullptr) {
        const std::span<const double> cuts(*cutoffs[x]);
        const auto it = std::upper_bound(cuts.begin(), cuts.end(), v);
        cols[x].push_back(static_cast<uint8_t>(it - cuts.begin()));
      } else {
        if (!(v >= 0.0) || v != std::floor(v) || v > 255.0) {
          throw data_error("line " + std::to_string(line_no) + ", column '" + header[c] +
                           "': expected a small non-negative integer code, found '" + cells[c] + "'");
        }
        cols[x].push_back(static_cast<uint8_t>(v));
      }
      ++x;
    }
  }
  if (y.empty()) throw data_error("no data rows in " + path.string());

  std::vector<uint32_t> arity(cols.size());
  for (size_t s = 0; s < cols.size(); ++s) {
    if (cutoffs[s] != nullptr) {
      arity[s] = static_cast<uint32_t>(cutoffs[s]->size()) + 1;
      arity[s] = std::max<uint32_t>(2, arity[s]);
    } else {
      uint8_t mx = 0;
      for (const uint8_t c : cols[s]) mx = std::max(mx, c);
      arity[s] = std::max<uint32_t>(2, static_cast<uint32_t>(mx) + 1);
    }
    bool constant = true;
    for (const uint8_t c : cols[s]) {
      if (c != cols[s][0]) {
        constant = false;
        break;
      }
    }
    if (constant) warn(warnings, "column '" + names[s] + "' is constant");
  }

  Dataset d = make_dataset(std::move(cols), std::move(y), model, std::move(names), std::move(arity));
  d.response_name = response_column;
  return d;
}

// Writes the response first, then the explanatory columns; codes round-trip
// exactly and y is printed with enough digits to reload bit-identically.
inline void write_csv(const Dataset& d, std::ostream& out) {
  out << d.response_name;
  for (const auto& name : d.names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (size_t i = 0; i < d.n_rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", d.y[i]);
    out << buf;
    for (uint32_t s = 0; s < d.n_vars(); ++s) out << ',' << static_cast<int>(d.col(s)[i]);
    out << '\n';
  }
}

inline void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path.string());
  write_csv(d, out);
  if (!out) throw data_error("write failed: " + path.string());
}

// Centers y and scales it so that the sample second moment n^-1 * sum(y^2)
// is exactly 1 (divide-by-n standard deviation). Idempotent to tolerance.
inline Dataset normalize_response(const Dataset& d) {
  const size_t n = d.n_rows();
  if (n < 2) throw data_error("normalization needs at least two rows");
  double mean = 0;
  for (const double v : d.y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0;
  for (const double v : d.y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw data_error("response is constant; cannot normalize");
  const double scale = 1.0 / std::sqrt(var);
  Dataset out = d;
  for (double& v : out.y) v = (v - mean) * scale;
  return out;
}

}  // namespace partret
