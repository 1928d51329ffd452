#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partret {

// Malformed or inconsistent input data: CSV parse failures, bad codes,
// constant response, unknown variable names. The CLI maps this to exit 3.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally valid but infeasible request: m > S, impossible strata,
// overflowing cell spaces, bad stage plans. The CLI maps this to exit 4.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace partret
