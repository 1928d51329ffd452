#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "partret/dataset.hpp"
#include "partret/errors.hpp"
#include "partret/rng.hpp"

namespace partret {

struct PartitionCell {
  uint64_t key = 0;   // packed mixed-radix code over the subset
  uint32_t count = 0;
  double wsum = 0;    // sum of y over the cell
};

// Partition of the sample induced by a variable subset. One entry per
// non-empty cell; empty cells are absent. key = sum over positions p of
// code_p * strides[p]; strides.back() is the full cell-space size.
struct PartitionTable {
  std::vector<uint32_t> subset;
  std::vector<uint32_t> arities;
  std::vector<uint64_t> strides;       // size subset.size() + 1
  std::vector<PartitionCell> cells;    // ascending key
  uint64_t n = 0;
  double y_sum = 0;
  double y_bar = 0;
};

struct DropScore {
  uint32_t variable = 0;
  double d_value = 0;  // half the change in I when the variable is removed
  double i_coarse = 0;
  double i_fine = 0;
};

namespace detail {

inline std::vector<uint64_t> pack_strides(std::span<const uint32_t> arities) {
  std::vector<uint64_t> strides(arities.size() + 1);
  strides[0] = 1;
  for (size_t p = 0; p < arities.size(); ++p) {
    const uint64_t a = arities[p];
    if (a == 0 || strides[p] > std::numeric_limits<uint64_t>::max() / a) {
      throw config_error("cell key space overflows 64 bits for this subset");
    }
    strides[p + 1] = strides[p] * a;
  }
  return strides;
}

// (count, y-sum) accumulator over packed cell keys. Uses a dense array while
// the key space is small and an open-addressing map beyond that; the cell
// space of a typical subset is mostly empty at realistic sample sizes, so
// iteration only visits touched cells, in first-seen order.
class CellAccumulator {
 public:
  void reset(uint64_t space, size_t expected) {
    if (mode_ == Mode::dense) {
      for (const uint64_t k : keys_) {
        dense_count_[k] = 0;
        dense_wsum_[k] = 0.0;
      }
    } else {
      std::fill(slots_.begin(), slots_.end(), kEmpty);
    }
    keys_.clear();
    counts_.clear();
    wsums_.clear();
    const uint64_t cap = std::max<uint64_t>(16 * std::max<size_t>(expected, 1), uint64_t{1} << 16);
    const uint64_t dense_limit = std::min<uint64_t>(cap, uint64_t{1} << 21);
    if (space != 0 && space <= dense_limit) {
      mode_ = Mode::dense;
      if (dense_count_.size() < space) {
        dense_count_.assign(space, 0);
        dense_wsum_.assign(space, 0.0);
      }
    } else {
      mode_ = Mode::hashed;
      size_t want = 16;
      while (want < 2 * std::max<size_t>(expected, 8)) want <<= 1;
      if (slots_.size() != want) {
        slots_.assign(want, kEmpty);
      }
      mask_ = slots_.size() - 1;
    }
  }

  void add(uint64_t key, double w) { add_counted(key, 1, w); }

  void add_counted(uint64_t key, uint32_t c, double w) {
    if (mode_ == Mode::dense) {
      if (dense_count_[key] == 0) keys_.push_back(key);
      dense_count_[key] += c;
      dense_wsum_[key] += w;
      return;
    }
    size_t h = static_cast<size_t>(mix64(key)) & mask_;
    for (;;) {
      const uint32_t slot = slots_[h];
      if (slot == kEmpty) {
        slots_[h] = static_cast<uint32_t>(keys_.size());
        keys_.push_back(key);
        counts_.push_back(c);
        wsums_.push_back(w);
        if (4 * keys_.size() > 3 * slots_.size()) grow();
        return;
      }
      if (keys_[slot] == key) {
        counts_[slot] += c;
        wsums_[slot] += w;
        return;
      }
      h = (h + 1) & mask_;
    }
  }

  size_t n_cells() const { return keys_.size(); }

  template <class F>
  void for_each(F&& f) const {
    if (mode_ == Mode::dense) {
      for (const uint64_t k : keys_) f(k, dense_count_[k], dense_wsum_[k]);
    } else {
      for (size_t i = 0; i < keys_.size(); ++i) f(keys_[i], counts_[i], wsums_[i]);
    }
  }

 private:
  enum class Mode { dense, hashed };
  static constexpr uint32_t kEmpty = 0xffffffffu;

  void grow() {
    std::vector<uint32_t> bigger(slots_.size() * 2, kEmpty);
    const size_t mask = bigger.size() - 1;
    for (size_t i = 0; i < keys_.size(); ++i) {
      size_t h = static_cast<size_t>(mix64(keys_[i])) & mask;
      while (bigger[h] != kEmpty) h = (h + 1) & mask;
      bigger[h] = static_cast<uint32_t>(i);
    }
    slots_ = std::move(bigger);
    mask_ = mask;
  }

  Mode mode_ = Mode::dense;
  std::vector<uint32_t> dense_count_;
  std::vector<double> dense_wsum_;
  std::vector<uint64_t> keys_;
  std::vector<uint32_t> counts_;  // hashed mode entries
  std::vector<double> wsums_;    // hashed mode entries
  std::vector<uint32_t> slots_;
  size_t mask_ = 0;
};

// I = n^-1 sum over cells of (W_j - n_j*ybar)^2, the W-sum form of the
// cell-size weighted heterogeneity measure; J divides each term by n_j.
template <class Acc>
inline void influence_from(const Acc& acc, uint64_t n, double* i_out, double* j_out) {
  double total = 0;
  acc.for_each([&](uint64_t, uint32_t, double w) { total += w; });
  const double ybar = total / static_cast<double>(n);
  double i = 0, j = 0;
  acc.for_each([&](uint64_t, uint32_t c, double w) {
    const double dev = w - static_cast<double>(c) * ybar;
    i += dev * dev;
    j += dev * dev / static_cast<double>(c);
  });
  if (i_out) *i_out = i / static_cast<double>(n);
  if (j_out) *j_out = j / static_cast<double>(n);
}

inline void validate_subset(const Dataset& d, std::span<const uint32_t> subset) {
  if (subset.empty()) throw config_error("variable subset must be non-empty");
  for (size_t p = 0; p < subset.size(); ++p) {
    if (subset[p] >= d.n_vars()) {
      throw config_error("variable index out of range: " + std::to_string(subset[p]));
    }
    for (size_t q = p + 1; q < subset.size(); ++q) {
      if (subset[p] == subset[q]) {
        throw config_error("duplicate variable in subset: " + std::to_string(subset[p]));
      }
    }
  }
}

}  // namespace detail

inline PartitionTable build_partition(const Dataset& d, std::span<const uint32_t> subset) {
  detail::validate_subset(d, subset);
  PartitionTable t;
  t.subset.assign(subset.begin(), subset.end());
  t.arities.reserve(subset.size());
  for (const uint32_t v : subset) t.arities.push_back(d.arity[v]);
  t.strides = detail::pack_strides(t.arities);
  const size_t n = d.n_rows();
  detail::CellAccumulator acc;
  acc.reset(t.strides.back(), n);
  for (size_t i = 0; i < n; ++i) {
    uint64_t key = 0;
    for (size_t p = 0; p < subset.size(); ++p) {
      key += static_cast<uint64_t>(d.col(subset[p])[i]) * t.strides[p];
    }
    acc.add(key, d.y[i]);
  }
  t.n = n;
  t.cells.reserve(acc.n_cells());
  acc.for_each([&](uint64_t k, uint32_t c, double w) {
    t.cells.push_back({k, c, w});
    t.y_sum += w;
  });
  std::sort(t.cells.begin(), t.cells.end(),
            [](const PartitionCell& a, const PartitionCell& b) { return a.key < b.key; });
  t.y_bar = t.y_sum / static_cast<double>(n);
  return t;
}

inline double influence_i(const PartitionTable& t) {
  double i = 0;
  for (const auto& c : t.cells) {
    const double dev = c.wsum - static_cast<double>(c.count) * t.y_bar;
    i += dev * dev;
  }
  return i / static_cast<double>(t.n);
}

inline double influence_j(const PartitionTable& t) {
  double j = 0;
  for (const auto& c : t.cells) {
    const double dev = c.wsum - static_cast<double>(c.count) * t.y_bar;
    j += dev * dev / static_cast<double>(c.count);
  }
  return j / static_cast<double>(t.n);
}

// Mean of I over exchangeable reassignments of a normalized response to the
// given cell sizes: 1 - sum of (n_j/n)^2.
inline double null_expectation_i(const PartitionTable& t) {
  double s = 0;
  for (const auto& c : t.cells) {
    const double share = static_cast<double>(c.count) / static_cast<double>(t.n);
    s += share * share;
  }
  return 1.0 - s;
}

// Half the difference between I over the subset and I over the subset with
// the victim removed. A one-variable subset coarsens to the single trivial
// cell, whose I is 0.
inline DropScore drop_score(const Dataset& d, std::span<const uint32_t> subset, uint32_t victim) {
  bool found = false;
  for (const uint32_t v : subset) {
    if (v == victim) {
      found = true;
      break;
    }
  }
  if (!found) throw config_error("victim variable is not in the subset");
  const PartitionTable fine = build_partition(d, subset);
  const double i_fine = influence_i(fine);
  double i_coarse = 0;
  if (subset.size() > 1) {
    std::vector<uint32_t> coarse;
    coarse.reserve(subset.size() - 1);
    for (const uint32_t v : subset) {
      if (v != victim) coarse.push_back(v);
    }
    i_coarse = influence_i(build_partition(d, coarse));
  }
  return {victim, 0.5 * (i_fine - i_coarse), i_coarse, i_fine};
}

}  // namespace partret
