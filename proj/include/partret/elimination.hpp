#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "partret/partition.hpp"

namespace partret {

enum class StopKind { all_d_positive, d_exceeds, d_exceeds_schedule };
enum class StopReason { all_d_positive, single_variable_left, threshold_rule };

// Decides when elimination stops and the remaining variables are retained.
// fires() sees the drop scores of the current step and the number of drops
// made so far; comparisons are strict, so all-zero scores keep eliminating.
struct StoppingRule {
  StopKind kind = StopKind::all_d_positive;
  double threshold = 0.0;
  std::vector<double> schedule;

  static StoppingRule all_d_positive() { return {}; }

  static StoppingRule d_exceeds(double c) { return {StopKind::d_exceeds, c, {}}; }

  // threshold per reduction step; the last entry applies to any later step
  static StoppingRule d_exceeds_schedule(std::vector<double> per_step) {
    if (per_step.empty()) throw config_error("threshold schedule must not be empty");
    return {StopKind::d_exceeds_schedule, 0.0, std::move(per_step)};
  }

  double threshold_at_step(size_t drops_so_far) const {
    if (kind == StopKind::d_exceeds_schedule) {
      return schedule[std::min(drops_so_far, schedule.size() - 1)];
    }
    return kind == StopKind::d_exceeds ? threshold : 0.0;
  }

  bool fires(std::span<const double> d_values, size_t drops_so_far) const {
    const double c = threshold_at_step(drops_so_far);
    for (const double v : d_values) {
      if (!(v > c)) return false;
    }
    return true;
  }

  StopReason stop_reason() const {
    return kind == StopKind::all_d_positive ? StopReason::all_d_positive : StopReason::threshold_rule;
  }
};

struct EliminationStep {
  double i_before = 0;                 // I over the variables present at this step
  std::vector<DropScore> drop_scores;  // ascending variable id
  uint32_t dropped = 0;
};

struct EliminationTrace {
  std::vector<EliminationStep> steps;  // one entry per actual drop
  std::vector<uint32_t> retained;
  double stopping_i = 0;
  StopReason stop_reason = StopReason::single_variable_left;
  std::vector<DropScore> final_scores;  // scores of the step where the rule fired
};

namespace detail {

// Backward-elimination engine with reusable scratch, one instance per worker.
// Each step builds the partition over the remaining variables once, then
// derives every victim's coarse partition by merging cells along that
// variable's axis, which costs O(non-empty cells) per victim.
class Eliminator {
 public:
  explicit Eliminator(const Dataset& d) : d_(&d) {}

  void run(std::span<const uint32_t> subset, const StoppingRule& rule,
           std::vector<uint32_t>& retained, double& stopping_i, StopReason& reason,
           EliminationTrace* trace = nullptr) {
    remaining_.assign(subset.begin(), subset.end());
    std::sort(remaining_.begin(), remaining_.end());
    validate_subset(*d_, remaining_);
    if (trace) {
      trace->steps.clear();
      trace->final_scores.clear();
    }
    size_t drops = 0;
    for (;;) {
      if (remaining_.size() == 1) {
        reason = StopReason::single_variable_left;
        retained = remaining_;
        stopping_i = single_variable_i(remaining_[0]);
        break;
      }
      compute_step();
      if (rule.fires(d_values_, drops)) {
        reason = rule.stop_reason();
        retained = remaining_;
        stopping_i = i_fine_;
        if (trace) trace->final_scores = make_scores();
        break;
      }
      size_t victim = 0;
      for (size_t p = 1; p < d_values_.size(); ++p) {
        if (d_values_[p] < d_values_[victim]) victim = p;  // ties keep the lowest id
      }
      if (trace) trace->steps.push_back({i_fine_, make_scores(), remaining_[victim]});
      remaining_.erase(remaining_.begin() + static_cast<ptrdiff_t>(victim));
      ++drops;
    }
    if (trace) {
      trace->retained = retained;
      trace->stopping_i = stopping_i;
      trace->stop_reason = reason;
    }
  }

 private:
  std::vector<DropScore> make_scores() const {
    std::vector<DropScore> out(remaining_.size());
    for (size_t p = 0; p < remaining_.size(); ++p) {
      out[p] = {remaining_[p], d_values_[p], i_coarse_[p], i_fine_};
    }
    return out;
  }

  double single_variable_i(uint32_t var) {
    const size_t n = d_->n_rows();
    fine_.reset(d_->arity[var], n);
    const uint8_t* col = d_->col(var).data();
    const double* y = d_->y.data();
    for (size_t i = 0; i < n; ++i) fine_.add(col[i], y[i]);
    double i_val = 0;
    influence_from(fine_, n, &i_val, nullptr);
    return i_val;
  }

  void compute_step() {
    const size_t k = remaining_.size();
    const size_t n = d_->n_rows();
    arities_.resize(k);
    cols_.resize(k);
    for (size_t p = 0; p < k; ++p) {
      arities_[p] = d_->arity[remaining_[p]];
      cols_[p] = d_->col(remaining_[p]).data();
    }
    strides_ = pack_strides(arities_);
    const uint64_t space = strides_[k];
    fine_.reset(space, n);
    const double* y = d_->y.data();
    for (size_t i = 0; i < n; ++i) {
      uint64_t key = 0;
      for (size_t p = 0; p < k; ++p) key += static_cast<uint64_t>(cols_[p][i]) * strides_[p];
      fine_.add(key, y[i]);
    }
    double total = 0;
    fine_.for_each([&](uint64_t, uint32_t, double w) { total += w; });
    const double ybar = total / static_cast<double>(n);
    double i_fine = 0;
    fine_.for_each([&](uint64_t, uint32_t c, double w) {
      const double dev = w - static_cast<double>(c) * ybar;
      i_fine += dev * dev;
    });
    i_fine_ = i_fine / static_cast<double>(n);

    d_values_.resize(k);
    i_coarse_.resize(k);
    for (size_t p = 0; p < k; ++p) {
      const uint64_t stride = strides_[p];
      const uint64_t block = stride * arities_[p];
      coarse_.reset(space / arities_[p], fine_.n_cells());
      fine_.for_each([&](uint64_t key, uint32_t c, double w) {
        const uint64_t ck = key % stride + (key / block) * stride;
        coarse_.add_counted(ck, c, w);
      });
      double i_coarse = 0;
      coarse_.for_each([&](uint64_t, uint32_t c, double w) {
        const double dev = w - static_cast<double>(c) * ybar;
        i_coarse += dev * dev;
      });
      i_coarse /= static_cast<double>(n);
      i_coarse_[p] = i_coarse;
      d_values_[p] = 0.5 * (i_fine_ - i_coarse);
    }
  }

  const Dataset* d_;
  std::vector<uint32_t> remaining_;
  std::vector<uint32_t> arities_;
  std::vector<const uint8_t*> cols_;
  std::vector<uint64_t> strides_;
  CellAccumulator fine_;
  CellAccumulator coarse_;
  double i_fine_ = 0;
  std::vector<double> d_values_;
  std::vector<double> i_coarse_;
};

}  // namespace detail

// Repeatedly drops the variable with the smallest drop score (ties go to the
// lowest index) until the rule fires or one variable is left; the trace
// records every step. The caller decides what to do with small stopping-I
// retentions; nothing is discarded here beyond the eliminated variables.
inline EliminationTrace eliminate(const Dataset& d, std::span<const uint32_t> subset,
                                  const StoppingRule& rule = StoppingRule::all_d_positive()) {
  EliminationTrace trace;
  std::vector<uint32_t> retained;
  double stopping_i = 0;
  StopReason reason = StopReason::single_variable_left;
  detail::Eliminator engine(d);
  engine.run(subset, rule, retained, stopping_i, reason, &trace);
  return trace;
}

}  // namespace partret
