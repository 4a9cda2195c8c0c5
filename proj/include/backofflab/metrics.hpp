#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "backofflab/channel.hpp"

namespace backofflab {

// Diagnostic constants: weights of the potential terms, the interval
// divisor, and the contention band. Policies never read any of this.
struct PotentialParams {
  double alpha1 = 4.0;
  double alpha2 = 2.0;
  double alpha3 = 1.0;
  double c_tau = 4.0;
  double c_low = 1.0 / 256.0;  // default 1/(2*w_min) for w_min = 128
  double c_high = 2.0;

  void validate(double w_min) const;
};

enum class ContentionClass { Low, Good, High };

// Sum of send probabilities 1/w: the expected number of senders this slot.
double contention(std::span<const double> windows);

// Low iff C < c_low, High iff C > c_high, Good on the closed band between.
ContentionClass classify_contention(double c, const PotentialParams& params);

struct PotentialSnapshot {
  std::uint64_t packets = 0;  // N
  double h = 0.0;             // sum of 1/ln(w)
  double l = 0.0;             // w_max/ln^2(w_max), 0 with no packets
  double w_max = 0.0;
  double phi = 0.0;           // alpha1*N + alpha2*H + alpha3*L
};

PotentialSnapshot potential(std::span<const double> windows, const PotentialParams& params);

// Assembles the snapshot from already-maintained aggregates.
PotentialSnapshot potential_from_sums(std::uint64_t packets, double h_sum, double w_max,
                                      const PotentialParams& params);

// Interval length tau = ceil((1/c_tau) * max{w_max/ln^2(w_max), sqrt(N)}),
// floored at tau_min = ceil(w_min/ln^2(w_min)). Requires N >= 1.
std::uint64_t interval_length(double w_max, std::uint64_t packets,
                              const PotentialParams& params, double w_min);
std::uint64_t minimum_interval_length(double w_min);

// Running counters of one execution.
struct MetricsAccumulator {
  std::uint64_t successes = 0;     // T_t
  std::uint64_t active_slots = 0;  // S_t
  std::uint64_t arrivals = 0;      // N_t
  std::uint64_t jammed_slots = 0;  // J_t
};

// (T + J)/S; absent when no slot has been active.
std::optional<double> throughput(const MetricsAccumulator& acc);
// (N + J)/S; equals throughput exactly whenever the system is empty.
std::optional<double> implicit_throughput(const MetricsAccumulator& acc);

struct SlotProbabilities {
  double empty = 0.0;
  double success = 0.0;
  double noisy = 0.0;
};

// Exact per-slot outcome distribution for independent senders with
// probabilities 1/w. Requires every w >= 2 and at most kMaxExactWindows
// windows (the literal product/sum is O(n^2)).
inline constexpr std::size_t kMaxExactWindows = 25;
SlotProbabilities exact_slot_probabilities(std::span<const double> windows);

// Closed-form bounds on the exact probabilities as a function of
// contention, with the achieved margins:
//   C/e^{2C} <= p_suc <= 2C/e^C
//   e^{-2C}  <= p_emp <= e^{-C}
//   p_noi    >= 1 - 2C/e^C - 1/e^C
struct BoundsReport {
  double c = 0.0;
  SlotProbabilities probs;
  double suc_low_margin = 0.0;   // p_suc - C/e^{2C}
  double suc_high_margin = 0.0;  // 2C/e^C - p_suc
  double emp_low_margin = 0.0;
  double emp_high_margin = 0.0;
  double noi_margin = 0.0;

  bool ok() const;
};

BoundsReport check_probability_bounds(std::span<const double> windows);

enum class SlotCondition { Silent, Noisy };

// Exact expected change of H = sum 1/ln(w) conditioned on the slot state:
// each packet listens with probability c*ln^3(w)/w and applies the
// unfloored window update for that state. The paper's bounds are
//   E[dH | noisy]  <= -C/(2c)      E[dH | silent] <= +2C/c.
struct HDeltaReport {
  double value = 0.0;
  double bound = 0.0;  // upper bound on value
  bool ok() const { return value <= bound; }
};

HDeltaReport expected_h_delta(std::span<const double> windows, SlotCondition cond, double c);

// One analysis interval: [start, start + tau), with the potential at both
// ends and per-contention-class slot counts.
struct IntervalRecord {
  SlotIndex start = 0;
  std::uint64_t tau = 0;
  std::uint64_t covered = 0;  // slots actually elapsed (== tau unless the run ended)
  std::uint64_t arrivals = 0;
  std::uint64_t jams = 0;
  double phi_start = 0.0;
  double phi_end = 0.0;
  std::uint64_t low_slots = 0;
  std::uint64_t good_slots = 0;
  std::uint64_t high_slots = 0;
};

using IntervalLedger = std::vector<IntervalRecord>;

}  // namespace backofflab
