#include "backofflab/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace backofflab {

void PotentialParams::validate(double w_min) const {
  if (!(alpha1 > alpha2 && alpha2 > alpha3 && alpha3 > 0.0)) {
    throw std::invalid_argument("potential: need alpha1 > alpha2 > alpha3 > 0");
  }
  if (!(c_tau > 0.0)) throw std::invalid_argument("potential: c_tau must be positive");
  if (!(c_low > 0.0 && c_low <= 1.0 / w_min)) {
    throw std::invalid_argument("potential: need 0 < c_low <= 1/w_min");
  }
  if (!(c_high > 1.0)) throw std::invalid_argument("potential: c_high must exceed 1");
}

double contention(std::span<const double> windows) {
  double sum = 0.0;
  for (double w : windows) sum += 1.0 / w;
  return sum;
}

ContentionClass classify_contention(double c, const PotentialParams& params) {
  if (c < params.c_low) return ContentionClass::Low;
  if (c > params.c_high) return ContentionClass::High;
  return ContentionClass::Good;
}

PotentialSnapshot potential(std::span<const double> windows, const PotentialParams& params) {
  double h = 0.0;
  double w_max = 0.0;
  for (double w : windows) {
    h += 1.0 / std::log(w);
    if (w > w_max) w_max = w;
  }
  return potential_from_sums(windows.size(), h, w_max, params);
}

PotentialSnapshot potential_from_sums(std::uint64_t packets, double h_sum, double w_max,
                                      const PotentialParams& params) {
  PotentialSnapshot snap;
  if (packets == 0) return snap;
  snap.packets = packets;
  snap.h = h_sum;
  snap.w_max = w_max;
  const double lw = std::log(w_max);
  snap.l = w_max / (lw * lw);
  snap.phi = params.alpha1 * static_cast<double>(packets) + params.alpha2 * snap.h +
             params.alpha3 * snap.l;
  return snap;
}

std::uint64_t minimum_interval_length(double w_min) {
  const double lw = std::log(w_min);
  return static_cast<std::uint64_t>(std::ceil(w_min / (lw * lw)));
}

std::uint64_t interval_length(double w_max, std::uint64_t packets,
                              const PotentialParams& params, double w_min) {
  if (packets == 0) {
    throw std::invalid_argument("interval_length: needs at least one active packet");
  }
  const double lw = std::log(w_max);
  const double l_term = w_max / (lw * lw);
  const double raw = std::max(l_term, std::sqrt(static_cast<double>(packets))) / params.c_tau;
  const auto tau = static_cast<std::uint64_t>(std::ceil(raw));
  return std::max(tau, minimum_interval_length(w_min));
}

std::optional<double> throughput(const MetricsAccumulator& acc) {
  if (acc.active_slots == 0) return std::nullopt;
  return static_cast<double>(acc.successes + acc.jammed_slots) /
         static_cast<double>(acc.active_slots);
}

std::optional<double> implicit_throughput(const MetricsAccumulator& acc) {
  if (acc.active_slots == 0) return std::nullopt;
  return static_cast<double>(acc.arrivals + acc.jammed_slots) /
         static_cast<double>(acc.active_slots);
}

SlotProbabilities exact_slot_probabilities(std::span<const double> windows) {
  const std::size_t n = windows.size();
  if (n > kMaxExactWindows) {
    throw std::invalid_argument("exact_slot_probabilities: too many windows for exact mode");
  }
  for (double w : windows) {
    if (!(w >= 2.0)) throw std::invalid_argument("exact_slot_probabilities: windows must be >= 2");
  }
  SlotProbabilities p;
  double emp = 1.0;
  for (double w : windows) emp *= 1.0 - 1.0 / w;
  double suc = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    double term = 1.0 / windows[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (v != u) term *= 1.0 - 1.0 / windows[v];
    }
    suc += term;
  }
  p.empty = emp;
  p.success = suc;
  p.noisy = 1.0 - emp - suc;
  return p;
}

bool BoundsReport::ok() const {
  return suc_low_margin >= 0.0 && suc_high_margin >= 0.0 && emp_low_margin >= 0.0 &&
         emp_high_margin >= 0.0 && noi_margin >= 0.0;
}

BoundsReport check_probability_bounds(std::span<const double> windows) {
  BoundsReport r;
  r.c = contention(windows);
  r.probs = exact_slot_probabilities(windows);
  const double e_c = std::exp(-r.c);
  const double e_2c = std::exp(-2.0 * r.c);
  r.suc_low_margin = r.probs.success - r.c * e_2c;
  r.suc_high_margin = 2.0 * r.c * e_c - r.probs.success;
  r.emp_low_margin = r.probs.empty - e_2c;
  r.emp_high_margin = e_c - r.probs.empty;
  r.noi_margin = r.probs.noisy - (1.0 - 2.0 * r.c * e_c - e_c);
  return r;
}

HDeltaReport expected_h_delta(std::span<const double> windows, SlotCondition cond, double c) {
  HDeltaReport rep;
  double sum = 0.0;
  for (double w : windows) {
    const double lw = std::log(w);
    const double p_listen = c * lw * lw * lw / w;
    const double factor = 1.0 + 1.0 / (c * lw);
    const double w_next = cond == SlotCondition::Noisy ? w * factor : w / factor;
    const double delta = 1.0 / std::log(w_next) - 1.0 / lw;
    sum += p_listen * delta;
  }
  rep.value = sum;
  const double con = contention(windows);
  rep.bound = cond == SlotCondition::Noisy ? -con / (2.0 * c) : 2.0 * con / c;
  return rep;
}

}  // namespace backofflab
