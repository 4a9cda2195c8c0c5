#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "backofflab/adversary.hpp"
#include "backofflab/channel.hpp"
#include "backofflab/metrics.hpp"
#include "backofflab/policy.hpp"

namespace backofflab {

enum class TraceLevel { Summary, Checkpoints, FullSlots };

struct EngineConfig {
  PolicyKind policy = PolicyKind::LowSense;
  PolicyParams lowsense;
  double aloha_p = 0.5;
  ArrivalSpec arrivals;
  AdaptiveJamSpec adaptive_jam;
  ReactiveJamSpec reactive_jam;
  PotentialParams potential;
  std::uint64_t horizon = 10'000'000;
  std::uint64_t master_seed = 1;
  TraceLevel trace_level = TraceLevel::Summary;
  std::uint64_t checkpoint_stride = 1024;

  void validate() const;
};

// One slot of a FullSlots trace. Recomputing the summary from these events
// reproduces it bit-exactly (see replay_summary in the harness).
struct TraceEvent {
  SlotIndex t = 0;
  std::uint32_t injections = 0;
  bool adaptive_jam = false;
  bool reactive_jam = false;
  std::uint32_t send_count = 0;
  SlotState state = SlotState::Empty;
  bool jammed = false;
  std::optional<PacketId> departed;
  double contention = 0.0;
  ContentionClass contention_class = ContentionClass::Low;
  std::uint64_t backlog = 0;  // packets in the system during the slot
  // Accumulator snapshot after the slot.
  std::uint64_t successes = 0;
  std::uint64_t active_slots = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t jammed_slots = 0;
  // FullSlots extras: who accessed the channel (non-Sleep) and who sent.
  std::vector<PacketId> accessed;
  std::vector<PacketId> senders;
  std::optional<PotentialSnapshot> phi;        // state during the slot
  std::optional<PotentialSnapshot> phi_after;  // state after updates/departure
  double w_max_after = 0.0;  // largest window after the slot (any policy)
};

struct Checkpoint {
  SlotIndex t = 0;
  std::uint64_t successes = 0;
  std::uint64_t active_slots = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t jammed_slots = 0;
  std::uint64_t backlog = 0;  // after the slot
  std::optional<double> throughput;
  std::optional<double> implicit_throughput;
  double phi = 0.0;    // state after the slot (LowSense runs)
  double w_max = 0.0;
};

struct PacketRecord {
  PacketId id = 0;
  SlotIndex arrival_slot = 0;
  std::uint64_t accesses = 0;
  SlotIndex completed_slot = 0;  // 0 while in the system
};

struct SummaryStats {
  std::uint64_t master_seed = 0;
  std::uint64_t arrived = 0;
  std::uint64_t completed = 0;
  std::uint64_t active_slots = 0;
  std::uint64_t jammed_slots = 0;
  SlotIndex makespan = 0;  // last slot with at least one packet in the system
  SlotIndex end_slot = 0;  // last simulated slot
  bool truncated = false;  // horizon hit with packets or arrivals outstanding
  std::optional<double> overall_throughput;
  std::optional<double> final_implicit_throughput;
  std::optional<double> min_implicit_throughput;  // over checkpoints
  std::uint64_t max_backlog = 0;
  double max_window = 0.0;
  std::uint64_t access_max = 0;
  double access_median = 0.0;
  double access_mean = 0.0;
  std::uint64_t access_total = 0;
  double max_phi = 0.0;  // over checkpoints (LowSense runs)
  double final_phi = 0.0;
  std::uint64_t interval_count = 0;
  std::uint64_t intervals_decreased = 0;  // phi_end < phi_start
};

struct RunResult {
  SummaryStats summary;
  std::vector<TraceEvent> trace;  // FullSlots only
  std::vector<Checkpoint> checkpoints;
  IntervalLedger intervals;  // LowSense runs
  std::vector<PacketRecord> packets;
};

// Test instrumentation. `action_override` replaces a packet's drawn action
// after the adaptive decision for the slot is committed; it consumes no
// extra randomness, which makes the information firewalls mechanically
// auditable (see the engine tests).
struct EngineHooks {
  std::function<SlotAction(PacketId, SlotIndex, SlotAction)> action_override;
  std::function<void(SlotIndex, const AdversaryDecision&)> on_adaptive_decision;
  std::function<void(SlotIndex, bool)> on_reactive_decision;
};

// Executes the per-slot contract:
//   1. adaptive adversary decides (injections, jam) from history <= t-1
//   2. injected packets join with window w_min and act in slot t
//   3. every packet draws its action from its own substream
//   4. a reactive jammer sees the slot-t send set (never listeners)
//   5. the slot resolves; a successful sender departs immediately
//   6. feedback is distributed and windows/access counters update
//   7. metrics, interval ledger, checkpoints, trace
// until arrivals are exhausted and the system drains, or the horizon hits.
RunResult run(const EngineConfig& config, const EngineHooks& hooks = {});

}  // namespace backofflab
