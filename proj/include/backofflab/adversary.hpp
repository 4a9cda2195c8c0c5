#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "backofflab/channel.hpp"
#include "backofflab/rng.hpp"

namespace backofflab {

struct AdversaryDecision {
  std::uint32_t injections = 0;
  bool jam = false;
};

// Everything an adaptive strategy may see when deciding for slot t: the
// state of the system through slot t-1 and nothing from slot t. Reactive
// strategies additionally receive the slot-t send set (sending is
// detectable; listening never is).
struct HistoryView {
  SlotIndex t = 1;                      // slot being decided
  std::uint64_t backlog = 0;            // packets in the system before slot-t injections
  std::uint64_t arrivals = 0;           // N_{t-1}
  std::uint64_t successes = 0;          // T_{t-1}
  std::uint64_t active_slots = 0;       // S_{t-1}
  std::uint64_t jammed_slots = 0;       // J_{t-1}
  std::optional<SlotState> last_state;  // outcome of slot t-1
  double last_contention = 0.0;         // C(t-1)
};

// In every window of S consecutive slots, injections + jammed slots stay
// within floor(lambda * S).
struct QueuingConstraint {
  double lambda = 0.05;
  std::uint64_t granularity = 1000;  // S

  std::uint64_t budget() const;
  void validate() const;
};

class ArrivalProcess {
 public:
  virtual ~ArrivalProcess() = default;
  virtual std::uint32_t injections(const HistoryView& history, SubStream& rng) = 0;
  // True once no further slot can produce an arrival.
  virtual bool exhausted(SlotIndex t) const = 0;
};

class AdaptiveJammer {
 public:
  virtual ~AdaptiveJammer() = default;
  virtual bool jam(const HistoryView& history, SubStream& rng) = 0;
};

class ReactiveJammer {
 public:
  virtual ~ReactiveJammer() = default;
  virtual bool jam(const HistoryView& history, std::span<const PacketId> send_set) = 0;
};

enum class QueuingPattern { FrontLoaded, Spread, AdaptiveGreedy };

struct ArrivalSpec {
  enum class Kind { Batch, Bernoulli, Queuing };
  Kind kind = Kind::Batch;
  std::uint64_t batch_n = 1;                 // Batch
  double rate = 0.0;                         // Bernoulli
  std::optional<SlotIndex> until;            // Bernoulli/Queuing: last arrival slot
  QueuingConstraint constraint;              // Queuing
  QueuingPattern pattern = QueuingPattern::FrontLoaded;

  void validate() const;
};

struct AdaptiveJamSpec {
  enum class Kind { Never, FirstJ, Random, ContentionTriggered };
  Kind kind = Kind::Never;
  std::uint64_t first_j = 0;  // FirstJ: jam slots 1..J
  double p = 0.0;             // Random
  double threshold = 0.0;     // ContentionTriggered: jam when C(t-1) < threshold

  void validate() const;
};

struct ReactiveJamSpec {
  enum class Kind { None, TargetPacket, AnySend };
  Kind kind = Kind::None;
  PacketId target = 0;
  std::uint64_t budget = 0;

  void validate() const;
};

std::unique_ptr<ArrivalProcess> make_arrivals(const ArrivalSpec& spec);
std::unique_ptr<AdaptiveJammer> make_adaptive_jammer(const AdaptiveJamSpec& spec);
std::unique_ptr<ReactiveJammer> make_reactive_jammer(const ReactiveJamSpec& spec);

// True when no slot >= t can produce an arrival under the spec.
bool arrivals_exhausted(const ArrivalSpec& spec, SlotIndex t);

// Per-slot adversary load as recorded in a trace.
struct SlotLoad {
  std::uint32_t injections = 0;
  bool jammed = false;
};

struct ScheduleValidation {
  bool ok = true;
  SlotIndex window_start = 0;  // first violating window [start, start + S - 1]
  std::uint64_t window_load = 0;
};

// Sliding-window check (stride 1) of injections + jams against the budget.
// A trace shorter than S is checked as a single window.
ScheduleValidation validate_schedule(std::span<const SlotLoad> slots,
                                     const QueuingConstraint& constraint);

}  // namespace backofflab
