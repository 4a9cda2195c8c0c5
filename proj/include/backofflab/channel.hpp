#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace backofflab {

using PacketId = std::uint64_t;
using SlotIndex = std::uint64_t;

// One slot is one packet-sized transmission opportunity. Every participant
// takes exactly one action per slot.
enum class SlotAction { Sleep, Listen, SendAndListen };

// Ternary channel state. A jammed slot is always Noisy.
enum class SlotState { Empty, Success, Noisy };

struct SlotOutcome {
  SlotState state = SlotState::Empty;
  bool jammed = false;
  std::optional<PacketId> successful_sender;
  std::uint32_t sender_count = 0;
};

// What a listener hears. Listeners cannot tell jam noise from collision
// noise; the feedback is a function of (outcome.state, action) only.
struct Feedback {
  SlotState ternary = SlotState::Empty;
};

// Resolves one slot given the set of senders and the jam flag.
//   0 senders, no jam  -> Empty
//   1 sender,  no jam  -> Success (sender departs)
//   2+ senders or jam  -> Noisy
SlotOutcome resolve_slot(std::span<const PacketId> send_set, bool jammed);

// Sleep learns nothing; Listen and SendAndListen observe the slot state.
std::optional<Feedback> feedback_for(const SlotOutcome& outcome, SlotAction action);

inline bool accesses_channel(SlotAction a) { return a != SlotAction::Sleep; }

}  // namespace backofflab
