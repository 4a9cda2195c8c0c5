#include "backofflab/channel.hpp"

namespace backofflab {

SlotOutcome resolve_slot(std::span<const PacketId> send_set, bool jammed) {
  SlotOutcome out;
  out.jammed = jammed;
  out.sender_count = static_cast<std::uint32_t>(send_set.size());
  if (jammed || out.sender_count >= 2) {
    out.state = SlotState::Noisy;
  } else if (out.sender_count == 1) {
    out.state = SlotState::Success;
    out.successful_sender = send_set.front();
  } else {
    out.state = SlotState::Empty;
  }
  return out;
}

std::optional<Feedback> feedback_for(const SlotOutcome& outcome, SlotAction action) {
  if (action == SlotAction::Sleep) return std::nullopt;
  return Feedback{outcome.state};
}

}  // namespace backofflab
