#include "backofflab/policy.hpp"

#include <cmath>

namespace backofflab {

namespace {
const double kECubed = std::exp(3.0);

double ln_cubed(double w) {
  const double l = std::log(w);
  return l * l * l;
}
}  // namespace

void PolicyParams::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("policy: c must be positive");
  if (!(w_min >= 2.0)) throw std::invalid_argument("policy: w_min must be >= 2");
  if (w_min < kECubed) {
    throw std::invalid_argument("policy: w_min must be >= e^3 (" +
                                std::to_string(kECubed) + ")");
  }
  if (c * ln_cubed(w_min) / w_min > 1.0) {
    throw std::invalid_argument(
        "policy: c*ln^3(w_min)/w_min must be <= 1 so the listen probability "
        "is valid at the smallest window");
  }
}

PacketState make_packet(PacketId id, SlotIndex arrival_slot, const PolicyParams& params) {
  return PacketState{id, params.w_min, arrival_slot, 0, false};
}

double listen_probability(double window, const PolicyParams& params) {
  return params.c * ln_cubed(window) / window;
}

double send_probability_given_listen(double window, const PolicyParams& params) {
  return 1.0 / (params.c * ln_cubed(window));
}

double backoff_window(double window, double c) {
  return window * (1.0 + 1.0 / (c * std::log(window)));
}

double backon_window(double window, double c, double w_min) {
  return std::max(window / (1.0 + 1.0 / (c * std::log(window))), w_min);
}

SlotAction lowsense_decide(const PacketState& state, const PolicyParams& params,
                           SubStream& rng) {
  const double p_listen = listen_probability(state.window, params);
  if (p_listen > 1.0) {
    throw std::invalid_argument("lowsense_decide: listen probability exceeds 1");
  }
  const double u1 = rng.next_double();
  if (u1 >= p_listen) return SlotAction::Sleep;
  const double u2 = rng.next_double();
  return u2 < send_probability_given_listen(state.window, params)
             ? SlotAction::SendAndListen
             : SlotAction::Listen;
}

PacketState lowsense_update(PacketState state, SlotAction action, Feedback fb,
                            const PolicyParams& params) {
  state.accesses += 1;
  switch (fb.ternary) {
    case SlotState::Empty:
      state.window = backon_window(state.window, params.c, params.w_min);
      break;
    case SlotState::Noisy:
      state.window = backoff_window(state.window, params.c);
      break;
    case SlotState::Success:
      if (action == SlotAction::SendAndListen) {
        // Only one packet sends in a successful slot, so it is this one.
        state.done = true;
      } else if (params.success_backoff) {
        state.window = backoff_window(state.window, params.c);
      }
      break;
  }
  return state;
}

BebState make_beb_packet(PacketId id, SlotIndex arrival_slot) {
  BebState s;
  s.id = id;
  s.arrival_slot = arrival_slot;
  return s;
}

SlotAction beb_decide(const BebState& state) {
  return state.offset == state.chosen_slot ? SlotAction::SendAndListen : SlotAction::Sleep;
}

BebState beb_update(BebState state, SlotAction action, const SlotOutcome& outcome,
                    SubStream& rng) {
  if (action == SlotAction::Sleep) {
    state.offset += 1;
    return state;
  }
  state.accesses += 1;
  if (outcome.state == SlotState::Success && outcome.successful_sender == state.id) {
    state.done = true;
    return state;
  }
  // Collided (or jammed) attempt: double the window and redraw.
  state.window *= 2;
  state.offset = 0;
  state.chosen_slot = rng.next_below(state.window);
  return state;
}

SlotAction aloha_decide(double p, SubStream& rng) {
  return rng.next_double() < p ? SlotAction::SendAndListen : SlotAction::Sleep;
}

}  // namespace backofflab
