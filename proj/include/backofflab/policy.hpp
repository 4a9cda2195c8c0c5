#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "backofflab/channel.hpp"
#include "backofflab/rng.hpp"

namespace backofflab {

enum class PolicyKind { LowSense, Beb, Aloha };

// Parameters of the window-driven low-sensing policy. A packet with window
// w listens with probability c*ln^3(w)/w and, conditioned on listening,
// sends with probability 1/(c*ln^3(w)); the net send probability is 1/w.
//
// Validity needs c*ln^3(w_min)/w_min <= 1 and w_min >= e^3: the map
// w -> c*ln^3(w)/w is nonincreasing for w >= e^3, so the constraint at
// w_min covers every reachable window.
struct PolicyParams {
  double c = 1.0;
  double w_min = 128.0;
  // A non-sending listener that hears a successful slot treats it as a
  // full slot and backs off. Disable to make it a no-op instead
  // (sensitivity runs only).
  bool success_backoff = true;

  void validate() const;
};

struct PacketState {
  PacketId id = 0;
  double window = 0.0;  // current window size, >= w_min
  SlotIndex arrival_slot = 0;
  std::uint64_t accesses = 0;  // slots with a non-Sleep action
  bool done = false;
};

PacketState make_packet(PacketId id, SlotIndex arrival_slot, const PolicyParams& params);

double listen_probability(double window, const PolicyParams& params);
double send_probability_given_listen(double window, const PolicyParams& params);

// Multiplicative step 1 + 1/(c*ln(w)) applied on channel observations.
double backoff_window(double window, double c);              // heard full/noisy
double backon_window(double window, double c, double w_min); // heard silence, floored

// Draw-count contract: consumes exactly two uniform draws when the listen
// coin succeeds and one otherwise, so traces replay identically regardless
// of branch outcomes.
SlotAction lowsense_decide(const PacketState& state, const PolicyParams& params, SubStream& rng);

// Applies the observed feedback. `action` must be the action the packet
// took this slot (the feedback exists, so it was not Sleep). A sender that
// hears Success is the successful sender and departs; any other observer
// of a full slot backs off, and an observer of silence backs on.
PacketState lowsense_update(PacketState state, SlotAction action, Feedback fb,
                            const PolicyParams& params);

// Binary exponential backoff baseline: pick one slot uniformly in the
// current window, send there, double the window on a collision. Oblivious:
// never listens except when sending.
struct BebState {
  PacketId id = 0;
  SlotIndex arrival_slot = 0;
  std::uint64_t window = 1;
  std::uint64_t offset = 0;       // position within the current window
  std::uint64_t chosen_slot = 0;  // uniform in [0, window)
  std::uint64_t accesses = 0;
  bool done = false;
};

BebState make_beb_packet(PacketId id, SlotIndex arrival_slot);

SlotAction beb_decide(const BebState& state);

// Advances the within-window position; on a collided send doubles the
// window and redraws the slot (one uniform draw, none otherwise).
BebState beb_update(BebState state, SlotAction action, const SlotOutcome& outcome,
                    SubStream& rng);

// Fixed-probability baseline: SendAndListen with probability p, else Sleep.
SlotAction aloha_decide(double p, SubStream& rng);

}  // namespace backofflab
