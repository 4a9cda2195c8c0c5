#pragma once

#include <cstdint>

namespace backofflab {

// Counter-based pseudorandom stream: output k is a strong mix of
// (key, k), so streams never share draws and inserting a new entity
// never shifts another entity's sequence. Runs are reproducible from
// (master_seed, entity_id) alone.
class SubStream {
 public:
  SubStream() = default;
  explicit SubStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  // Uniform in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n);

  // Number of draws consumed so far.
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Entity-id namespaces for the per-run substreams. Packets use their own
// sequential ids; adversary streams live in a reserved range so packet
// injection can never perturb adversary randomness (and vice versa).
inline constexpr std::uint64_t kArrivalEntity = (1ull << 62) + 1;
inline constexpr std::uint64_t kAdaptiveJamEntity = (1ull << 62) + 2;
inline constexpr std::uint64_t kReactiveJamEntity = (1ull << 62) + 3;

SubStream rng_substream(std::uint64_t master_seed, std::uint64_t entity_id);

}  // namespace backofflab
