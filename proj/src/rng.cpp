#include "backofflab/rng.hpp"

namespace backofflab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Stafford mix13 finalizer (the splitmix64 output function).
std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t SubStream::next_u64() {
  const std::uint64_t v = mix(key_ + (++counter_) * kGolden);
  return v;
}

double SubStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SubStream::next_below(std::uint64_t n) {
  // Multiply-shift range reduction; the modulo bias is < n / 2^64 and
  // irrelevant at the window sizes used here.
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

SubStream rng_substream(std::uint64_t master_seed, std::uint64_t entity_id) {
  const std::uint64_t key = mix(mix(master_seed) ^ (entity_id * kGolden + 1));
  return SubStream(key);
}

}  // namespace backofflab
