#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crqkd {

// Deterministic random source. Every random draw in the simulator flows
// through an explicitly seeded instance; there is no ambient randomness.
// derive() spawns an independent substream from a label, so adding or
// reordering one consumer does not shift the draws seen by another.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  uint8_t bit();
  double uniform();             // [0, 1)
  bool bernoulli(double p);
  double gaussian();            // standard normal (Box-Muller, cached pair)
  uint64_t below(uint64_t bound);

  Rng derive(std::string_view label, uint64_t index = 0) const;
  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
  double cached_gauss_ = 0.0;
  bool have_cached_ = false;
};

uint64_t splitmix64(uint64_t x);

}  // namespace crqkd
