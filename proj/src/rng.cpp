#include "crqkd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crqkd {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

uint64_t Rng::next_u64() { return gen_(); }

uint8_t Rng::bit() { return static_cast<uint8_t>(gen_() >> 63); }

double Rng::uniform() {
  // 53-bit mantissa, [0, 1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_gauss_;
  }
  // Box-Muller; hand-rolled so that streams are identical across standard
  // library implementations.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * uniform();
  cached_gauss_ = r * std::sin(theta);
  have_cached_ = true;
  return r * std::cos(theta);
}

uint64_t Rng::below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection sampling over the smallest covering power-of-two range.
  uint64_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  uint64_t v;
  do {
    v = gen_() & mask;
  } while (v >= bound);
  return v;
}

Rng Rng::derive(std::string_view label, uint64_t index) const {
  uint64_t h = fnv1a64(label);
  uint64_t child = splitmix64(seed_ ^ splitmix64(h + 0x9e3779b97f4a7c15ULL * (index + 1)));
  return Rng(child);
}

}  // namespace crqkd
