#pragma once

#include <string>
#include <vector>

#include "crqkd/bits.hpp"

namespace crqkd {

struct TestVerdict {
  std::string name;
  double p_value = 0.0;
  bool pass = false;
};

struct RandomnessReport {
  std::vector<TestVerdict> tests;  // monobit, block-frequency, runs
  bool all_pass = false;
};

// Monobit, block-frequency (128-bit blocks) and runs tests at the given
// significance level. Throws InsufficientMaterial below 10^4 bits.
RandomnessReport randomness_tests(const BitString& bits, double alpha = 0.01);

inline constexpr std::size_t kMinRandomnessBits = 10000;
inline constexpr std::size_t kBlockFrequencyLen = 128;

}  // namespace crqkd
