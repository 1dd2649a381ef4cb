#pragma once

#include <cstdint>

#include "crqkd/bits.hpp"

namespace crqkd {

inline constexpr std::size_t kSecurityMargin = 64;

// Seeded binary Toeplitz hash. The precondition
//   out_len <= bits.size() - leaked_bits - margin
// discounts everything disclosed during reconciliation plus a fixed margin
// for the verification digests; violations throw InsufficientEntropy.
BitString privacy_amplify(const BitString& bits, std::size_t leaked_bits,
                          std::size_t out_len, uint64_t seed,
                          std::size_t margin = kSecurityMargin);

// Largest admissible output length for the given input (0 when exhausted).
std::size_t amplified_len(std::size_t input_len, std::size_t leaked_bits,
                          std::size_t margin = kSecurityMargin);

}  // namespace crqkd
