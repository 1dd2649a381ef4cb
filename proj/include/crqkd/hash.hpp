#pragma once

#include <cstdint>

#include "crqkd/bits.hpp"

namespace crqkd {

// Polynomial evaluation hash over GF(2^64). Distinct inputs collide with
// probability <= (len/64 + 2) / 2^64 over the evaluation point, which the
// key-verification protocol treats as the 2^-64 comparison bound.
uint64_t hash64(const BitString& bits, uint64_t salt = 0);

// 64-bit digest as a BitString, MSB first.
BitString hash64_bits(const BitString& bits, uint64_t salt = 0);

// True iff both parties' digests agree. Equal inputs always verify; unequal
// inputs fail except with collision probability ~2^-64.
bool verify_keys(const BitString& a, const BitString& b);

// CRC-32 (IEEE reflected polynomial), used by the wire frames and the
// per-block checks of the reconciliation protocol.
uint32_t crc32(const uint8_t* data, std::size_t len);
uint32_t crc32_bits(const BitString& bits);

}  // namespace crqkd
