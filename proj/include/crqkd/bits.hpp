#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace crqkd {

// One bit per element, values 0 or 1. All key material in the simulator
// (quantum keys, channel keys, pads, syndromes) is carried in this form.
using BitString = std::vector<uint8_t>;

class Rng;

BitString random_bits(std::size_t n, Rng& rng);

// Bitwise XOR; throws std::invalid_argument on length mismatch.
BitString xor_bits(const BitString& a, const BitString& b);

std::size_t hamming_distance(const BitString& a, const BitString& b);

// MSB-first packing; the last byte is zero-padded on the right.
std::vector<uint8_t> pack_msb(const BitString& bits);
BitString unpack_msb(const std::vector<uint8_t>& bytes, std::size_t n_bits);

std::string to_01(const BitString& bits);
BitString from_01(const std::string& s);

}  // namespace crqkd
