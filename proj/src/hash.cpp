#include "crqkd/hash.hpp"

#include <array>

namespace crqkd {

namespace {

// Carry-less multiplication in GF(2^64), reduction polynomial
// x^64 + x^4 + x^3 + x + 1.
uint64_t gf64_mul(uint64_t a, uint64_t b) {
  uint64_t r = 0;
  while (b) {
    if (b & 1u) r ^= a;
    uint64_t hi = a >> 63;
    a <<= 1;
    if (hi) a ^= 0x1bULL;
    b >>= 1;
  }
  return r;
}

// Fixed public evaluation point (odd, full-width).
constexpr uint64_t kPoint = 0x9e3779b97f4a7c15ULL | 1ULL;

const std::array<uint32_t, 256>& crc_table() {
  static const std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

}  // namespace

uint64_t hash64(const BitString& bits, uint64_t salt) {
  auto bytes = pack_msb(bits);
  uint64_t h = salt ^ 0x6a09e667f3bcc908ULL;
  std::size_t i = 0;
  while (i + 8 <= bytes.size()) {
    uint64_t block = 0;
    for (int j = 0; j < 8; ++j) block = (block << 8) | bytes[i + j];
    h = gf64_mul(h ^ block, kPoint);
    i += 8;
  }
  if (i < bytes.size()) {
    uint64_t block = 0;
    for (; i < bytes.size(); ++i) block = (block << 8) | bytes[i];
    h = gf64_mul(h ^ block, kPoint);
  }
  // Length mixing keeps prefix-padded inputs distinct.
  h = gf64_mul(h ^ static_cast<uint64_t>(bits.size()), kPoint);
  return h;
}

BitString hash64_bits(const BitString& bits, uint64_t salt) {
  uint64_t h = hash64(bits, salt);
  BitString out(64);
  for (int i = 0; i < 64; ++i) out[i] = (h >> (63 - i)) & 1u;
  return out;
}

bool verify_keys(const BitString& a, const BitString& b) {
  return hash64(a) == hash64(b);
}

uint32_t crc32(const uint8_t* data, std::size_t len) {
  const auto& t = crc_table();
  uint32_t c = 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) c = t[(c ^ data[i]) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

uint32_t crc32_bits(const BitString& bits) {
  auto bytes = pack_msb(bits);
  return crc32(bytes.data(), bytes.size());
}

}  // namespace crqkd
