#include "crqkd/bits.hpp"

#include <stdexcept>

#include "crqkd/rng.hpp"

namespace crqkd {

BitString random_bits(std::size_t n, Rng& rng) {
  BitString out(n);
  for (auto& b : out) b = rng.bit();
  return out;
}

BitString xor_bits(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

std::vector<uint8_t> pack_msb(const BitString& bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

BitString unpack_msb(const std::vector<uint8_t>& bytes, std::size_t n_bits) {
  if (n_bits > bytes.size() * 8) throw std::invalid_argument("unpack_msb: not enough bytes");
  BitString out(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return out;
}

std::string to_01(const BitString& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[i] = '1';
  return s;
}

BitString from_01(const std::string& s) {
  BitString out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("from_01: non-binary character");
    out[i] = static_cast<uint8_t>(s[i] - '0');
  }
  return out;
}

}  // namespace crqkd
