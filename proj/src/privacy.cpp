#include "crqkd/privacy.hpp"

#include <bit>

#include "crqkd/errors.hpp"
#include "crqkd/rng.hpp"

namespace crqkd {

std::size_t amplified_len(std::size_t input_len, std::size_t leaked_bits, std::size_t margin) {
  std::size_t spent = leaked_bits + margin;
  return input_len > spent ? input_len - spent : 0;
}

BitString privacy_amplify(const BitString& bits, std::size_t leaked_bits,
                          std::size_t out_len, uint64_t seed, std::size_t margin) {
  if (out_len > amplified_len(bits.size(), leaked_bits, margin))
    throw InsufficientEntropy("privacy_amplify: requested output exceeds distillable length");
  if (out_len == 0) return {};

  std::size_t in_len = bits.size();
  std::size_t n_words = (in_len + 63) / 64;

  // Pack the input LSB-first per word so bit j of the string is bit (j % 64)
  // of word j/64.
  std::vector<uint64_t> x(n_words, 0);
  for (std::size_t j = 0; j < in_len; ++j)
    if (bits[j]) x[j / 64] |= 1ULL << (j % 64);

  // Toeplitz diagonal generator: out_len + in_len - 1 seeded bits, packed the
  // same way with one spare word so shifted windows never read past the end.
  std::size_t g_bits = out_len + in_len - 1;
  std::vector<uint64_t> g((g_bits + 63) / 64 + 1, 0);
  Rng rng(splitmix64(seed ^ 0x746f65706cULL));
  for (std::size_t j = 0; j < g_bits; ++j)
    if (rng.bit()) g[j / 64] |= 1ULL << (j % 64);

  BitString out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    // Row i of the Toeplitz matrix is g[i .. i+in_len-1].
    std::size_t word = i / 64, shift = i % 64;
    uint64_t acc = 0;
    for (std::size_t w = 0; w < n_words; ++w) {
      uint64_t row = g[word + w] >> shift;
      if (shift) row |= g[word + w + 1] << (64 - shift);
      acc ^= row & x[w];
    }
    out[i] = static_cast<uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

}  // namespace crqkd
