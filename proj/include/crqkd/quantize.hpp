#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crqkd/bits.hpp"

namespace crqkd {

struct QuantizerConfig {
  double guard_alpha = 0.3;  // guard band half-width in window std units
  // Samples per statistics window. Large windows keep the coupling a sample
  // has with its own window's mean estimate (order 1/block_len between
  // neighbouring bits) below what serial-randomness tests can see.
  std::size_t block_len = 4096;
};

struct QuantizeResult {
  BitString bits;                  // one bit per kept sample, in order
  std::vector<uint8_t> kept_mask;  // one flag per input sample
};

// Per-sample decision against the local window statistics: +1 above the
// guard band, 0 for bit zero below it, -1 inside the band (dropped).
// Constant windows (zero deviation) are dropped entirely.
std::vector<int8_t> classify_samples(const std::vector<double>& samples,
                                     const QuantizerConfig& cfg);

// Guard-band mean/sigma quantizer. Throws InsufficientMaterial when fewer
// than block_len samples are supplied.
QuantizeResult quantize(const std::vector<double>& samples, const QuantizerConfig& cfg);

// Mask intersection both parties perform after publishing kept positions:
// returns each side's bits restricted to the commonly kept samples.
std::pair<BitString, BitString> intersect_kept(const QuantizeResult& a,
                                               const QuantizeResult& b);

// Best-effort hard decisions at externally chosen positions (what an
// eavesdropper extracts once the kept positions are public): sign of the
// deviation from the window mean, with no guard band.
BitString bits_at_positions(const std::vector<double>& samples, std::size_t block_len,
                            const std::vector<uint8_t>& positions_mask);

}  // namespace crqkd
