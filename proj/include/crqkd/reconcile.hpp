#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crqkd/bits.hpp"
#include "crqkd/polar.hpp"

namespace crqkd {

struct ReconcileConfig {
  std::size_t block_len = 1024;    // inner codeword length (power of two)
  std::size_t syndrome_len = 640;  // bits disclosed per block and round (n - k)
  double design_epsilon = 0.12;    // construction point of the inner code
  double epsilon_hint = 0.05;      // channel estimate used for decoding
  int max_rounds = 3;              // block retries, each under a fresh interleave

  std::size_t info_len() const { return block_len - syndrome_len; }
  // One syndrome message for one block: syndrome bits plus the block check.
  std::size_t syndrome_message_bits() const { return syndrome_len + 32; }
};

// Rate table fitted against the decoder: the largest disclosure that still
// corrects reliably at the given disagreement estimate.
ReconcileConfig reconcile_config_for(double epsilon_estimate);

struct ReconcileResult {
  BitString corrected;
  std::size_t leaked_bits = 0;  // total syndrome-message bits disclosed
  bool success = false;
};

// Reference side of the syndrome exchange. It discloses, per requested
// block and round, the frozen-set image of the (interleaved) block plus a
// CRC-32 check, and keeps the leakage tally.
class SyndromeSource {
 public:
  SyndromeSource(BitString reference, const ReconcileConfig& cfg, uint64_t session_seed);

  struct BlockMessage {
    BitString syndrome;  // cfg.syndrome_len bits
    uint32_t check = 0;  // CRC-32 of the padded reference block
  };
  BlockMessage block_message(std::size_t block, int round);

  const ReconcileConfig& config() const { return cfg_; }
  uint64_t session_seed() const { return seed_; }
  std::size_t n_blocks() const { return n_blocks_; }
  std::size_t source_length() const { return length_; }
  std::size_t leaked_bits() const { return leaked_bits_; }
  std::size_t messages_sent() const { return messages_; }
  uint64_t reference_digest() const;
  const BitString& reference() const { return reference_; }

 private:
  ReconcileConfig cfg_;
  uint64_t seed_;
  BitString reference_;  // zero-padded to a whole number of blocks
  std::size_t length_;   // unpadded length
  std::size_t n_blocks_;
  PolarCode code_;
  std::size_t leaked_bits_ = 0;
  std::size_t messages_ = 0;
};

// Corrects `local` toward the source's reference string. Success requires
// every block to pass its check and the final 64-bit key verification.
ReconcileResult reconcile(const BitString& local, SyndromeSource& remote);

// Deterministic interleave shared by both ends of a block round.
std::vector<uint32_t> block_permutation(std::size_t n, uint64_t session_seed,
                                        std::size_t block, int round);

}  // namespace crqkd
