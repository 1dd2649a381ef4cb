#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "crqkd/bits.hpp"
#include "crqkd/keygroup.hpp"
#include "crqkd/polar.hpp"

namespace crqkd {

inline constexpr std::size_t kDigestBits = 64;  // embedded verification digest

struct SimplifiedStats {
  std::size_t attempts = 0;
  std::size_t failures = 0;
  std::size_t pad_bits_used = 0;
  double residual_epsilon = 0.0;  // accumulated measured pad disagreement
  std::size_t epsilon_samples = 0;

  double rr() const { return attempts ? static_cast<double>(failures) / attempts : 0.0; }
  double mean_residual_epsilon() const {
    return epsilon_samples ? residual_epsilon / epsilon_samples : 0.0;
  }
};

// Aligned non-reconciled channel-key bits at both ends of one wireless link
// (plus the eavesdropper's estimates at the same positions). Bits are
// consumed monotonically; every pad bit is used at most once, including
// across retransmissions.
struct PadPair {
  BitString qap;
  BitString user;
  BitString eve;
  std::size_t cursor = 0;

  std::size_t remaining() const { return qap.size() - cursor; }
  void append(const BitString& q, const BitString& u, const BitString& e);
};

// Key bits carried by one codeword (the rest of the info field is digest).
std::size_t simplified_payload_bits(const EccConfig& cfg);

// Systematic polar encoding of exactly k info bits.
BitString ecc_encode(const BitString& info, const EccConfig& cfg);

// One codeword transmission: group bits truncated/padded to the payload
// width, digest appended, encoded, XORed with fresh QAP-side pad bits
// (consumed from the cursor).
BitString forward_simplified(const KeyGroup& q_group, PadPair& pads, const EccConfig& cfg,
                             const PolarCode& code);

struct CascadeDecode {
  BitString info;      // payload bits (digest stripped)
  bool ok = false;
  double measured_epsilon = 0.0;  // pad disagreement implied by the decode
};

// User side of the equivalent cascade channel: XOR with own pad bits gives a
// BSC(epsilon_q) view of the codeword; SC decoding plus the embedded digest
// decides success.
CascadeDecode decode_cascade(const BitString& received, const BitString& pad_user,
                             double epsilon_hat, const EccConfig& cfg, const PolarCode& code);

// Requests more pad material; returns false when the source is exhausted.
using PadRefill = std::function<bool(PadPair&, std::size_t min_bits)>;

struct TransmissionRecord {
  std::size_t pad_cursor = 0;  // pad offset the codeword was XORed at
  BitString transmitted;       // what went over the air
  BitString codeword;          // underlying codeword (for audit/Eve analysis)
};

struct GroupDelivery {
  KeyGroup recovered;   // empty bits when undelivered
  bool delivered = false;
  std::size_t attempts = 0;  // codeword transmissions spent on this group
  std::vector<TransmissionRecord> log;
};

// Delivers one group chunk by chunk, retransmitting failed chunks with fresh
// pad bits until ok or the attempt budget is spent. epsilon_hat adapts from
// the disagreement measured on successful decodes.
GroupDelivery retransmit_loop(const KeyGroup& group, PadPair& pads, const EccConfig& cfg,
                              const PolarCode& code, int max_attempts, SimplifiedStats& stats,
                              double& epsilon_hat, const PadRefill& refill = {});

}  // namespace crqkd
