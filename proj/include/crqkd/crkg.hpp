#pragma once

#include <cstdint>
#include <optional>

#include "crqkd/bits.hpp"
#include "crqkd/channel.hpp"
#include "crqkd/quantize.hpp"
#include "crqkd/reconcile.hpp"

namespace crqkd {

// Key disagreement rate: Hamming distance over length. Throws on empty or
// mismatched inputs.
double kdr(const BitString& a, const BitString& b);

enum class CrkgMode { reconciled, raw };

struct CrkgStats {
  std::size_t probes = 0;
  std::size_t common_kept = 0;   // samples surviving both guard bands
  double epsilon_q = 0.0;        // disagreement of the quantized sequences
  std::size_t leaked_bits = 0;   // syndrome disclosure (reconciled mode)
  std::size_t messages = 0;      // syndrome messages exchanged
  bool success = true;
};

struct CrkgOutput {
  BitString key_qap;        // mode-dependent product (final key or raw bits)
  BitString key_user;
  BitString quantized_qap;  // post-intersection sequences, both modes
  BitString quantized_user;
  CrkgStats stats;
};

// Eavesdropper view of one pipeline run: her hard decisions at the positions
// both legitimate parties kept and, in reconciled mode, the key she obtains
// by replaying the public syndrome/amplification transcript on them.
struct EveView {
  BitString bits_at_common;
  BitString final_key_attempt;
};

// Preprocessing both parties apply to their probe amplitudes before
// quantization: differences of non-overlapping probe pairs. The differences
// are exactly symmetric around zero, so the quantized bits are unbiased and
// serially independent, which the randomness requirements on raw keys need.
std::vector<double> preprocess_amplitudes(const std::vector<double>& amps);

// Runs channel probing, differential preprocessing, quantization, mask
// intersection and, in reconciled mode, syndrome reconciliation plus privacy
// amplification and verification. Raw mode returns the two post-intersection
// sequences untouched, which is what the simplified forwarding mechanism
// consumes.
//
// The QAP side measures amp_forward, the user side amp_backward; both apply
// the same quantizer and exchange kept positions in the clear.
CrkgOutput run_crkg(ChannelState& channel, std::size_t n_probes, const QuantizerConfig& qc,
                    CrkgMode mode, Rng& rng,
                    const std::optional<ReconcileConfig>& reconcile_cfg = std::nullopt,
                    std::size_t margin = 64, EveView* eve = nullptr);

}  // namespace crqkd
