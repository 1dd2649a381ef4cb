#include "crqkd/crkg.hpp"

#include <stdexcept>

#include "crqkd/errors.hpp"
#include "crqkd/hash.hpp"
#include "crqkd/privacy.hpp"

namespace crqkd {

double kdr(const BitString& a, const BitString& b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("kdr: sequences must be equal-length and non-empty");
  return static_cast<double>(hamming_distance(a, b)) / static_cast<double>(a.size());
}

std::vector<double> preprocess_amplitudes(const std::vector<double>& amps) {
  std::vector<double> out(amps.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amps[2 * i + 1] - amps[2 * i];
  return out;
}

CrkgOutput run_crkg(ChannelState& channel, std::size_t n_probes, const QuantizerConfig& qc,
                    CrkgMode mode, Rng& rng,
                    const std::optional<ReconcileConfig>& reconcile_cfg,
                    std::size_t margin, EveView* eve) {
  if (n_probes / 2 < qc.block_len)
    throw InsufficientMaterial("run_crkg: need at least one quantizer window of probe pairs");

  std::vector<double> amp_qap(n_probes), amp_user(n_probes), amp_eve(n_probes);
  for (std::size_t i = 0; i < n_probes; ++i) {
    ChannelProbe p = channel.probe();
    amp_qap[i] = p.amp_forward;
    amp_user[i] = p.amp_backward;
    amp_eve[i] = p.amp_eve;
  }
  std::vector<double> d_qap = preprocess_amplitudes(amp_qap);
  std::vector<double> d_user = preprocess_amplitudes(amp_user);
  std::vector<double> d_eve = preprocess_amplitudes(amp_eve);
  std::size_t n_samples = d_qap.size();

  QuantizeResult q_qap = quantize(d_qap, qc);
  QuantizeResult q_user = quantize(d_user, qc);
  auto [bits_qap, bits_user] = intersect_kept(q_qap, q_user);

  CrkgOutput out;
  out.stats.probes = n_probes;
  out.stats.common_kept = bits_qap.size();
  out.stats.epsilon_q = bits_qap.empty() ? 0.0 : kdr(bits_qap, bits_user);

  if (eve) {
    std::vector<uint8_t> common(n_samples, 0);
    for (std::size_t i = 0; i < n_samples; ++i)
      common[i] = q_qap.kept_mask[i] && q_user.kept_mask[i];
    eve->bits_at_common = bits_at_positions(d_eve, qc.block_len, common);
  }

  out.quantized_qap = bits_qap;
  out.quantized_user = bits_user;

  if (mode == CrkgMode::raw) {
    out.key_qap = std::move(bits_qap);
    out.key_user = std::move(bits_user);
    return out;
  }

  ReconcileConfig rc = reconcile_cfg ? *reconcile_cfg : reconcile_config_for(out.stats.epsilon_q);
  uint64_t session = rng.next_u64();
  SyndromeSource source(bits_qap, rc, session);
  ReconcileResult rec = reconcile(bits_user, source);
  out.stats.leaked_bits = rec.leaked_bits;
  out.stats.messages = source.messages_sent();

  if (!rec.success) {
    out.stats.success = false;
    return out;  // keys withheld on verification failure
  }

  std::size_t out_len = amplified_len(bits_qap.size(), rec.leaked_bits, margin);
  uint64_t pa_seed = rng.next_u64();  // public amplification seed
  out.key_qap = privacy_amplify(bits_qap, rec.leaked_bits, out_len, pa_seed, margin);
  out.key_user = privacy_amplify(rec.corrected, rec.leaked_bits, out_len, pa_seed, margin);
  out.stats.success = verify_keys(out.key_qap, out.key_user);
  if (!out.stats.success) {
    out.key_qap.clear();
    out.key_user.clear();
    return out;
  }

  if (eve && out_len > 0) {
    // Eve hears the same syndromes and the amplification seed; replaying the
    // transcript on her own estimates is her best effort at the final key.
    SyndromeSource replay(out.quantized_qap, rc, session);
    ReconcileResult eve_rec = reconcile(eve->bits_at_common, replay);
    eve->final_key_attempt =
        privacy_amplify(eve_rec.corrected, rec.leaked_bits, out_len, pa_seed, margin);
  }
  return out;
}

}  // namespace crqkd
