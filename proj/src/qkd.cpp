#include "crqkd/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crqkd/errors.hpp"
#include "crqkd/privacy.hpp"
#include "crqkd/reconcile.hpp"

namespace crqkd {

void validate(const QkdConfig& cfg) {
  if (cfg.n_qubits < 1) throw std::invalid_argument("QkdConfig: n_qubits must be >= 1");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(cfg.detection_prob) || !prob_ok(cfg.channel_flip_prob) ||
      !prob_ok(cfg.qber_abort_threshold))
    throw std::invalid_argument("QkdConfig: probabilities must lie in [0,1]");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw std::invalid_argument("QkdConfig: test_fraction must lie in (0,1)");
}

std::vector<QubitRecord> prepare_qubits(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("prepare_qubits: n must be >= 1");
  std::vector<QubitRecord> out(n);
  for (auto& q : out) {
    q.bit = rng.bit();
    q.basis = rng.bit() ? Basis::diagonal : Basis::rectilinear;
    q.detected = true;
  }
  return out;
}

EveTap eve_intercept_resend(const std::vector<QubitRecord>& in_flight, Rng& rng) {
  EveTap tap;
  tap.resent.reserve(in_flight.size());
  tap.measured.reserve(in_flight.size());
  for (const auto& q : in_flight) {
    Basis eve_basis = rng.bit() ? Basis::diagonal : Basis::rectilinear;
    uint8_t measured = (eve_basis == q.basis) ? q.bit : rng.bit();
    tap.measured.push_back(measured);
    tap.resent.push_back(QubitRecord{measured, eve_basis, q.detected});
  }
  return tap;
}

std::vector<QubitRecord> transmit_and_measure(const std::vector<QubitRecord>& sent,
                                              const QkdConfig& cfg, Rng& rng) {
  if (sent.empty()) throw std::invalid_argument("transmit_and_measure: empty input");
  std::vector<QubitRecord> out(sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    QubitRecord r;
    r.basis = rng.bit() ? Basis::diagonal : Basis::rectilinear;
    if (!sent[i].detected || !rng.bernoulli(cfg.detection_prob)) {
      r.detected = false;
      out[i] = r;
      continue;
    }
    r.detected = true;
    if (r.basis == sent[i].basis) {
      r.bit = sent[i].bit;
      if (cfg.channel_flip_prob > 0.0 && rng.bernoulli(cfg.channel_flip_prob)) r.bit ^= 1;
    } else {
      r.bit = rng.bit();
    }
    out[i] = r;
  }
  return out;
}

std::pair<BitString, BitString> sift(const std::vector<QubitRecord>& sender,
                                     const std::vector<QubitRecord>& receiver) {
  if (sender.size() != receiver.size())
    throw std::invalid_argument("sift: length mismatch");
  BitString a, b;
  for (std::size_t i = 0; i < sender.size(); ++i) {
    if (receiver[i].detected && sender[i].basis == receiver[i].basis) {
      a.push_back(sender[i].bit);
      b.push_back(receiver[i].bit);
    }
  }
  return {std::move(a), std::move(b)};
}

DetectionResult detect_eavesdropping(const BitString& a, const BitString& b,
                                     double test_fraction, double threshold, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("detect_eavesdropping: length mismatch");
  if (a.size() < 10)
    throw InsufficientMaterial("detect_eavesdropping: fewer than 10 sifted bits");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("detect_eavesdropping: test_fraction must lie in (0,1)");

  std::size_t n = a.size();
  std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  // Partial Fisher-Yates: the first n_test entries are the published sample.
  std::vector<uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < n_test; ++i) {
    std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }

  std::size_t errors = 0;
  std::vector<uint8_t> is_test(n, 0);
  for (std::size_t i = 0; i < n_test; ++i) {
    is_test[idx[i]] = 1;
    errors += a[idx[i]] != b[idx[i]];
  }

  DetectionResult res;
  res.qber = static_cast<double>(errors) / static_cast<double>(n_test);
  res.aborted = res.qber > threshold;
  res.disclosed_bits = n_test;
  res.remaining_a.reserve(n - n_test);
  res.remaining_b.reserve(n - n_test);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_test[i]) {
      res.remaining_a.push_back(a[i]);
      res.remaining_b.push_back(b[i]);
    }
  }
  return res;
}

QkdOutcome distill_qkd_key(const BitString& a, const BitString& b, double qber, Rng& rng) {
  QkdOutcome out;
  out.qber_estimate = qber;
  out.sifted_len = a.size();
  if (a.size() != b.size()) throw std::invalid_argument("distill_qkd_key: length mismatch");
  if (a.empty()) {
    out.aborted = true;
    return out;
  }

  ReconcileConfig rc = reconcile_config_for(qber);
  uint64_t session = rng.next_u64();
  SyndromeSource source(a, rc, session);
  ReconcileResult rec = reconcile(b, source);
  out.leaked_bits = rec.leaked_bits;
  if (!rec.success) {
    out.aborted = true;  // both sides discard
    return out;
  }

  std::size_t out_len = amplified_len(a.size(), rec.leaked_bits, kSecurityMargin);
  uint64_t pa_seed = rng.next_u64();
  BitString key_a = privacy_amplify(a, rec.leaked_bits, out_len, pa_seed);
  BitString key_b = privacy_amplify(rec.corrected, rec.leaked_bits, out_len, pa_seed);
  if (!verify_keys(key_a, key_b)) {
    out.aborted = true;
    return out;
  }
  out.key = std::move(key_a);
  return out;
}

QkdOutcome run_qkd(const QkdConfig& cfg, Rng rng, EveTap* eve_out) {
  validate(cfg);
  Rng rng_prep = rng.derive("qkd/prepare");
  Rng rng_eve = rng.derive("qkd/eve");
  Rng rng_meas = rng.derive("qkd/measure");
  Rng rng_detect = rng.derive("qkd/detect");
  Rng rng_distill = rng.derive("qkd/distill");

  auto sent = prepare_qubits(cfg.n_qubits, rng_prep);
  std::vector<QubitRecord> in_flight;
  if (cfg.eve_active) {
    EveTap tap = eve_intercept_resend(sent, rng_eve);
    if (eve_out) *eve_out = tap;
    in_flight = std::move(tap.resent);
  } else {
    in_flight = sent;
  }
  auto measured = transmit_and_measure(in_flight, cfg, rng_meas);
  auto [sift_a, sift_b] = sift(sent, measured);

  QkdOutcome out;
  out.sifted_len = sift_a.size();
  if (sift_a.size() < 10) {
    out.aborted = true;
    return out;
  }

  DetectionResult det = detect_eavesdropping(sift_a, sift_b, cfg.test_fraction,
                                             cfg.qber_abort_threshold, rng_detect);
  out.qber_estimate = det.qber;
  out.leaked_bits = det.disclosed_bits;
  if (det.aborted) {
    out.aborted = true;
    return out;
  }
  if (det.remaining_a.size() < 10) {
    out.aborted = true;
    return out;
  }

  QkdOutcome distilled = distill_qkd_key(det.remaining_a, det.remaining_b, det.qber, rng_distill);
  out.key = std::move(distilled.key);
  out.aborted = distilled.aborted;
  out.leaked_bits += distilled.leaked_bits;
  return out;
}

}  // namespace crqkd
