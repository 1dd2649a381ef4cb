#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crqkd/bits.hpp"
#include "crqkd/hash.hpp"
#include "crqkd/rng.hpp"

namespace crqkd {

enum class Basis : uint8_t { rectilinear = 0, diagonal = 1 };

struct QubitRecord {
  uint8_t bit = 0;
  Basis basis = Basis::rectilinear;
  bool detected = true;
};

struct QkdConfig {
  std::size_t n_qubits = 100000;
  double detection_prob = 1.0;
  double channel_flip_prob = 0.0;
  bool eve_active = false;
  double test_fraction = 0.5;        // share of sifted bits published for detection
  double qber_abort_threshold = 0.11;
};

struct QkdOutcome {
  BitString key;  // identical on both sides when not aborted
  double qber_estimate = 0.0;
  bool aborted = false;
  std::size_t sifted_len = 0;
  std::size_t leaked_bits = 0;  // detection-test bits + reconciliation disclosure
};

std::vector<QubitRecord> prepare_qubits(std::size_t n, Rng& rng);

struct EveTap {
  std::vector<QubitRecord> resent;
  BitString measured;  // kept for cracking-rate analysis
};

// Intercept-resend: measure each qubit in a fresh random basis and re-prepare
// it in that basis with the measured value.
EveTap eve_intercept_resend(const std::vector<QubitRecord>& in_flight, Rng& rng);

// Receiver side: loss, fresh measurement basis, channel flips on matching
// bases, coin flip otherwise. The input may already be Eve-disturbed.
std::vector<QubitRecord> transmit_and_measure(const std::vector<QubitRecord>& sent,
                                              const QkdConfig& cfg, Rng& rng);

// Keep positions that are detected and basis-coincident, in order.
std::pair<BitString, BitString> sift(const std::vector<QubitRecord>& sender,
                                     const std::vector<QubitRecord>& receiver);

struct DetectionResult {
  double qber = 0.0;
  bool aborted = false;
  BitString remaining_a;
  BitString remaining_b;
  std::size_t disclosed_bits = 0;
};

DetectionResult detect_eavesdropping(const BitString& a, const BitString& b,
                                     double test_fraction, double threshold, Rng& rng);

// Reconciliation + privacy amplification + verification over the surviving
// bits; shares the crkg_pipeline distillation primitives.
QkdOutcome distill_qkd_key(const BitString& a, const BitString& b, double qber, Rng& rng);

// Full protocol run between the two QAPs. eve_out, when non-null, receives
// the eavesdropper's measurement record of an active tap.
QkdOutcome run_qkd(const QkdConfig& cfg, Rng rng, EveTap* eve_out = nullptr);

void validate(const QkdConfig& cfg);

}  // namespace crqkd
