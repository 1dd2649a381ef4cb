#include <doctest.h>

#include "crqkd/errors.hpp"
#include "crqkd/privacy.hpp"
#include "crqkd/qkd.hpp"

using namespace crqkd;

namespace {

BitString flip_fraction(const BitString& in, double frac, Rng& rng) {
  BitString out = in;
  auto n_flips = static_cast<std::size_t>(frac * in.size());
  std::vector<std::size_t> idx(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n_flips; ++i) {
    std::size_t j = i + rng.below(in.size() - i);
    std::swap(idx[i], idx[j]);
    out[idx[i]] ^= 1;
  }
  return out;
}

}  // namespace

TEST_SUITE("qkd") {

TEST_CASE("prepare_qubits: determinism, fairness, precondition") {
  Rng a(9), b(9);
  auto qa = prepare_qubits(4, a);
  auto qb = prepare_qubits(4, b);
  for (int i = 0; i < 4; ++i) {
    CHECK(qa[i].bit == qb[i].bit);
    CHECK(qa[i].basis == qb[i].basis);
  }

  Rng rng(123);
  auto qs = prepare_qubits(100000, rng);
  std::size_t diag = 0;
  for (const auto& q : qs) diag += q.basis == Basis::diagonal;
  double frac = static_cast<double>(diag) / qs.size();
  CHECK(frac >= 0.49);
  CHECK(frac <= 0.51);

  CHECK_THROWS_AS(prepare_qubits(0, rng), std::invalid_argument);
}

TEST_CASE("transmit_and_measure: noiseless identity on matching bases") {
  Rng rng(21);
  auto sent = prepare_qubits(20000, rng);
  QkdConfig cfg;
  cfg.detection_prob = 1.0;
  cfg.channel_flip_prob = 0.0;
  auto got = transmit_and_measure(sent, cfg, rng);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) {
    CHECK(got[i].detected);
    if (got[i].basis == sent[i].basis) {
      ++matched;
      CHECK(got[i].bit == sent[i].bit);  // exact on every matching pair
    }
  }
  CHECK(matched > 9000);
}

TEST_CASE("transmit_and_measure: total loss and empty input") {
  Rng rng(22);
  auto sent = prepare_qubits(1000, rng);
  QkdConfig cfg;
  cfg.detection_prob = 0.0;
  for (const auto& q : transmit_and_measure(sent, cfg, rng)) CHECK_FALSE(q.detected);
  CHECK_THROWS_AS(transmit_and_measure({}, cfg, rng), std::invalid_argument);
}

TEST_CASE("eve_intercept_resend: matched basis is transparent, empty passes through") {
  Rng rng(23);
  auto sent = prepare_qubits(5000, rng);
  EveTap tap = eve_intercept_resend(sent, rng);
  REQUIRE(tap.resent.size() == sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    if (tap.resent[i].basis == sent[i].basis) {
      CHECK(tap.resent[i].bit == sent[i].bit);
      CHECK(tap.measured[i] == sent[i].bit);
    }
  }
  CHECK(eve_intercept_resend({}, rng).resent.empty());
}

TEST_CASE("intercept-resend pushes sifted QBER to one quarter") {
  // Oracle: over the 2x2 basis combinations, Eve guesses wrong with
  // probability 1/2, and a wrong re-preparation flips the received bit with
  // probability 1/2, so the sifted error rate is 1/4.
  Rng rng(31);
  auto sent = prepare_qubits(100000, rng);
  EveTap tap = eve_intercept_resend(sent, rng);
  QkdConfig cfg;
  auto got = transmit_and_measure(tap.resent, cfg, rng);
  auto [a, b] = sift(sent, got);
  REQUIRE(a.size() > 40000);
  double qber = static_cast<double>(hamming_distance(a, b)) / a.size();
  CHECK(qber >= 0.24);
  CHECK(qber <= 0.26);
}

TEST_CASE("sift: trivial and statistical cases") {
  std::vector<QubitRecord> s = {{1, Basis::diagonal, true}, {0, Basis::rectilinear, true}};
  std::vector<QubitRecord> r = s;
  auto [a1, b1] = sift(s, r);
  CHECK(a1 == from_01("10"));
  CHECK(b1 == from_01("10"));

  r[0].basis = Basis::rectilinear;
  r[1].basis = Basis::diagonal;
  auto [a2, b2] = sift(s, r);
  CHECK(a2.empty());
  CHECK(b2.empty());

  Rng rng(37);
  auto sent = prepare_qubits(100000, rng);
  QkdConfig cfg;
  auto got = transmit_and_measure(sent, cfg, rng);
  auto [a3, b3] = sift(sent, got);
  CHECK(a3.size() >= 49000);
  CHECK(a3.size() <= 51000);

  r.pop_back();
  CHECK_THROWS_AS(sift(s, r), std::invalid_argument);
}

TEST_CASE("detect_eavesdropping: clean, hostile, and short inputs") {
  Rng rng(41);
  BitString a = random_bits(1000, rng);
  DetectionResult clean = detect_eavesdropping(a, a, 0.5, 0.11, rng);
  CHECK(clean.qber == 0.0);
  CHECK_FALSE(clean.aborted);
  CHECK(clean.remaining_a == clean.remaining_b);
  CHECK(clean.remaining_a.size() + clean.disclosed_bits == a.size());

  BitString comp = a;
  for (auto& bit : comp) bit ^= 1;
  DetectionResult hostile = detect_eavesdropping(a, comp, 0.5, 0.11, rng);
  CHECK(hostile.qber == 1.0);
  CHECK(hostile.aborted);

  BitString tiny = random_bits(9, rng);
  CHECK_THROWS_AS(detect_eavesdropping(tiny, tiny, 0.5, 0.11, rng), InsufficientMaterial);
}

TEST_CASE("eve is detected across 100 seeded trials") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    QkdConfig cfg;
    cfg.n_qubits = 20000;
    cfg.eve_active = true;
    QkdOutcome out = run_qkd(cfg, Rng(seed));
    CHECK(out.aborted);
  }
}

TEST_CASE("distill_qkd_key: clean input") {
  Rng rng(51);
  BitString a = random_bits(1024, rng);
  QkdOutcome out = distill_qkd_key(a, a, 0.0, rng);
  CHECK_FALSE(out.aborted);
  CHECK(out.key.size() == amplified_len(1024, out.leaked_bits));
  CHECK(out.key.size() > 0);
}

TEST_CASE("distill_qkd_key: 2% mismatch reconciles, 40% aborts") {
  Rng rng(52);
  BitString a = random_bits(4096, rng);
  BitString b2 = flip_fraction(a, 0.02, rng);
  QkdOutcome ok = distill_qkd_key(a, b2, 0.02, rng);
  CHECK_FALSE(ok.aborted);
  CHECK(ok.key.size() > 0);

  BitString b40 = flip_fraction(a, 0.40, rng);
  QkdOutcome bad = distill_qkd_key(a, b40, 0.40, rng);
  CHECK(bad.aborted);
  CHECK(bad.key.empty());
}

TEST_CASE("run_qkd: determinism and leakage accounting") {
  QkdConfig cfg;
  cfg.n_qubits = 20000;
  QkdOutcome r1 = run_qkd(cfg, Rng(77));
  QkdOutcome r2 = run_qkd(cfg, Rng(77));
  CHECK(r1.key == r2.key);
  CHECK(r1.qber_estimate == 0.0);  // noiseless, no eavesdropper
  CHECK_FALSE(r1.aborted);
  CHECK(r1.key.size() + r1.leaked_bits + kSecurityMargin <= r1.sifted_len);

  QkdOutcome r3 = run_qkd(cfg, Rng(78));
  CHECK(r1.key != r3.key);
}

}  // TEST_SUITE
