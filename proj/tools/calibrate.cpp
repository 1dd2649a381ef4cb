// Preset fitting tool. The shipped scenario presets were produced with these
// sweeps: reciprocity_rho against the quantized disagreement rate, eve_rho
// against Eve's KDR, and the code dimension against the retransmission rate
// at the scenario's operating point.

#include <cstdio>
#include <cstring>
#include <string>

#include "crqkd/channel.hpp"
#include "crqkd/crkg.hpp"
#include "crqkd/keygroup.hpp"
#include "crqkd/simplified.hpp"

using namespace crqkd;

namespace {

struct LinkSample {
  double eps_q = 0.0;
  double eve_kdr = 0.0;
  double keep = 0.0;
};

LinkSample sample_link(const ChannelParams& p, std::size_t n_probes, uint64_t seed) {
  ChannelState ch(p, seed);
  Rng rng(seed * 31 + 5);
  EveView ev;
  CrkgOutput o = run_crkg(ch, n_probes, QuantizerConfig{}, CrkgMode::raw, rng, std::nullopt, 64,
                          &ev);
  LinkSample s;
  s.eps_q = o.stats.epsilon_q;
  s.eve_kdr = kdr(o.quantized_qap, ev.bits_at_common);
  s.keep = static_cast<double>(o.stats.common_kept) / (n_probes / 2);
  return s;
}

double rr_of_code(const EccConfig& cfg, double eps, int trials, uint64_t seed) {
  PolarCode code(cfg);
  Rng rng(seed);
  std::size_t payload = cfg.info_len_k - kDigestBits;
  int fails = 0;
  for (int t = 0; t < trials; ++t) {
    KeyGroup g{0, random_bits(payload, rng)};
    PadPair pads;
    BitString pq = random_bits(cfg.code_len_n, rng);
    BitString pu = pq;
    for (auto& b : pu)
      if (rng.bernoulli(eps)) b ^= 1;
    pads.append(pq, pu, pq);
    BitString tx = forward_simplified(g, pads, cfg, code);
    auto dec = decode_cascade(tx, pu, cfg.design_epsilon, cfg, code);
    if (!dec.ok || dec.info != g.bits) ++fails;
  }
  return static_cast<double>(fails) / trials;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cmd = argc > 1 ? argv[1] : "help";
  std::size_t n_probes = 1200000;

  if (cmd == "rho") {
    double lo = argc > 2 ? atof(argv[2]) : 0.80;
    double hi = argc > 3 ? atof(argv[3]) : 0.88;
    int steps = argc > 4 ? atoi(argv[4]) : 8;
    double temporal = argc > 5 ? atof(argv[5]) : 0.0;
    printf("# reciprocity_rho -> eps_q (temporal=%.2f, guard=0.3)\n", temporal);
    for (int i = 0; i <= steps; ++i) {
      double rho = lo + (hi - lo) * i / steps;
      LinkSample s = sample_link({rho, temporal, 30.0, 1000.0, 0.0}, n_probes, 7);
      printf("rho=%.4f eps_q=%.5f keep=%.4f\n", rho, s.eps_q, s.keep);
    }
    return 0;
  }
  if (cmd == "eve") {
    printf("# eve_rho -> eve KDR (at reciprocity 0.85)\n");
    for (double er : {0.0, 0.001, 0.002, 0.004, 0.008, 0.012, 0.016, 0.020}) {
      LinkSample s = sample_link({0.85, 0.0, 30.0, 1000.0, er}, n_probes, 7);
      printf("eve_rho=%.3f eve_kdr=%.4f\n", er, s.eve_kdr);
    }
    return 0;
  }
  if (cmd == "rr") {
    double eps = argc > 2 ? atof(argv[2]) : 0.048;
    int trials = argc > 3 ? atoi(argv[3]) : 6000;
    printf("# info_len_k -> retransmission rate at eps_q=%.3f (n=1024, design 0.10)\n", eps);
    for (std::size_t k = 400; k <= 500; k += 4)
      printf("k=%zu rr=%.4f\n", k, rr_of_code({1024, k, 0.10}, eps, trials, 99));
    return 0;
  }
  if (cmd == "check") {
    for (const char* name : {"office", "hall", "corridor"}) {
      LinkSample s = sample_link(scenario_params(name), n_probes, 7);
      printf("%-8s eps_q=%.5f eve_kdr=%.4f keep=%.4f kgr=%.1f bps\n", name, s.eps_q, s.eve_kdr,
             s.keep, s.keep * scenario_params(name).probe_rate_hz / 2.0);
    }
    return 0;
  }
  fprintf(stderr,
          "usage: crqkd-calibrate rho [lo hi steps temporal] | eve | rr [eps trials] | check\n");
  return 1;
}
