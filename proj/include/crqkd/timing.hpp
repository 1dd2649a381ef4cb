#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crqkd {

// Analytic TDMA timing model. Rates and message counts describe one round of
// multi-user key distribution; the defaults parameterize the WiFi regime the
// delay/rate trade-off curves are drawn in (20 MHz link, HT-Mixed frame
// overhead, CSI-rich probing).
struct TimingConfig {
  double qkd_rate_bps = 2.0e6;        // quantum key generation rate
  double probe_rate_hz = 5000.0;      // per-user TDD probing cadence
  double bits_per_probe = 256.0;      // kept quantized bits per probe exchange
  double frame_overhead_us = 40.0;    // 20 us Non-HT, 40 us HT-Mixed
  double payload_rate_bps = 20.0e6;   // classical link payload rate
  int reconciliation_rounds = 80;     // message exchanges per key group
  double reconcile_inefficiency = 1.16;  // disclosed syndrome bits / h2 limit
  std::size_t l_g = 1024;
  std::size_t ecc_n = 1024;           // simplified-mode codeword length
  std::size_t ecc_payload_bits = 256; // key bits per codeword (digest excluded)
  int n_users_qap1 = 1;
  int n_users_qap2 = 1;
};

// Round demand: channel-key bits owed to each user and the total quantum-key
// bits shared between the QAPs.
struct KeyDemand {
  std::vector<double> user_bits_qap1;
  std::vector<double> user_bits_qap2;
  double quantum_bits = 0.0;
};

struct DelayBreakdown {
  double t_qkd = 0.0;
  double t_crkg_qap1 = 0.0;  // sum over that QAP's users
  double t_crkg_qap2 = 0.0;
  double t_forward = 0.0;
  double total = 0.0;
};

enum class TimingMode { reconciled, simplified };

double binary_entropy(double p);

// Retransmission probability of the reference simplified-mode code as a
// function of the pad disagreement rate; frozen from decoder measurements,
// linearly interpolated.
double rr_from_curve(double epsilon_q);

// Serial composition: QKD, then CRKG (larger QAP total), then forwarding.
DelayBreakdown delay_serial(const TimingConfig& cfg, const KeyDemand& demand);

// QKD and CRKG in parallel; forwarding still trails.
DelayBreakdown delay_parallel(const TimingConfig& cfg, const KeyDemand& demand);

// Simplified mechanism: no reconciliation exchanges, ECC-expanded pads,
// forwarding inflated by expected retransmissions.
DelayBreakdown delay_simplified(const TimingConfig& cfg, const KeyDemand& demand,
                                double epsilon_q);

// Secret-key-rate upper bound per link: quantized-bit rate x (1 - h2(eps)) x
// protocol efficiency, with the reconciled mode further charged for its
// syndrome leakage. Reported in bits per second.
double skr_upper_bound(double epsilon_q, const TimingConfig& cfg, TimingMode mode);

// L_G x epsilon_q sweep of the delay reduction and rate-bound growth of the
// simplified mechanism relative to the parallel one, as delimited text.
std::string sweep_table(const TimingConfig& base, const std::vector<std::size_t>& lg_grid,
                        const std::vector<double>& eps_grid, char delimiter = '\t');

}  // namespace crqkd
