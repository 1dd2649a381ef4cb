#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crqkd/channel.hpp"
#include "crqkd/crkg.hpp"
#include "crqkd/forwarding.hpp"
#include "crqkd/nist.hpp"
#include "crqkd/polar.hpp"
#include "crqkd/qkd.hpp"
#include "crqkd/quantize.hpp"
#include "crqkd/reconcile.hpp"
#include "crqkd/simplified.hpp"
#include "crqkd/timing.hpp"

namespace crqkd {

enum class RunMode { basic, parallel, simplified };

std::string to_string(RunMode mode);
RunMode run_mode_from(std::string_view s);

struct UserTopology {
  int m1 = 1;  // users A1..A<m1> at QAP1
  int m2 = 1;  // users B1..B<m2> at QAP2
  std::vector<UserPairRequest> requests;
};

struct ScenarioLimits {
  int max_crkg_batches = 64;     // probing batches per user per round
  int max_attempts_per_chunk = 8;  // simplified-mode retransmission budget
};

struct ScenarioConfig {
  std::string name = "custom";
  uint64_t seed = 1;  // mandatory; all randomness derives from it
  RunMode mode = RunMode::basic;
  std::size_t l_g = 1024;
  std::size_t n_probes = 100000;  // per CRKG batch per user
  ChannelParams channel;
  UserTopology users;
  QkdConfig qkd;
  QuantizerConfig quantizer;
  EccConfig ecc;
  ReconcileConfig reconcile;
  TimingConfig timing;
  ScenarioLimits limits;
};

void validate(const ScenarioConfig& cfg);  // throws ConfigError

// Calibrated full presets for the three measured rooms.
ScenarioConfig scenario_preset(std::string_view name);

// Versioned JSON schema; unknown keys are rejected.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);
// Resolves a preset name or a path to a scenario file.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

struct LinkMetrics {
  std::string qap;   // owning access point
  std::string user;
  double kgr_bps = 0.0;
  double kdr = 0.0;      // quantized disagreement epsilon_q
  double eve_kdr = 0.0;  // Eve vs this link's QAP-side quantized bits
  std::size_t final_key_bits = 0;
  std::size_t quantized_bits = 0;
  std::size_t probes = 0;
  std::size_t messages = 0;
  std::size_t leaked_bits = 0;
};

struct MetricsReport {
  std::string scenario;
  std::string mode;
  uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;

  double qber = 0.0;
  std::vector<LinkMetrics> links;

  double kdr = 0.0;  // reference link (QAP2 - B1) headline figure
  double rr = 0.0;
  std::size_t rr_attempts = 0;
  std::size_t rr_failures = 0;
  double eve_kdr = 0.0;
  double eve_cr = 0.0;
  std::size_t eve_groups_tried = 0;
  std::size_t eve_groups_cracked = 0;
  double eve_bit_error = 0.0;  // mean error of Eve's per-frame decrypts
  double kgr_bps = 0.0;        // reference link

  std::vector<TestVerdict> randomness;
  DelayBreakdown delay;

  std::size_t quantum_bits_generated = 0;
  std::size_t groups_produced = 0;
  std::size_t groups_allocated = 0;
  std::size_t groups_remaining = 0;
  std::size_t request_shortfall = 0;
  std::size_t delivered_bits = 0;
};

struct PairKeys {
  std::string a_id, b_id;
  BitString key_a;          // assembled by the A-side user
  BitString key_b;          // assembled by the B-side user
  BitString key_reference;  // the QAPs' allocated quantum groups
  bool complete = false;    // all allocated groups delivered to both ends
};

struct RoundResult {
  MetricsReport report;
  std::vector<PairKeys> pairs;
  AllocationTable allocation;
  // per-link post-intersection sequences, for metric recomputation in tests
  std::map<std::string, std::pair<BitString, BitString>> link_quantized;
};

// Full Fig.-2 round: requests, QKD, segmentation, allocation, per-user CRKG
// accumulation, encrypted forwarding, per-user decryption and assembly.
RoundResult run_multiuser_round(const ScenarioConfig& cfg);

// Scenario runner; single-user configs degenerate to one A1-B1 pair.
MetricsReport run_scenario(const ScenarioConfig& cfg);

enum class ReportFormat { table, csv, json };
ReportFormat report_format_from(std::string_view s);

std::string emit_report(const MetricsReport& rep, ReportFormat fmt);
MetricsReport parse_report_json(const std::string& text);
std::string allocation_to_json(const AllocationTable& table);

}  // namespace crqkd
