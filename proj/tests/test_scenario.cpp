#include <doctest.h>

#include <fstream>
#include <sstream>

#include "crqkd/errors.hpp"
#include "crqkd/scenario.hpp"

using namespace crqkd;

namespace {

ScenarioConfig small_config(uint64_t seed, RunMode mode) {
  ScenarioConfig cfg = scenario_preset("hall");
  cfg.seed = seed;
  cfg.mode = mode;
  cfg.l_g = 64;
  cfg.users.requests = {UserPairRequest{"A1", "B1", 4}};
  cfg.qkd.n_qubits = 4000;
  cfg.n_probes = 20000;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("shipped scenario files match the built-in presets") {
  for (const char* name : {"office", "hall", "corridor"}) {
    std::string file = slurp(std::string("scenarios/") + name + ".json");
    CHECK(file == scenario_to_json(scenario_preset(name)));
    ScenarioConfig cfg = load_scenario_file(std::string("scenarios/") + name + ".json");
    CHECK(cfg.name == name);
  }
}

TEST_CASE("perfect channels in basic mode: zero KDR, zero RR, zero CR") {
  ScenarioConfig cfg = small_config(5, RunMode::basic);
  cfg.channel = ChannelParams{1.0, 0.0, 200.0, 1000.0, 0.0};
  RoundResult rr = run_multiuser_round(cfg);
  REQUIRE_FALSE(rr.report.aborted);
  CHECK(rr.report.kdr == 0.0);
  CHECK(rr.report.rr == 0.0);
  CHECK(rr.report.eve_cr == 0.0);
  for (const auto& p : rr.pairs) {
    REQUIRE(p.complete);
    CHECK(p.key_a == p.key_b);
    CHECK(p.key_a == p.key_reference);
    CHECK_FALSE(p.key_a.empty());
  }
}

TEST_CASE("single pair multiuser run matches run_scenario") {
  ScenarioConfig cfg = small_config(6, RunMode::simplified);
  MetricsReport direct = run_scenario(cfg);
  RoundResult round = run_multiuser_round(cfg);
  CHECK(emit_report(direct, ReportFormat::json) ==
        emit_report(round.report, ReportFormat::json));
}

TEST_CASE("requests beyond supply produce a correct partial round") {
  ScenarioConfig cfg = small_config(7, RunMode::basic);
  cfg.qkd.n_qubits = 2000;  // enough for only a few 64-bit groups
  cfg.users.requests = {UserPairRequest{"A1", "B1", 1000}};
  RoundResult rr = run_multiuser_round(cfg);
  REQUIRE_FALSE(rr.report.aborted);
  CHECK(rr.report.request_shortfall > 0);
  CHECK(rr.report.groups_allocated + rr.report.groups_remaining == rr.report.groups_produced);
  // the served prefix must still be correct
  for (const auto& p : rr.pairs) {
    CHECK(p.key_a == p.key_reference);
    CHECK(p.key_b == p.key_reference);
  }
}

TEST_CASE("identical seeds give byte-identical reports, different seeds differ") {
  ScenarioConfig cfg = small_config(8, RunMode::simplified);
  RoundResult r1 = run_multiuser_round(cfg);
  RoundResult r2 = run_multiuser_round(cfg);
  for (ReportFormat f : {ReportFormat::json, ReportFormat::csv, ReportFormat::table}) {
    CHECK(emit_report(r1.report, f) == emit_report(r2.report, f));
  }
  CHECK(r1.pairs[0].key_reference == r2.pairs[0].key_reference);

  cfg.seed = 9;
  RoundResult r3 = run_multiuser_round(cfg);
  CHECK(r1.pairs[0].key_reference != r3.pairs[0].key_reference);
}

TEST_CASE("structured report round-trips byte-identically") {
  ScenarioConfig cfg = small_config(10, RunMode::simplified);
  MetricsReport rep = run_scenario(cfg);
  std::string emitted = emit_report(rep, ReportFormat::json);
  MetricsReport parsed = parse_report_json(emitted);
  CHECK(emit_report(parsed, ReportFormat::json) == emitted);
}

TEST_CASE("empty report emits headers only") {
  MetricsReport blank;
  std::string table = emit_report(blank, ReportFormat::table);
  CHECK(table.find("scenario:") == 0);
  std::string csv = emit_report(blank, ReportFormat::csv);
  CHECK(csv.find("field,value") == 0);
}

TEST_CASE("table format follows the measured-results column order") {
  ScenarioConfig cfg = small_config(11, RunMode::simplified);
  std::string table = emit_report(run_scenario(cfg), ReportFormat::table);
  auto kgr = table.find("KGR/bps");
  auto nist = table.find("NIST");
  auto kdr = table.find("KDR");
  auto rr = table.find("RR");
  auto eve = table.find("Eve KDR");
  auto cr = table.find("CR");
  REQUIRE(kgr != std::string::npos);
  CHECK(kgr < nist);
  CHECK(nist < kdr);
  CHECK(kdr < rr);
  CHECK(rr < eve);
  CHECK(eve < cr);
}

TEST_CASE("reported ratios agree with the raw logs") {
  ScenarioConfig cfg = small_config(12, RunMode::simplified);
  cfg.users.requests = {UserPairRequest{"A1", "B1", 8}};
  cfg.qkd.n_qubits = 8000;
  RoundResult rr = run_multiuser_round(cfg);
  REQUIRE_FALSE(rr.report.aborted);
  if (rr.report.rr_attempts > 0) {
    CHECK(rr.report.rr ==
          static_cast<double>(rr.report.rr_failures) / rr.report.rr_attempts);
  }
  const auto& [qap_bits, user_bits] = rr.link_quantized.at("B1");
  double recomputed = kdr(qap_bits, user_bits);
  CHECK(rr.report.kdr == recomputed);
}

TEST_CASE("conservation: delivered bits never exceed generated quantum bits") {
  ScenarioConfig cfg = small_config(13, RunMode::simplified);
  RoundResult rr = run_multiuser_round(cfg);
  CHECK(rr.report.delivered_bits <= rr.report.quantum_bits_generated);
}

TEST_CASE("an active eavesdropper aborts the round with partial metrics") {
  ScenarioConfig cfg = small_config(14, RunMode::basic);
  cfg.qkd.n_qubits = 20000;
  cfg.qkd.eve_active = true;
  MetricsReport rep = run_scenario(cfg);
  CHECK(rep.aborted);
  CHECK(rep.abort_reason == "qkd-abort");
  CHECK(rep.qber > 0.11);
}

TEST_CASE("config schema is strict") {
  CHECK_THROWS_AS(scenario_from_json("{}"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"schema_version": 1, "quantum": {}})"), ConfigError);
  CHECK_THROWS_AS(
      scenario_from_json(R"({"schema_version": 1, "channel": {"rho": 0.9}})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json(R"({"schema_version": 1, "mode": "turbo"})"), ConfigError);
  CHECK_THROWS_AS(resolve_scenario("no-such-file.json"), ConfigError);

  // unknown users in requests
  ScenarioConfig cfg = small_config(15, RunMode::basic);
  cfg.users.requests = {UserPairRequest{"A9", "B1", 1}};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = small_config(15, RunMode::basic);
  cfg.l_g = 96;  // not a power of two
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("scenario json round-trips through the loader") {
  ScenarioConfig cfg = scenario_preset("corridor");
  ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
  CHECK(scenario_to_json(back) == scenario_to_json(cfg));
}

TEST_CASE("multi-user topology delivers unified keys per pair") {
  ScenarioConfig cfg = small_config(16, RunMode::basic);
  cfg.users.m1 = 2;
  cfg.users.m2 = 2;
  cfg.users.requests = {UserPairRequest{"A1", "B1", 2}, UserPairRequest{"A2", "B2", 1},
                        UserPairRequest{"A1", "B2", 1}};
  cfg.qkd.n_qubits = 6000;
  RoundResult rr = run_multiuser_round(cfg);
  REQUIRE_FALSE(rr.report.aborted);
  REQUIRE(rr.pairs.size() == 3);
  for (const auto& p : rr.pairs) {
    REQUIRE(p.complete);
    CHECK(p.key_a == p.key_reference);
    CHECK(p.key_b == p.key_reference);
  }
  // allocation export is well-formed
  std::string alloc = allocation_to_json(rr.allocation);
  CHECK(alloc.find("\"entries\"") != std::string::npos);
}

TEST_CASE("eve's frame-level error sits near her channel KDR in simplified mode") {
  ScenarioConfig cfg = small_config(17, RunMode::simplified);
  cfg.users.requests = {UserPairRequest{"A1", "B1", 8}};
  cfg.qkd.n_qubits = 8000;
  cfg.n_probes = 60000;
  RoundResult rr = run_multiuser_round(cfg);
  REQUIRE_FALSE(rr.report.aborted);
  CHECK(rr.report.eve_bit_error == doctest::Approx(rr.report.eve_kdr).epsilon(0.08));
}

}  // TEST_SUITE
