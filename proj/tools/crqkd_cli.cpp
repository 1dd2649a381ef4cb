// Command-line runner for the CR-QKD simulator: single-scenario runs,
// multi-user rounds, timing sweeps and standalone randomness testing.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "crqkd/errors.hpp"
#include "crqkd/scenario.hpp"

namespace {

using namespace crqkd;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAbort = 2;

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << text;
}

struct CommonOpts {
  std::string scenario = "hall";
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> lg;
  std::string format = "table";
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "preset name (office|hall|corridor) or scenario file");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--mode", o.mode, "basic|parallel|simplified");
  cmd->add_option("--lg", o.lg, "key group size in bits (power of two >= 64)");
  cmd->add_option("--format", o.format, "table|csv|json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_option("--out", o.out, "write the report to a file instead of stdout");
}

ScenarioConfig make_config(const CommonOpts& o) {
  ScenarioConfig cfg = resolve_scenario(o.scenario);
  if (o.seed) cfg.seed = *o.seed;
  if (o.mode) cfg.mode = run_mode_from(*o.mode);
  if (o.lg) {
    cfg.l_g = *o.lg;
    cfg.timing.l_g = *o.lg;
  }
  validate(cfg);
  return cfg;
}

BitString read_bits_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open bits file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  BitString bits;
  bool ascii = true;
  for (char c : text) {
    if (c == '0' || c == '1' || c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    ascii = false;
    break;
  }
  if (ascii) {
    for (char c : text)
      if (c == '0' || c == '1') bits.push_back(static_cast<uint8_t>(c - '0'));
  } else {
    std::vector<uint8_t> bytes(text.begin(), text.end());
    bits = unpack_msb(bytes, bytes.size() * 8);
  }
  return bits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CR-QKD secret-key-sharing simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  auto* run_cmd = app.add_subcommand("run", "run one scenario end to end");
  add_common(run_cmd, run_opts);

  CommonOpts mu_opts;
  std::vector<std::string> pair_specs;
  auto* mu_cmd = app.add_subcommand("multiuser", "run one multi-user round");
  add_common(mu_cmd, mu_opts);
  mu_cmd->add_option("--pairs", pair_specs,
                     "requests as A<i>:B<j>:<groups> (repeatable, overrides scenario)");
  int m1 = 0, m2 = 0;
  mu_cmd->add_option("--m1", m1, "users at QAP1");
  mu_cmd->add_option("--m2", m2, "users at QAP2");
  std::string alloc_out;
  mu_cmd->add_option("--allocation-out", alloc_out, "write the allocation table (JSON)");

  CommonOpts sweep_opts;
  std::vector<std::size_t> lg_grid{128, 256, 512, 1024};
  std::vector<double> eps_grid{0.02, 0.05, 0.10};
  auto* sweep_cmd = app.add_subcommand("sweep", "timing trade-off sweep over L_G x epsilon_q");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--lg-grid", lg_grid, "group sizes");
  sweep_cmd->add_option("--eps-grid", eps_grid, "disagreement rates");

  auto* rand_cmd = app.add_subcommand("test-randomness", "run the randomness test battery");
  std::string bits_path;
  CommonOpts rand_opts;
  std::size_t gen_bits = 0;
  rand_cmd->add_option("--in", bits_path, "bit file (ASCII 0/1 or raw bytes)");
  rand_cmd->add_option("--bits", gen_bits, "generate this many quantized bits from --scenario");
  add_common(rand_cmd, rand_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      ScenarioConfig cfg = make_config(run_opts);
      MetricsReport rep = run_scenario(cfg);
      write_out(emit_report(rep, report_format_from(run_opts.format)), run_opts.out);
      return rep.aborted ? kExitAbort : kExitOk;
    }

    if (mu_cmd->parsed()) {
      ScenarioConfig cfg = make_config(mu_opts);
      if (m1 > 0) cfg.users.m1 = m1;
      if (m2 > 0) cfg.users.m2 = m2;
      if (!pair_specs.empty()) {
        cfg.users.requests.clear();
        for (const auto& spec : pair_specs) {
          auto c1 = spec.find(':');
          auto c2 = spec.find(':', c1 + 1);
          if (c1 == std::string::npos || c2 == std::string::npos)
            throw ConfigError("bad --pairs entry (want A1:B1:2): " + spec);
          cfg.users.requests.push_back(UserPairRequest{
              spec.substr(0, c1), spec.substr(c1 + 1, c2 - c1 - 1),
              static_cast<std::size_t>(std::stoull(spec.substr(c2 + 1)))});
        }
      }
      validate(cfg);
      RoundResult rr = run_multiuser_round(cfg);
      if (!alloc_out.empty()) write_out(allocation_to_json(rr.allocation), alloc_out);
      write_out(emit_report(rr.report, report_format_from(mu_opts.format)), mu_opts.out);
      return rr.report.aborted ? kExitAbort : kExitOk;
    }

    if (sweep_cmd->parsed()) {
      ScenarioConfig cfg = make_config(sweep_opts);
      char delim = sweep_opts.format == "csv" ? ',' : '\t';
      write_out(sweep_table(cfg.timing, lg_grid, eps_grid, delim), sweep_opts.out);
      return kExitOk;
    }

    if (rand_cmd->parsed()) {
      BitString bits;
      if (!bits_path.empty()) {
        bits = read_bits_file(bits_path);
      } else if (gen_bits > 0) {
        ScenarioConfig cfg = make_config(rand_opts);
        ChannelState ch(cfg.channel, Rng(cfg.seed).derive("channel/B1").seed());
        Rng rng = Rng(cfg.seed).derive("crkg/B1");
        while (bits.size() < gen_bits) {
          CrkgOutput o = run_crkg(ch, cfg.n_probes, cfg.quantizer, CrkgMode::raw, rng);
          bits.insert(bits.end(), o.quantized_qap.begin(), o.quantized_qap.end());
        }
        bits.resize(gen_bits);
      } else {
        throw ConfigError("test-randomness: give --in or --bits");
      }
      RandomnessReport rep = randomness_tests(bits);
      std::ostringstream os;
      for (const auto& t : rep.tests) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-16s p=%.6f %s\n", t.name.c_str(), t.p_value,
                      t.pass ? "PASS" : "FAIL");
        os << line;
      }
      os << (rep.all_pass ? "all tests passed\n" : "some tests FAILED\n");
      write_out(os.str(), rand_opts.out);
      return rep.all_pass ? kExitOk : kExitAbort;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitConfig;
}
