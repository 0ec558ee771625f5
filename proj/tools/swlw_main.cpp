// Command-line front end: run / audit / convergence / print-config.
//
// Exit codes: 0 success (all audit checks passed), 1 runtime failure,
// 2 configuration error, 3 audit checks failed.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swlw/config.hpp"
#include "swlw/errors.hpp"
#include "swlw/run.hpp"
#include "swlw/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false;
  bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "Path to a key=value config file ('#' starts a comment); "
                  "omitted keys keep their defaults");
  cmd->add_option("--seed", o.seed, "Override the config seed")
      ->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--threads", o.threads, "Override the config worker count")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { o.threads_set = true; });
}

swlw::RunConfig load(const CommonOpts& o) {
  swlw::RunConfig cfg;
  if (!o.config_path.empty()) cfg = swlw::load_config_file(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (o.threads_set) cfg.threads = o.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled relativistic long-wave / short-wave simulator"};
  app.set_version_flag("--version", std::string(swlw::version_string));
  app.require_subcommand(1);

  CommonOpts run_o, audit_o, conv_o, print_o;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Evolve the configured scenario and write "
                                "manifest, diagnostics CSV, and snapshots");
  add_common(run_cmd, run_o);
  run_cmd->add_option("--out", run_o.out_dir, "Output directory")
      ->capture_default_str();

  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "Run the built-in identity and conservation battery; prints "
               "one machine-readable line per check");
  add_common(audit_cmd, audit_o);

  CLI::App* conv_cmd = app.add_subcommand(
      "convergence", "Grid/step refinement study with observed orders");
  add_common(conv_cmd, conv_o);
  int levels = 3;
  std::string scenario = "auto";
  conv_cmd->add_option("--levels", levels, "Refinement levels (>= 2)")
      ->capture_default_str();
  conv_cmd
      ->add_option("--scenario", scenario,
                   "auto | wave-oracle | density-identity | flow-jacobian")
      ->capture_default_str();

  CLI::App* print_cmd = app.add_subcommand(
      "print-config", "Print the canonical form of the effective config");
  add_common(print_cmd, print_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const swlw::RunConfig cfg = load(run_o);
      return swlw::run_simulation(cfg, run_o.out_dir);
    }
    if (*audit_cmd) {
      const swlw::RunConfig cfg = load(audit_o);
      const auto entries = swlw::run_audit(cfg);
      std::cout << swlw::format_audit(entries);
      for (const auto& e : entries)
        if (!e.pass) return 3;
      return 0;
    }
    if (*conv_cmd) {
      const swlw::RunConfig cfg = load(conv_o);
      const auto sc = swlw::parse_scenario(scenario);
      const auto rows = swlw::run_convergence(cfg, levels, sc);
      const auto resolved = sc == swlw::ConvergenceScenario::automatic
                                ? (cfg.mode == swlw::RunMode::euler_only
                                       ? swlw::ConvergenceScenario::density_identity
                                       : swlw::ConvergenceScenario::wave_oracle)
                                : sc;
      std::cout << swlw::format_convergence(rows, resolved);
      return 0;
    }
    if (*print_cmd) {
      const swlw::RunConfig cfg = load(print_o);
      swlw::validate_config(cfg);
      std::cout << swlw::serialize_config(cfg);
      return 0;
    }
  } catch (const swlw::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
