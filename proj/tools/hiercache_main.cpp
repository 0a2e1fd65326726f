#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hiercache/config.hpp"
#include "hiercache/decode.hpp"
#include "hiercache/errors.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/sweep.hpp"
#include "hiercache/timeline.hpp"

namespace {

const std::vector<std::string> kAllSchemes = {
    "proposed", "proposed-opt", "hcc-a", "hcc-b", "hcc-c", "pipeline"};

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hiercache::ParseError("cannot open output file: " + out_path);
  out << content;
}

hiercache::NetworkConfig load_and_check(const std::string& path) {
  hiercache::NetworkConfig cfg = hiercache::load_config_file(path);
  const hiercache::ValidationResult res = hiercache::validate_config(cfg);
  bool bad = false;
  for (const auto& issue : res.issues) {
    std::cerr << (issue.severity == hiercache::Severity::Error ? "error: "
                                                               : "warning: ")
              << issue.field << " " << issue.message << "\n";
    if (issue.severity == hiercache::Severity::Error) bad = true;
  }
  if (bad) throw hiercache::DomainError("configuration is invalid");
  return cfg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

int run(int argc, char** argv) {
  CLI::App app{"delay calculator and simulator for two-layer cache networks"};
  app.require_subcommand(1);

  std::string config_path, out_path, fixture;
  std::string mode = "fractional";
  std::vector<std::string> schemes;
  std::string one_scheme = "proposed";
  std::vector<std::uint64_t> seeds;
  std::vector<double> sweep_values, m2_values;
  std::string sweep_var;
  int grid_steps = 101;

  const auto mode_check = CLI::IsMember({"fractional", "bits"});

  CLI::App* compare = app.add_subcommand(
      "compare", "analytic delay, simulated delay and bound per scheme");
  compare->add_option("--config", config_path, "configuration file")
      ->required();
  compare->add_option("--scheme", schemes, "schemes to run (default: all)")
      ->delimiter(',');
  compare->add_option("--mode", mode, "fractional or bits")->check(mode_check);
  compare->add_option("--seed", seeds, "placement seeds for bit mode")->delimiter(',');
  compare->add_option("--grid-steps", grid_steps,
                      "grid resolution for the split search");
  compare->add_option("--out", out_path, "output file (default: stdout)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "delay versus one configuration variable, as CSV");
  sweep->add_option("--config", config_path, "configuration file")->required();
  sweep->add_option("--sweep-var", sweep_var, "variable: n, k1, k2, m1 or m2")
      ->required();
  sweep->add_option("--sweep-values", sweep_values, "values to sweep over")
      ->required()
      ->delimiter(',');
  sweep->add_option("--scheme", schemes, "schemes to run (default: all)")
      ->delimiter(',');
  sweep->add_option("--mode", mode, "fractional or bits")->check(mode_check);
  sweep->add_option("--seed", seeds, "placement seeds for bit mode")->delimiter(',');
  sweep->add_option("--grid-steps", grid_steps,
                    "grid resolution for the split search");
  sweep->add_option("--out", out_path, "output file (default: stdout)");

  CLI::App* thresholds = app.add_subcommand(
      "thresholds", "relay-memory saturation points for two relays, as CSV");
  thresholds
      ->add_option("--m2-values", m2_values, "normalized user memory values")
      ->required()
      ->delimiter(',');
  thresholds->add_option("--out", out_path, "output file (default: stdout)");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "build one delivery schedule and print it as CSV");
  simulate->add_option("--config", config_path, "configuration file");
  simulate->add_option("--fixture", fixture,
                       "built-in instance instead of a config (two-relay)");
  simulate->add_option("--scheme", one_scheme, "scheme to build");
  simulate->add_option("--mode", mode, "fractional or bits")->check(mode_check);
  simulate->add_option("--seed", seeds, "placement seed for bit mode");
  simulate->add_option("--grid-steps", grid_steps,
                       "grid resolution for the split search");
  simulate->add_option("--out", out_path, "schedule file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const bool bit_mode = mode == "bits";

  if (compare->parsed()) {
    const hiercache::NetworkConfig cfg = load_and_check(config_path);
    const auto& use = schemes.empty() ? kAllSchemes : schemes;
    const auto reports =
        hiercache::run_compare(cfg, use, bit_mode, seeds, grid_steps);
    std::string csv = "scheme,analytic_delay,sim_delay,lower_bound,alpha,beta\n";
    for (const auto& r : reports)
      csv += r.scheme + "," + fmt(r.analytic) + "," + fmt(r.sim) + "," +
             fmt(r.lower_bound) + "," + fmt(r.alpha) + "," + fmt(r.beta) + "\n";
    write_output(out_path, csv);
    return 0;
  }

  if (sweep->parsed()) {
    hiercache::SweepSpec spec;
    spec.base = load_and_check(config_path);
    spec.variable = sweep_var;
    spec.values = sweep_values;
    spec.schemes = schemes.empty() ? kAllSchemes : schemes;
    spec.bit_mode = bit_mode;
    spec.seeds = seeds;
    spec.grid_steps = grid_steps;
    write_output(out_path, hiercache::run_sweep(spec));
    return 0;
  }

  if (thresholds->parsed()) {
    write_output(out_path, hiercache::emit_threshold_table(m2_values));
    return 0;
  }

  // simulate
  if (config_path.empty() == fixture.empty())
    throw hiercache::DomainError(
        "simulate needs exactly one of --config or --fixture");

  hiercache::Placement placement;
  std::string build_as = one_scheme;
  if (!fixture.empty()) {
    if (fixture != "two-relay")
      throw hiercache::DomainError("unknown fixture: " + fixture);
    placement = hiercache::centralized_fixture();
  } else {
    const hiercache::NetworkConfig cfg = load_and_check(config_path);
    const hiercache::NetworkConfig run =
        hiercache::scheme_run_config(cfg, one_scheme, grid_steps, build_as);
    if (bit_mode)
      placement = hiercache::decentralized_place(
          run, seeds.empty() ? run.seed : seeds.front());
    else
      placement = hiercache::fractional_place(run);
  }

  const hiercache::Demand demand = hiercache::worst_case_demand(placement.cfg);
  const hiercache::Schedule schedule =
      hiercache::build_schedule_by_name(build_as, placement, demand);
  const hiercache::Timeline timeline = hiercache::evaluate_timeline(
      schedule, placement.fractional ? hiercache::DepSemantics::Concurrent
                                     : hiercache::DepSemantics::Strict);

  std::cerr << "scheme " << schedule.scheme << "\n"
            << "symbols " << schedule.symbols.size() << "\n"
            << "makespan " << fmt(timeline.makespan) << "\n"
            << "server_busy " << fmt(timeline.server_busy) << "\n"
            << "relay_busy_max " << fmt(timeline.relay_busy_max()) << "\n";
  for (const auto& [key, value] : schedule.diagnostics)
    std::cerr << key << " " << fmt(value) << "\n";
  if (!placement.fractional) {
    const hiercache::DecodeReport report =
        hiercache::decode_all(schedule, placement, demand);
    for (const auto& u : report.users) {
      std::cerr << "user " << u.user.relay << "." << u.user.slot
                << (u.exact ? " exact" : " incomplete");
      if (!u.exact) std::cerr << " missing_bits " << u.missing_bits;
      std::cerr << "\n";
    }
  }
  write_output(out_path, hiercache::schedule_to_csv(schedule, timeline));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::logic_error& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
