#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiercache/config.hpp"

namespace hiercache {

struct DelayReport {
  std::string scheme;
  double analytic = 0.0;
  double sim = 0.0;
  double lower_bound = 0.0;
  double alpha = 1.0;  // the subsystem split the scheme actually ran with
  double beta = 1.0;
};

// Analytic delay, simulated makespan and the cut-set bound per scheme on one
// configuration. Bit mode simulates every seed and reports the mean makespan.
std::vector<DelayReport> run_compare(const NetworkConfig& cfg,
                                     const std::vector<std::string>& schemes,
                                     bool bit_mode,
                                     const std::vector<std::uint64_t>& seeds,
                                     int grid_steps = 101);

struct SweepSpec {
  NetworkConfig base;
  std::string variable;  // n, k1, k2, m1 or m2
  std::vector<double> values;
  std::vector<std::string> schemes;
  bool bit_mode = false;
  std::vector<std::uint64_t> seeds;
  int grid_steps = 101;
};

// CSV "value,scheme,analytic_delay,sim_delay,lower_bound" ordered by value
// then scheme, byte-identical no matter how many workers ran.
std::string run_sweep(const SweepSpec& spec);

// CSV "m2,threshold": the normalized relay memory beyond which extra relay
// memory stops reducing the optimized two-relay delay, per user-memory value.
std::string emit_threshold_table(const std::vector<double>& m2_values);

// HIERCACHE_THREADS when set, hardware concurrency otherwise, capped by the
// task count.
int worker_count(std::size_t tasks);

// The configuration a scheme actually runs with: hcc-a, hcc-b and pipeline
// ignore the subsystem split, hcc-c picks its closed-form split, and
// proposed-opt grid-searches the split and then builds as "proposed".
NetworkConfig scheme_run_config(const NetworkConfig& cfg,
                                const std::string& scheme, int grid_steps,
                                std::string& build_as);

}  // namespace hiercache
