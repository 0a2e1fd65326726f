#include "hiercache/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "hiercache/errors.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/rates.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/timeline.hpp"

namespace hiercache {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

void require_valid(const NetworkConfig& cfg) {
  const ValidationResult res = validate_config(cfg);
  for (const auto& issue : res.issues)
    if (issue.severity == Severity::Error) throw DomainError(issue.message);
}

DelayReport evaluate_scheme(const NetworkConfig& cfg, const std::string& scheme,
                            bool bit_mode,
                            const std::vector<std::uint64_t>& seeds,
                            int grid_steps) {
  DelayReport rep;
  rep.scheme = scheme;
  std::string build;
  const NetworkConfig run = scheme_run_config(cfg, scheme, grid_steps, build);
  rep.alpha = run.alpha;
  rep.beta = run.beta;

  if (scheme == "hcc-a")
    rep.analytic = hcc_a_rates(cfg).total();
  else if (scheme == "hcc-b")
    rep.analytic = hcc_b_rates(cfg).total();
  else if (scheme == "pipeline")
    rep.analytic = pipeline_delay(cfg);
  else if (scheme == "hcc-c")
    rep.analytic = hcc_c_rates(cfg, run.alpha, run.beta).total();
  else
    rep.analytic = propose_delay(cfg, run.alpha, run.beta);

  rep.lower_bound = lower_bound_delay(cfg);

  const Demand d = worst_case_demand(run);
  if (bit_mode) {
    if (run.file_bits == 0)
      throw DomainError("bit-level simulation needs file_bits > 0");
    std::vector<std::uint64_t> use = seeds;
    if (use.empty()) use.push_back(run.seed);
    double sum = 0.0;
    for (std::uint64_t sd : use) {
      const Placement p = decentralized_place(run, sd);
      const Schedule s = build_schedule_by_name(build, p, d);
      sum += evaluate_timeline(s, DepSemantics::Strict).makespan;
    }
    rep.sim = sum / static_cast<double>(use.size());
  } else {
    const Placement p = fractional_place(run);
    const Schedule s = build_schedule_by_name(build, p, d);
    rep.sim = evaluate_timeline(s, DepSemantics::Concurrent).makespan;
  }
  return rep;
}

void apply_sweep_value(NetworkConfig& cfg, const std::string& var, double v) {
  if (var == "m1") {
    cfg.m1 = v;
    return;
  }
  if (var == "m2") {
    cfg.m2 = v;
    return;
  }
  if (var == "n" || var == "k1" || var == "k2") {
    if (v < 1.0 || v != std::floor(v))
      throw DomainError("sweep values for " + var +
                        " must be positive integers");
    const int iv = static_cast<int>(v);
    if (var == "n")
      cfg.n_files = iv;
    else if (var == "k1")
      cfg.k1 = iv;
    else
      cfg.k2 = iv;
    return;
  }
  throw DomainError("unknown sweep variable: " + var);
}

}  // namespace

NetworkConfig scheme_run_config(const NetworkConfig& cfg,
                                const std::string& scheme, int grid_steps,
                                std::string& build_as) {
  NetworkConfig run = cfg;
  build_as = scheme;
  if (scheme == "hcc-a" || scheme == "hcc-b" || scheme == "pipeline") {
    run.alpha = 1.0;
    run.beta = 1.0;
  } else if (scheme == "hcc-c") {
    double a = 1.0, b = 1.0;
    hcc_c_alpha_beta(cfg, a, b);
    run.alpha = a;
    run.beta = b;
  } else if (scheme == "proposed-opt") {
    const OptimizeResult best = optimize_propose(cfg, grid_steps);
    run.alpha = best.alpha;
    run.beta = best.beta;
    build_as = "proposed";
  } else if (scheme != "proposed") {
    throw DomainError("unknown scheme: " + scheme);
  }
  return run;
}

int worker_count(std::size_t tasks) {
  long cap = 0;
  if (const char* env = std::getenv("HIERCACHE_THREADS")) {
    char* end = nullptr;
    cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1 || cap > 256)
      throw DomainError("HIERCACHE_THREADS must be an integer in [1, 256]");
  } else {
    const unsigned hc = std::thread::hardware_concurrency();
    cap = hc > 0 ? static_cast<long>(hc) : 1;
  }
  if (static_cast<std::size_t>(cap) > tasks) cap = static_cast<long>(tasks);
  return cap < 1 ? 1 : static_cast<int>(cap);
}

std::vector<DelayReport> run_compare(const NetworkConfig& cfg,
                                     const std::vector<std::string>& schemes,
                                     bool bit_mode,
                                     const std::vector<std::uint64_t>& seeds,
                                     int grid_steps) {
  require_valid(cfg);
  std::vector<DelayReport> out(schemes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= schemes.size() || failed.load()) return;
      try {
        out[i] = evaluate_scheme(cfg, schemes[i], bit_mode, seeds, grid_steps);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int workers = worker_count(schemes.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::string run_sweep(const SweepSpec& spec) {
  std::vector<double> values = spec.values;
  std::vector<std::string> schemes = spec.schemes;
  if (values.empty()) throw DomainError("sweep needs at least one value");
  if (schemes.empty()) throw DomainError("sweep needs at least one scheme");
  std::sort(values.begin(), values.end());
  std::sort(schemes.begin(), schemes.end());

  const std::size_t tasks = values.size() * schemes.size();
  std::vector<std::string> rows(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks || failed.load()) return;
      try {
        const std::size_t vi = i / schemes.size();
        const std::size_t si = i % schemes.size();
        NetworkConfig cfg = spec.base;
        apply_sweep_value(cfg, spec.variable, values[vi]);
        require_valid(cfg);
        const DelayReport rep = evaluate_scheme(
            cfg, schemes[si], spec.bit_mode, spec.seeds, spec.grid_steps);
        rows[i] = fmt(values[vi]) + "," + rep.scheme + "," +
                  fmt(rep.analytic) + "," + fmt(rep.sim) + "," +
                  fmt(rep.lower_bound);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int workers = worker_count(tasks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::string csv = "value,scheme,analytic_delay,sim_delay,lower_bound\n";
  for (const auto& row : rows) {
    csv += row;
    csv += '\n';
  }
  return csv;
}

std::string emit_threshold_table(const std::vector<double>& m2_values) {
  std::string csv = "m2,threshold\n";
  for (double v : m2_values) {
    if (v < 0.0 || v > 1.0)
      throw DomainError("normalized user memory must lie in [0, 1]");
    csv += fmt(v) + "," + fmt(m1_threshold(v)) + "\n";
  }
  return csv;
}

}  // namespace hiercache
