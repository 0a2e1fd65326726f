// End-to-end gate for the delivery simulator: eight numbered checks, each
// printing one [PASS]/[FAIL] line with its runtime. Exits nonzero if any
// check or its time budget fails.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "hiercache/config.hpp"
#include "hiercache/decode.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/rates.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/sweep.hpp"
#include "hiercache/timeline.hpp"

using namespace hiercache;

namespace {

int g_failures = 0;

struct Criterion {
  std::string label;
  double budget_s = 0.0;
  std::chrono::steady_clock::time_point begin;
  bool ok = true;
  std::string detail;

  Criterion(std::string l, double budget)
      : label(std::move(l)),
        budget_s(budget),
        begin(std::chrono::steady_clock::now()) {}

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
            .count();
    if (elapsed > budget_s) {
      ok = false;
      if (detail.empty())
        detail = "took " + std::to_string(elapsed) + " s, budget " +
                 std::to_string(budget_s) + " s";
    }
    if (ok) {
      std::printf("[PASS] %s (%.2f s)%s%s\n", label.c_str(), elapsed,
                  detail.empty() ? "" : ": ", detail.c_str());
    } else {
      std::printf("[FAIL] %s (%.2f s): %s\n", label.c_str(), elapsed,
                  detail.c_str());
      ++g_failures;
    }
  }
};

NetworkConfig make(int n, int k1, int k2, double m1, double m2,
                   std::uint64_t file_bits = 0) {
  NetworkConfig cfg;
  cfg.n_files = n;
  cfg.k1 = k1;
  cfg.k2 = k2;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.file_bits = file_bits;
  return cfg;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// 1. The hand-built two-relay instance reproduces the reference schedules:
// the layered baseline needs 3 slots (2 server symbols, then each relay
// retransmits 2 full files), the concurrent scheme needs 2 because the
// relays fill their idle slots and forward in lockstep.
void check_fixture() {
  Criterion c("1. two-relay instance reproduction", 1.0);
  const Placement p = centralized_fixture();
  const Demand d = worst_case_demand(p.cfg);

  const Schedule fast = build_schedule_proposed(p, d);
  const Schedule slow = build_schedule_hcc('a', p, d);
  const Timeline tf = evaluate_timeline(fast, DepSemantics::Strict);
  const Timeline ts = evaluate_timeline(slow, DepSemantics::Strict);
  c.require(tf.makespan == 2.0, "concurrent makespan " + num(tf.makespan));
  c.require(ts.makespan == 3.0, "layered makespan " + num(ts.makespan));

  int slow_server = 0, slow_relay = 0;
  for (const auto& sym : slow.symbols) {
    if (sym.link == 0) {
      ++slow_server;
    } else {
      ++slow_relay;
      c.require(sym.bits == 1000, "layered relay round is a whole file");
      c.require(ts.start[sym.id] >= 1.0, "layered relays wait for the server");
    }
  }
  c.require(slow_server == 2, "layered baseline has 2 server symbols");
  c.require(slow_relay == 4, "layered baseline has 2 rounds per relay");

  int fast_server = 0;
  bool overlapped = false;
  for (const auto& sym : fast.symbols) {
    if (sym.link == 0) ++fast_server;
    if (sym.link > 0 && tf.start[sym.id] == 0.0) overlapped = true;
  }
  c.require(fast_server == 2, "concurrent scheme has 2 server symbols");
  c.require(overlapped, "concurrent relays transmit from slot 0");
  c.require(decode_all(fast, p, d).all_exact(), "concurrent decode");
  c.require(decode_all(slow, p, d).all_exact(), "layered decode");
  c.finish();
}

// 2. With the relays caching the whole library and users nothing, the
// delay formula collapses to 2 and meets the cut-set bound exactly.
void check_tight_bound() {
  Criterion c("2. saturated relays meet the bound", 1.0);
  const NetworkConfig cfg = make(4, 2, 2, 4, 0);
  const double t = propose_delay(cfg, 1.0, 1.0);
  const double lb = lower_bound_delay(cfg);
  c.require(std::abs(t - 2.0) <= 1e-9, "delay " + num(t));
  c.require(std::abs(lb - 2.0) <= 1e-9, "bound " + num(lb));
  c.finish();
}

// 3. Relay memory saturates at (3-sqrt(5))/2: past that point the delay sits
// flat at K2 slots however much more the relays store.
void check_threshold() {
  Criterion c("3. relay-memory saturation point", 1.0);
  const double want = (3.0 - std::sqrt(5.0)) / 2.0;
  const double got = m1_threshold(0.0);
  c.require(std::abs(got - want) <= 1e-6, "threshold " + num(got));
  for (int j = 0; j < 200; ++j) {
    const double ratio = 0.382 + (1.0 - 0.382) * j / 199.0;
    const NetworkConfig cfg = make(50, 2, 2, ratio * 50.0, 0);
    const double t = propose_delay(cfg, 1.0, 1.0);
    if (std::abs(t - 2.0) > 1e-9) {
      c.require(false, "delay " + num(t) + " at m1/n " + num(ratio));
      break;
    }
  }
  c.finish();
}

// 4. On the large configuration the optimized delay is already on its floor
// at m1 = 840 of 3000: more relay memory buys under 1%.
void check_plateau() {
  Criterion c("4. optimized delay plateau", 30.0);
  const NetworkConfig knee = make(3000, 2, 100, 840, 20);
  const NetworkConfig cap = make(3000, 2, 100, 3000, 20);
  const double at_knee = optimize_propose(knee, 101).delay;
  const double at_cap = optimize_propose(cap, 101).delay;
  c.require(std::abs(at_knee - at_cap) <= 0.01 * at_cap,
            num(at_knee) + " vs " + num(at_cap));
  c.finish();
}

// The shared grid of criteria 5 and 7: every relay/user count in {1,2,3}
// and a 5x5 lattice of cache fractions.
std::vector<NetworkConfig> formula_grid() {
  std::vector<NetworkConfig> grid;
  const double fr[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int k1 = 1; k1 <= 3; ++k1)
    for (int k2 = 1; k2 <= 3; ++k2)
      for (double f1 : fr)
        for (double f2 : fr) {
          const int n = k1 * k2 + 1;
          grid.push_back(make(n, k1, k2, f1 * n, f2 * n));
        }
  return grid;
}

// 5. Fractional-mode makespans agree with the closed forms on every grid
// point, for the concurrent scheme and all three baselines.
void check_formula_agreement() {
  Criterion c("5. schedule vs closed form on 225 configs", 60.0);
  const auto grid = formula_grid();
  c.require(grid.size() >= 200, "grid too small");
  for (const auto& cfg : grid) {
    const Placement p = fractional_place(cfg);
    const Demand d = worst_case_demand(cfg);
    const struct {
      const char* scheme;
      double want;
    } rows[] = {
        {"proposed", propose_delay(cfg, 1.0, 1.0)},
        {"hcc-a", hcc_a_rates(cfg).total()},
        {"hcc-b", hcc_b_rates(cfg).total()},
        {"pipeline", pipeline_delay(cfg)},
    };
    for (const auto& row : rows) {
      const Schedule s = build_schedule_by_name(row.scheme, p, d);
      const double got =
          evaluate_timeline(s, DepSemantics::Concurrent).makespan;
      if (std::abs(got - row.want) > 1e-9) {
        c.require(false, std::string(row.scheme) + " " + num(got) + " vs " +
                             num(row.want) + " at k1 " +
                             std::to_string(cfg.k1) + " k2 " +
                             std::to_string(cfg.k2) + " m1 " + num(cfg.m1) +
                             " m2 " + num(cfg.m2));
        c.finish();
        return;
      }
    }
  }
  c.finish();
}

// 6. Bit-exact decoding for every scheme over 10 seeds and the full cache
// lattice at ten-thousand-bit files.
void check_decodability() {
  Criterion c("6. bit-exact decode, all schemes x 10 seeds", 120.0);
  const std::vector<std::string> schemes = {"proposed", "proposed-opt",
                                            "hcc-a",    "hcc-b",
                                            "hcc-c",    "pipeline"};
  for (const auto& scheme : schemes) {
    for (double m1 : {0.0, 1.0, 2.0, 4.0}) {
      for (double m2 : {0.0, 1.0, 4.0}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
          const NetworkConfig cfg = make(4, 2, 2, m1, m2, 10000);
          std::string build_as;
          const NetworkConfig run = scheme_run_config(cfg, scheme, 21, build_as);
          const Placement p = decentralized_place(run, seed);
          const Demand d = worst_case_demand(run);
          const Schedule s = build_schedule_by_name(build_as, p, d);
          if (!decode_all(s, p, d).all_exact()) {
            c.require(false, scheme + " seed " + std::to_string(seed) +
                                 " m1 " + num(m1) + " m2 " + num(m2));
            c.finish();
            return;
          }
        }
      }
    }
  }
  c.finish();
}

// 7. The cut-set bound sits under every scheme on the grid, the guaranteed
// gap between the layered split and the concurrent scheme holds, and the
// worst observed delay/bound ratio is reported.
void check_bound_sandwich() {
  Criterion c("7. bound sandwich and guaranteed gap", 60.0);
  double worst_ratio = 0.0;
  for (const auto& cfg : formula_grid()) {
    const double lb = lower_bound_delay(cfg);
    const double delays[] = {
        propose_delay(cfg, 1.0, 1.0), hcc_a_rates(cfg).total(),
        hcc_b_rates(cfg).total(),     pipeline_delay(cfg),
        hcc_c_delay(cfg),
    };
    for (double t : delays)
      if (lb > t + 1e-9) {
        c.require(false, "bound " + num(lb) + " above delay " + num(t));
        c.finish();
        return;
      }
    const GapReport gr = gap_report(cfg);
    if (gr.hcc_delay - gr.propose_delay < gr.guaranteed_gap - 1e-9) {
      c.require(false, "gap " + num(gr.hcc_delay - gr.propose_delay) +
                           " under promised " + num(gr.guaranteed_gap));
      c.finish();
      return;
    }
    if (lb > 1e-12)
      worst_ratio = std::max(worst_ratio, propose_delay(cfg, 1.0, 1.0) / lb);
  }
  c.detail = "max delay/bound ratio " + num(worst_ratio);
  c.finish();
}

// 8. Bit-level runs converge to the fractional prediction as files grow.
// The relays work block by block, so each run overshoots the idealized
// streaming value by a startup lag; that fraction must fade monotonically.
void check_convergence() {
  Criterion c("8. bit-level convergence", 300.0);
  const double frac = propose_delay(make(4, 2, 2, 2, 1), 1.0, 1.0);
  double last_strict = 0.0;
  double prev_lag = 1.0;
  for (std::uint64_t bits : {std::uint64_t{1000}, std::uint64_t{10000},
                             std::uint64_t{100000}, std::uint64_t{1000000}}) {
    const NetworkConfig cfg = make(4, 2, 2, 2, 1, bits);
    const Placement p = decentralized_place(cfg, 3);
    const Demand d = worst_case_demand(cfg);
    const Schedule s = build_schedule_proposed(p, d);
    const double strict = evaluate_timeline(s, DepSemantics::Strict).makespan;
    const double lag = (strict - frac) / strict;
    c.require(lag < prev_lag, "lag not shrinking at " + std::to_string(bits));
    prev_lag = lag;
    last_strict = strict;
  }
  c.require(std::abs(last_strict - frac) <= 0.05 * frac,
            "F=1e6 makespan " + num(last_strict) + " vs " + num(frac));
  c.finish();
}

}  // namespace

int main() {
  check_fixture();
  check_tight_bound();
  check_threshold();
  check_plateau();
  check_formula_agreement();
  check_decodability();
  check_bound_sandwich();
  check_convergence();
  if (g_failures > 0) {
    std::printf("%d of 8 criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
