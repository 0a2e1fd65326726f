#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "hiercache/config.hpp"
#include "hiercache/errors.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/rates.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/timeline.hpp"

using namespace hiercache;

namespace {

NetworkConfig make(int n, int k1, int k2, double m1, double m2,
                   double alpha = 1.0, double beta = 1.0) {
  NetworkConfig cfg;
  cfg.n_files = n;
  cfg.k1 = k1;
  cfg.k2 = k2;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.alpha = alpha;
  cfg.beta = beta;
  return cfg;
}

double concurrent_makespan(const Schedule& s) {
  return evaluate_timeline(s, DepSemantics::Concurrent).makespan;
}

double build_delay(const std::string& scheme, const NetworkConfig& cfg) {
  const Placement p = fractional_place(cfg);
  const Demand d = worst_case_demand(cfg);
  return concurrent_makespan(build_schedule_by_name(scheme, p, d));
}

}  // namespace

TEST_CASE("schedule makespans reproduce the closed forms") {
  for (int k1 : {1, 2, 3}) {
    for (int k2 : {1, 2, 3}) {
      const int n = k1 * k2 + 1;
      for (auto [f1, f2] : {std::pair{0.0, 0.0}, {0.5, 0.25}, {0.25, 0.5}}) {
        const NetworkConfig cfg = make(n, k1, k2, f1 * n, f2 * n);
        CAPTURE(k1);
        CAPTURE(k2);
        CAPTURE(f1);
        CAPTURE(f2);
        CHECK(build_delay("proposed", cfg) ==
              doctest::Approx(propose_delay(cfg, 1.0, 1.0)).epsilon(1e-9));
        CHECK(build_delay("hcc-a", cfg) ==
              doctest::Approx(hcc_a_rates(cfg).total()).epsilon(1e-9));
        CHECK(build_delay("hcc-b", cfg) ==
              doctest::Approx(hcc_b_rates(cfg).total()).epsilon(1e-9));
        CHECK(build_delay("pipeline", cfg) ==
              doctest::Approx(pipeline_delay(cfg)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("split subsystems match the closed forms too") {
  const NetworkConfig cfg = make(4, 2, 2, 2, 1, 0.5, 0.5);
  CHECK(build_delay("proposed", cfg) ==
        doctest::Approx(1.681640625).epsilon(1e-12));
  CHECK(build_delay("proposed", cfg) ==
        doctest::Approx(propose_delay(cfg, 0.5, 0.5)).epsilon(1e-12));

  double ca = 0.0, cb = 0.0;
  hcc_c_alpha_beta(cfg, ca, cb);
  NetworkConfig split = cfg;
  split.alpha = ca;
  split.beta = cb;
  CHECK(build_delay("hcc-c", split) ==
        doctest::Approx(hcc_c_rates(cfg, ca, cb).total()).epsilon(1e-9));
}

TEST_CASE("phase masses mirror the delay breakdown") {
  // One config with every component active, one where the relays hold all of
  // subsystem 1 so the early phases vanish.
  for (auto [alpha, beta] : {std::pair{1.0, 1.0}, {0.5, 0.5}}) {
    const NetworkConfig cfg = make(4, 2, 2, 2, 1, alpha, beta);
    const ProposeComponents pc = propose_components(cfg, alpha, beta);
    const Schedule s = build_schedule_proposed(fractional_place(cfg),
                                               worst_case_demand(cfg));
    const auto& dg = s.diagnostics;
    CAPTURE(alpha);
    CHECK(dg.at("mass_t1_server") == doctest::Approx(pc.rs1).epsilon(1e-12));
    CHECK(dg.at("mass_t2_server") == doctest::Approx(pc.rs2).epsilon(1e-12));
    CHECK(dg.at("mass_sub2_server") ==
          doctest::Approx(pc.r_double_prime).epsilon(1e-12));
    CHECK(dg.at("mass_rs3") == doctest::Approx(pc.rs3).epsilon(1e-12));
    for (int i = 1; i <= 2; ++i) {
      CHECK(dg.at("mass_redundant_relay" + std::to_string(i)) ==
            doctest::Approx(pc.re).epsilon(1e-12));
      CHECK(dg.at("mass_fill_relay" + std::to_string(i)) ==
            doctest::Approx(std::min(pc.rs3, pc.re)).epsilon(1e-12));
      CHECK(dg.at("mass_t3_relay" + std::to_string(i)) ==
            doctest::Approx(std::max(pc.rs3 - pc.re, 0.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("every user is served its whole file") {
  const std::vector<NetworkConfig> cfgs = {
      make(4, 2, 2, 2, 1), make(4, 2, 2, 2, 1, 0.5, 0.5),
      make(6, 3, 2, 1.5, 0.5), make(7, 2, 3, 3.5, 0.7, 0.75, 0.25)};
  const std::vector<std::string> schemes = {"proposed", "hcc-a", "hcc-b",
                                            "hcc-c", "pipeline"};
  for (const auto& cfg : cfgs) {
    const Placement p = fractional_place(cfg);
    const Demand d = worst_case_demand(cfg);
    const double cached = p.frac.w1 * p.frac.b1 + p.frac.w2 * p.frac.c2;
    for (const auto& scheme : schemes) {
      const Schedule s = build_schedule_by_name(scheme, p, d);
      for (int u = 1; u <= cfg.users(); ++u) {
        const int relay = (u - 1) / cfg.k2 + 1;
        const int want = d.file_of[u - 1];
        // Sliced symbols repeat their class list, so count each class once.
        std::set<std::tuple<int, Mask, Mask, Mask, Mask, int>> seen;
        double delivered = 0.0;
        for (const auto& sym : s.symbols) {
          if (sym.link != relay) continue;
          for (const auto& t : sym.terms) {
            if (t.file != want) continue;
            if (!contains(t.s_care, u) || contains(t.s_mask, u)) continue;
            if (!seen.insert({t.file, t.q_mask, t.q_care, t.s_mask, t.s_care,
                              t.region}).second)
              continue;
            delivered += term_mass(p.frac, cfg.k1, cfg.users(), t);
          }
        }
        CAPTURE(scheme);
        CAPTURE(u);
        CHECK(delivered + cached == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("fill and tail symbols never wait") {
  // Whole file in subsystem 1 with partial relay caches: redundant slots get
  // filled and the leftover runs as a tail.
  const NetworkConfig cfg = make(4, 2, 2, 2, 1);
  const Schedule s =
      build_schedule_proposed(fractional_place(cfg), worst_case_demand(cfg));
  int fills = 0, tails = 0;
  for (const auto& sym : s.symbols) {
    if (sym.phase == Phase::IIFill) {
      CHECK(sym.deps.empty());
      ++fills;
    }
    if (sym.phase == Phase::III && sym.link > 0) {
      CHECK(sym.deps.empty());
      ++tails;
    }
  }
  CHECK(fills > 0);
  CHECK(tails > 0);
}

TEST_CASE("the second subsystem starts when the first drains") {
  const NetworkConfig cfg = make(4, 2, 2, 2, 1, 0.5, 0.5);
  const ProposeComponents pc = propose_components(cfg, 0.5, 0.5);
  const Schedule s = build_schedule_proposed(fractional_place(cfg),
                                             worst_case_demand(cfg));
  const Timeline t = evaluate_timeline(s, DepSemantics::Concurrent);
  double first_sub2 = -1.0;
  for (const auto& sym : s.symbols) {
    if (sym.link == 0 && sym.phase == Phase::II && !sym.deps.empty()) {
      first_sub2 = t.start[sym.id];
      break;
    }
  }
  CHECK(first_sub2 == doctest::Approx(pc.r_prime).epsilon(1e-12));
  CHECK(t.makespan == doctest::Approx(pc.total()).epsilon(1e-12));
}

TEST_CASE("rebuilding emits byte-identical rows") {
  const NetworkConfig cfg = make(4, 2, 2, 2, 1, 0.75, 0.5);
  const Demand d = worst_case_demand(cfg);
  const Schedule s1 = build_schedule_proposed(fractional_place(cfg), d);
  const Schedule s2 = build_schedule_proposed(fractional_place(cfg), d);
  const std::string a =
      schedule_to_csv(s1, evaluate_timeline(s1, DepSemantics::Concurrent));
  const std::string b =
      schedule_to_csv(s2, evaluate_timeline(s2, DepSemantics::Concurrent));
  CHECK(a == b);
  CHECK(a.find("link,phase") != std::string::npos);
}

TEST_CASE("huge populations collapse into aggregate rounds") {
  NetworkConfig cfg = make(3000, 2, 100, 840, 20);
  for (const std::string scheme :
       {std::string("proposed"), std::string("hcc-c"),
        std::string("pipeline")}) {
    NetworkConfig run = cfg;
    double want = 0.0;
    if (scheme == "proposed") {
      want = propose_delay(cfg, 1.0, 1.0);
    } else if (scheme == "hcc-c") {
      double a = 0.0, bmix = 0.0;
      hcc_c_alpha_beta(cfg, a, bmix);
      run.alpha = a;
      run.beta = bmix;
      want = hcc_c_rates(cfg, a, bmix).total();
    } else {
      want = pipeline_delay(cfg);
    }
    const Schedule s = build_schedule_by_name(scheme, fractional_place(run),
                                              worst_case_demand(run));
    CAPTURE(scheme);
    CHECK(s.diagnostics.at("aggregated") == 1.0);
    CHECK(s.symbols.size() < 5000);
    CHECK(concurrent_makespan(s) == doctest::Approx(want).epsilon(1e-9));
  }
}
