#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "hiercache/config.hpp"
#include "hiercache/decode.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/rates.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/sweep.hpp"
#include "hiercache/timeline.hpp"

using namespace hiercache;

namespace {

NetworkConfig make(int n, int k1, int k2, double m1, double m2,
                   std::uint64_t file_bits) {
  NetworkConfig cfg;
  cfg.n_files = n;
  cfg.k1 = k1;
  cfg.k2 = k2;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.file_bits = file_bits;
  return cfg;
}

std::string fixture_csv(const std::string& scheme) {
  const Placement p = centralized_fixture();
  const Demand d = worst_case_demand(p.cfg);
  const Schedule s = build_schedule_by_name(scheme, p, d);
  return schedule_to_csv(s, evaluate_timeline(s, DepSemantics::Strict));
}

}  // namespace

TEST_CASE("two-relay instance: the concurrent schedule row by row") {
  CHECK(fixture_csv("proposed") ==
        "symbol_id,link,phase,start,length_bits,xor_terms,depends_on\n"
        "0,0,I,0,500,1:2:;3:1:,\n"
        "1,0,I,0.5,500,2:2:;4:1:,\n"
        "2,1,II-fill,0,500,1:1*:,\n"
        "3,1,II-fill,0.5,500,2:1*:,\n"
        "4,1,I,1,500,1:2:,0\n"
        "5,1,I,1.5,500,2:2:,1\n"
        "6,2,II-fill,0,500,3:2*:,\n"
        "7,2,II-fill,0.5,500,4:2*:,\n"
        "8,2,I,1,500,3:1:,0\n"
        "9,2,I,1.5,500,4:1:,1\n");
}

TEST_CASE("two-relay instance: the layered baseline row by row") {
  CHECK(fixture_csv("hcc-a") ==
        "symbol_id,link,phase,start,length_bits,xor_terms,depends_on\n"
        "0,0,I,0,500,1:2:*;3:1:*,\n"
        "1,0,I,0.5,500,2:2:*;4:1:*,\n"
        "2,1,III,1,1000,1:*:*,1\n"
        "3,1,III,2,1000,2:*:*,\n"
        "4,2,III,1,1000,3:*:*,1\n"
        "5,2,III,2,1000,4:*:*,\n");
}

TEST_CASE("two-relay instance: makespans and decode") {
  const Placement p = centralized_fixture();
  const Demand d = worst_case_demand(p.cfg);
  const Schedule fast = build_schedule_proposed(p, d);
  const Schedule slow = build_schedule_hcc('a', p, d);
  CHECK(evaluate_timeline(fast, DepSemantics::Strict).makespan == 2.0);
  CHECK(evaluate_timeline(slow, DepSemantics::Strict).makespan == 3.0);
  CHECK(decode_all(fast, p, d).all_exact());
  CHECK(decode_all(slow, p, d).all_exact());
}

TEST_CASE("term sizes follow the partition") {
  const Placement p = centralized_fixture();
  XorTerm t;
  t.file = 1;
  t.q_mask = with(Mask{0}, 2);
  t.q_care = full_mask(2);
  t.s_mask = 0;
  t.s_care = full_mask(4);
  CHECK(term_bits(p.partition, t) == 500);
  // Aggregating over the relay pattern: the mask must shrink with the care
  // set, and the whole file matches.
  t.q_mask = 0;
  t.q_care = 0;
  CHECK(term_bits(p.partition, t) == 1000);
  t.region = 2;  // nothing placed there
  CHECK(term_bits(p.partition, t) == 0);
}

TEST_CASE("every scheme decodes exactly from random placements") {
  for (const std::string scheme : {"proposed", "proposed-opt", "hcc-a", "hcc-b",
                                   "hcc-c", "pipeline"}) {
    for (double m1 : {0.0, 2.0, 4.0}) {
      for (double m2 : {0.0, 1.0, 4.0}) {
        for (std::uint64_t seed : {1, 2}) {
          const NetworkConfig cfg = make(4, 2, 2, m1, m2, 2000);
          std::string build_as;
          const NetworkConfig run =
              scheme_run_config(cfg, scheme, 21, build_as);
          const Placement p = decentralized_place(run, seed);
          const Demand d = worst_case_demand(run);
          const Schedule s = build_schedule_by_name(build_as, p, d);
          const DecodeReport rep = decode_all(s, p, d);
          CAPTURE(scheme);
          CAPTURE(m1);
          CAPTURE(m2);
          CAPTURE(seed);
          CHECK(rep.all_exact());
        }
      }
    }
  }
}

TEST_CASE("a dropped forward is noticed") {
  const Placement p = centralized_fixture();
  const Demand d = worst_case_demand(p.cfg);
  Schedule s = build_schedule_proposed(p, d);
  s.symbols.pop_back();  // relay 2's second forward, wanted by user 2.2
  const DecodeReport rep = decode_all(s, p, d);
  CHECK_FALSE(rep.all_exact());
  REQUIRE(rep.users.size() == 4);
  CHECK(rep.users[0].exact);
  CHECK(rep.users[1].exact);
  CHECK(rep.users[2].exact);
  CHECK_FALSE(rep.users[3].exact);
  CHECK(rep.users[3].missing_bits == 500);
  REQUIRE_FALSE(rep.users[3].missing_classes.empty());
  CHECK(rep.users[3].missing_classes.front() == "4:1:@1");
}

TEST_CASE("fractional numbers round-trip through a large placement") {
  const NetworkConfig cfg = make(4, 2, 2, 2, 1, 100000);
  const Placement p = decentralized_place(cfg, 3);
  const Demand d = worst_case_demand(cfg);
  const Schedule s = build_schedule_proposed(p, d);
  const double strict = evaluate_timeline(s, DepSemantics::Strict).makespan;
  const double frac = propose_delay(cfg, 1.0, 1.0);
  CHECK(std::abs(strict - frac) / frac < 0.01);
  CHECK(strict >= evaluate_timeline(s, DepSemantics::Concurrent).makespan);
  CHECK(decode_all(s, p, d).all_exact());
}
