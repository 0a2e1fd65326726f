#include <vector>

#include "doctest.h"
#include "hiercache/errors.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/schedule.hpp"
#include "hiercache/timeline.hpp"

using namespace hiercache;

namespace {

Schedule shell() {
  Schedule s;
  s.scheme = "test";
  s.cfg.n_files = 4;
  s.cfg.k1 = 2;
  s.cfg.k2 = 2;
  return s;
}

Symbol sym(int id, int link, double length, std::vector<int> deps = {},
           bool pipelined = false) {
  Symbol x;
  x.id = id;
  x.link = link;
  x.length = length;
  x.deps = std::move(deps);
  x.pipelined = pipelined;
  return x;
}

}  // namespace

TEST_CASE("one link serializes in emission order") {
  Schedule s = shell();
  s.symbols = {sym(0, 0, 1.0), sym(1, 0, 0.5), sym(2, 0, 0.25)};
  const Timeline t = evaluate_timeline(s, DepSemantics::Strict);
  CHECK(t.start == std::vector<double>{0.0, 1.0, 1.5});
  CHECK(t.finish == std::vector<double>{1.0, 1.5, 1.75});
  CHECK(t.makespan == 1.75);
  CHECK(t.server_busy == 1.75);
  CHECK(t.relay_busy == std::vector<double>{0.0, 0.0});
  CHECK(t.relay_busy_max() == 0.0);
}

TEST_CASE("pipelined symbols overlap their dependency") {
  Schedule s = shell();
  s.symbols = {sym(0, 0, 2.0), sym(1, 1, 1.0, {0}, true)};
  CHECK(evaluate_timeline(s, DepSemantics::Strict).makespan == 3.0);
  const Timeline t = evaluate_timeline(s, DepSemantics::Concurrent);
  CHECK(t.start[1] == 0.0);
  CHECK(t.makespan == 2.0);

  // Without the pipelined flag the concurrent mode still waits.
  s.symbols[1].pipelined = false;
  CHECK(evaluate_timeline(s, DepSemantics::Concurrent).makespan == 3.0);
}

TEST_CASE("pipelined start tracks the latest dependency") {
  Schedule s = shell();
  s.symbols = {sym(0, 0, 1.0), sym(1, 0, 1.0), sym(2, 2, 0.5, {0, 1}, true)};
  const Timeline t = evaluate_timeline(s, DepSemantics::Concurrent);
  CHECK(t.start[2] == 1.0);
  CHECK(t.makespan == 2.0);
  CHECK(t.relay_busy == std::vector<double>{0.0, 0.5});
  CHECK(t.relay_busy_max() == 0.5);
}

TEST_CASE("a link is first-come first-served") {
  Schedule s = shell();
  s.symbols = {sym(0, 0, 1.0), sym(1, 1, 1.0, {0}), sym(2, 1, 1.0)};
  const Timeline t = evaluate_timeline(s, DepSemantics::Strict);
  // Symbol 2 has no dependencies but was emitted after symbol 1.
  CHECK(t.start[2] == 2.0);
  CHECK(t.makespan == 3.0);
  CHECK(t.server_busy == 1.0);
  CHECK(t.relay_busy[0] == 2.0);
}

TEST_CASE("cross-link dependencies stall the server") {
  Schedule s = shell();
  s.symbols = {sym(0, 0, 1.0), sym(1, 1, 1.0, {0}), sym(2, 0, 1.0, {1})};
  const Timeline t = evaluate_timeline(s, DepSemantics::Strict);
  CHECK(t.start[2] == 2.0);
  CHECK(t.makespan == 3.0);
}

TEST_CASE("an empty schedule is instantaneous") {
  const Timeline t = evaluate_timeline(shell(), DepSemantics::Strict);
  CHECK(t.makespan == 0.0);
  CHECK(t.relay_busy.size() == 2);
}

TEST_CASE("malformed schedules are rejected") {
  Schedule gap = shell();
  gap.symbols = {sym(0, 0, 1.0), sym(2, 0, 1.0)};
  CHECK_THROWS_AS(evaluate_timeline(gap, DepSemantics::Strict),
                  CyclicDependencyError);

  Schedule self = shell();
  self.symbols = {sym(0, 0, 1.0), sym(1, 0, 1.0, {1})};
  CHECK_THROWS_AS(evaluate_timeline(self, DepSemantics::Strict),
                  CyclicDependencyError);

  Schedule forward = shell();
  forward.symbols = {sym(0, 0, 1.0, {1}), sym(1, 0, 1.0)};
  CHECK_THROWS_AS(evaluate_timeline(forward, DepSemantics::Strict),
                  CyclicDependencyError);

  Schedule badlink = shell();
  badlink.symbols = {sym(0, 3, 1.0)};
  CHECK_THROWS_AS(evaluate_timeline(badlink, DepSemantics::Strict), DomainError);

  Schedule neglink = shell();
  neglink.symbols = {sym(0, -1, 1.0)};
  CHECK_THROWS_AS(evaluate_timeline(neglink, DepSemantics::Strict), DomainError);
}

TEST_CASE("prefixes of a real schedule finish no later") {
  const Placement p = centralized_fixture();
  const Demand d = worst_case_demand(p.cfg);
  const Schedule full = build_schedule_proposed(p, d);
  REQUIRE(full.symbols.size() > 2);
  double prev = 0.0;
  for (std::size_t keep = 1; keep <= full.symbols.size(); ++keep) {
    Schedule cut = full;
    cut.symbols.resize(keep);
    const double m = evaluate_timeline(cut, DepSemantics::Strict).makespan;
    CHECK(m >= prev);
    prev = m;
  }
  CHECK(prev == evaluate_timeline(full, DepSemantics::Strict).makespan);
}
