#include "hiercache/timeline.hpp"

#include <algorithm>

#include "hiercache/errors.hpp"
#include "hiercache/schedule.hpp"

namespace hiercache {

double Timeline::relay_busy_max() const {
  double out = 0.0;
  for (double v : relay_busy) out = std::max(out, v);
  return out;
}

Timeline evaluate_timeline(const Schedule& s, DepSemantics sem) {
  const int k1 = s.cfg.k1;
  Timeline tl;
  tl.start.resize(s.symbols.size());
  tl.finish.resize(s.symbols.size());
  tl.relay_busy.assign(static_cast<std::size_t>(k1), 0.0);
  std::vector<double> link_free(static_cast<std::size_t>(k1) + 1, 0.0);

  for (std::size_t idx = 0; idx < s.symbols.size(); ++idx) {
    const Symbol& sym = s.symbols[idx];
    if (sym.id != static_cast<int>(idx))
      throw CyclicDependencyError("symbol ids must be consecutive");
    if (sym.link < 0 || sym.link > k1)
      throw DomainError("symbol link out of range");
    double gate = 0.0;
    for (int d : sym.deps) {
      if (d < 0 || d >= sym.id)
        throw CyclicDependencyError(
            "symbol depends on itself or a later symbol");
      const bool at_start = sym.pipelined && sem == DepSemantics::Concurrent;
      gate = std::max(gate, at_start ? tl.start[static_cast<std::size_t>(d)]
                                     : tl.finish[static_cast<std::size_t>(d)]);
    }
    const double st = std::max(link_free[static_cast<std::size_t>(sym.link)], gate);
    const double fin = st + sym.length;
    tl.start[idx] = st;
    tl.finish[idx] = fin;
    link_free[static_cast<std::size_t>(sym.link)] = fin;
    tl.makespan = std::max(tl.makespan, fin);
    if (sym.link == 0)
      tl.server_busy += sym.length;
    else
      tl.relay_busy[static_cast<std::size_t>(sym.link - 1)] += sym.length;
  }
  return tl;
}

}  // namespace hiercache
