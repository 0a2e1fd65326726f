#pragma once

#include <vector>

#include "hiercache/schedule.hpp"

namespace hiercache {

// Strict: a symbol may start only after all its dependencies finished.
// Concurrent: dependencies of pipelined symbols only need to have started,
// which models the relays re-encoding the stream block by block with the
// startup lag ignored.
enum class DepSemantics { Strict, Concurrent };

struct Timeline {
  std::vector<double> start;   // indexed by symbol id
  std::vector<double> finish;
  double makespan = 0.0;
  double server_busy = 0.0;
  std::vector<double> relay_busy;  // indexed by relay - 1
  double relay_busy_max() const;
};

// List-schedules every link in symbol emission order. Dependencies must point
// at earlier ids; anything else throws CyclicDependencyError.
Timeline evaluate_timeline(const Schedule& s, DepSemantics sem);

}  // namespace hiercache
