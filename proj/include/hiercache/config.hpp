#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiercache {

// One server, k1 caching relays, k2 users per relay. Cache sizes m1/m2 are in
// files, so the interesting fractions are m1/n_files and m2/n_files. alpha and
// beta split files and user cache budgets between the two delivery subsystems;
// alpha = beta = 1 keeps everything in the first one.
struct NetworkConfig {
  int n_files = 1;
  int k1 = 1;
  int k2 = 1;
  double m1 = 0.0;            // relay cache size in files
  double m2 = 0.0;            // user cache size in files
  std::uint64_t file_bits = 0;  // used by bit-level mode only
  double alpha = 1.0;
  double beta = 1.0;
  std::uint64_t seed = 0;

  int users() const { return k1 * k2; }
};

// User j of relay i, both 1-based.
struct UserId {
  int relay = 1;
  int slot = 1;
};

inline int user_index(const NetworkConfig& cfg, UserId u) {
  return (u.relay - 1) * cfg.k2 + (u.slot - 1);
}
inline UserId user_from_index(const NetworkConfig& cfg, int idx) {
  return UserId{idx / cfg.k2 + 1, idx % cfg.k2 + 1};
}

// Requested file (1-based) per user, indexed by linear user index.
struct Demand {
  std::vector<int> file_of;
};

enum class Severity { Warning, Error };

struct ValidationIssue {
  Severity severity = Severity::Error;
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<ValidationIssue> issues;
  bool ok() const {
    for (const auto& i : issues)
      if (i.severity == Severity::Error) return false;
    return true;
  }
};

// Checks ranges (k1,k2 >= 1; caches within [0, n_files]; alpha, beta in [0,1]).
// A network with fewer files than users is valid but gets a warning: its
// all-distinct worst case demand does not exist.
ValidationResult validate_config(const NetworkConfig& cfg);

// Demand where user j of relay i requests file (i-1)*k2 + j. Throws
// WorstCaseInfeasibleError when n_files < k1*k2.
Demand worst_case_demand(const NetworkConfig& cfg);

// Key-value config file ("key = value", '#' comments). Keys: n_files, k1, k2,
// m1, m2, file_bits, alpha, beta, seed. Unknown keys are an error.
NetworkConfig load_config_file(const std::string& path);
NetworkConfig parse_config_text(const std::string& text);

}  // namespace hiercache
