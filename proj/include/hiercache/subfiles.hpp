#pragma once

#include <string>
#include <vector>

#include "hiercache/config.hpp"
#include "hiercache/sets.hpp"

namespace hiercache {

// A piece of a file labeled by exactly which relays and which users cached it.
struct SubfileId {
  int file = 1;       // 1-based
  Mask relay_set = 0;  // subset of [k1]
  Mask user_set = 0;   // subset of [k1*k2], linear user indices + 1
};

inline bool operator==(const SubfileId& a, const SubfileId& b) {
  return a.file == b.file && a.relay_set == b.relay_set && a.user_set == b.user_set;
}

// "file:Q:S" with dot-joined members, e.g. "3:1.2:4". Empty sets print empty.
std::string format_subfile(const SubfileId& id);

// All 2^k1 * 2^(k1*k2) classes of one file. Relay sets iterate in lexicographic
// subset order, user sets likewise within each relay set.
std::vector<SubfileId> enumerate_subfile_classes(const NetworkConfig& cfg, int file);

}  // namespace hiercache
