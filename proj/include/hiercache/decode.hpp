#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiercache/placement.hpp"
#include "hiercache/schedule.hpp"

namespace hiercache {

struct UserDecodeResult {
  UserId user{1, 1};
  bool exact = false;
  std::uint64_t missing_bits = 0;
  // Up to eight class labels covering the missing positions, for diagnosis.
  std::vector<std::string> missing_classes;
};

struct DecodeReport {
  std::vector<UserDecodeResult> users;

  bool all_exact() const {
    for (const auto& u : users)
      if (!u.exact) return false;
    return true;
  }
};

// Replays a bit-level schedule at every user: cancel the XOR operands covered
// by the user's own cache, keep the bits addressed to it, and check that cache
// plus received bits reassemble the demanded file exactly.
DecodeReport decode_all(const Schedule& s, const Placement& p, const Demand& d);

}  // namespace hiercache
