#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hiercache/config.hpp"
#include "hiercache/sets.hpp"

namespace hiercache {

// Packed bit storage for the n_files x file_bits library content.
struct BitLibrary {
  std::uint64_t file_bits = 0;
  std::vector<std::vector<std::uint64_t>> words;  // [file][word]

  bool bit(int file, std::uint64_t p) const {
    return (words[file - 1][p >> 6] >> (p & 63)) & 1u;
  }
  void set_bit(int file, std::uint64_t p, bool v) {
    auto& w = words[file - 1][p >> 6];
    std::uint64_t m = std::uint64_t{1} << (p & 63);
    w = v ? (w | m) : (w & ~m);
  }
};

// Every bit position of every file falls into exactly one class: the pair of
// (relay set, user set) that cached it, qualified by which subsystem region the
// position lies in. Positions are bucketed by class and kept ascending inside
// each bucket.
struct BitPartition {
  int k1 = 0;
  int users = 0;
  std::uint64_t file_bits = 0;
  std::uint64_t region1_bits = 0;  // positions below this belong to subsystem 1
  int bins_per_region = 0;         // 2^(k1+users)

  std::vector<std::vector<std::uint32_t>> positions;   // [file][file_bits]
  std::vector<std::vector<std::uint32_t>> bin_offset;  // [file][2*bins_per_region + 1]

  int bin_id(int region, Mask q, Mask s) const {
    return (region - 1) * bins_per_region + (static_cast<int>(q) << users) +
           static_cast<int>(s);
  }
  std::uint32_t bin_size(int file, int bin) const {
    return bin_offset[file - 1][bin + 1] - bin_offset[file - 1][bin];
  }
};

// Sorted cached positions per node per file.
struct NodeCaches {
  std::vector<std::vector<std::vector<std::uint32_t>>> relay;  // [k1][file][...]
  std::vector<std::vector<std::vector<std::uint32_t>>> user;   // [k1*k2][file][...]
};

// Clamped per-region cache fractions used by the fractional (expected-mass)
// model: region 1 holds weight w1 = alpha of every file with relay fraction a1
// and user fraction b1; region 2 holds the rest with user fraction c2.
struct FracParams {
  double w1 = 1.0, a1 = 0.0, b1 = 0.0;
  double w2 = 0.0, c2 = 0.0;
};

struct Placement {
  bool fractional = true;
  NetworkConfig cfg;
  FracParams frac;

  BitLibrary library;
  BitPartition partition;
  NodeCaches caches;
};

FracParams fractional_params(const NetworkConfig& cfg);

// Expected-mass placement. Class masses come straight from the clamped cache
// fractions; no randomness involved.
Placement fractional_place(const NetworkConfig& cfg);

// Exact mass of one class (region parts summed) under the fractional model.
double fractional_class_mass(const NetworkConfig& cfg, Mask relay_set, Mask user_set);

// Seeded random placement at bit granularity. Every node caches exactly its
// floor budget from each file: relays draw floor(m1*F/n) positions out of the
// first floor(alpha*F) bits, users split floor(m2*F/n) across the two regions
// with floor(beta*m2*F/n) going to the first.
Placement decentralized_place(const NetworkConfig& cfg, std::uint64_t seed);

// The hand-built two-relay instance: 4 files, 2 relays, 2 users each, every
// file split into halves with relay i caching half i, users caching nothing.
Placement centralized_fixture(std::uint64_t file_bits = 1000);

// Total bits of one file matching a possibly-wildcarded class pattern: bins
// whose relay set agrees with q_mask on q_care and whose user set agrees with
// s_mask on s_care, within the given region.
std::uint64_t matching_bits(const BitPartition& part, int file, int region,
                            Mask q_mask, Mask q_care, Mask s_mask, Mask s_care);

// Binary dump of the per-node cached-position sets (magic, version byte, then
// run-length-encoded bit sets). The library content itself is not included.
void save_cache_states(const Placement& p, std::ostream& out);
NodeCaches load_cache_states(std::istream& in, const NetworkConfig& cfg);

}  // namespace hiercache
