#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hiercache/config.hpp"
#include "hiercache/placement.hpp"
#include "hiercache/sets.hpp"

namespace hiercache {

// II covers server symbols of the coded no-relay classes; IIForward is a relay
// passing such a symbol on; IIFill is relay-cached content slipped into slots
// the relay would otherwise idle through; III is the post-server remainder.
enum class Phase { I, II, IIForward, IIFill, III };

const char* phase_name(Phase p);

// One XOR operand: the bits of `file` whose caching pattern matches
// (q_mask, q_care) over relays and (s_mask, s_care) over users, within region
// 1, region 2, or the whole file (region 0). Care bits mark positions that
// must match; everything else is aggregated over.
struct XorTerm {
  int file = 1;
  Mask q_mask = 0;
  Mask q_care = 0;
  Mask s_mask = 0;
  Mask s_care = 0;
  std::uint8_t region = 0;
};

// "file:Q:S" with dot-joined members, "*" marking aggregated positions and a
// "@1"/"@2" suffix for region-restricted terms.
std::string format_xor_term(const XorTerm& t, int k1, int users);

// Expected size (fraction of one file) of the bits a term stands for.
double term_mass(const FracParams& fp, int k1, int users, const XorTerm& t);

// Exact size in bits under a concrete placement.
std::uint64_t term_bits(const BitPartition& part, const XorTerm& t);

struct Symbol {
  int id = 0;
  int link = 0;  // 0 = server broadcast, i = relay i to its users
  Phase phase = Phase::I;
  std::vector<XorTerm> terms;
  double length = 0.0;             // transmission slots, file size = 1
  std::uint64_t bits = 0;          // bit-level mode only
  std::uint64_t slice_begin = 0;   // offset into the sliced parent symbol
  std::vector<int> deps;           // ids of required earlier symbols
  bool pipelined = false;          // deps gate on start in concurrent mode
  std::string family;              // label when symbols are aggregated
};

struct Schedule {
  std::string scheme;
  bool fractional = true;
  NetworkConfig cfg;
  Demand demand;
  std::vector<Symbol> symbols;
  std::map<std::string, double> diagnostics;
};

// Delivery schedule of the concurrent scheme: server coded rounds for the
// cross-relay and no-relay classes, relays decode-and-forward their
// components, idle slots carry relay-cached content, the remainder follows
// once the server is done, and the second subsystem (alpha < 1) runs after.
Schedule build_schedule_proposed(const Placement& p, const Demand& d);

// variant 'a': relays served as proxy users, then a relay round. 'b': relays
// forward the server's user-level coded symbols after the server finishes.
// 'c': 'a' on subsystem 1 followed by 'b' on subsystem 2.
Schedule build_schedule_hcc(char variant, const Placement& p, const Demand& d);

// Same symbols as 'b' but each forward depends only on its own server symbol,
// so the relays transmit while the server is still busy.
Schedule build_schedule_pipeline(const Placement& p, const Demand& d);

// Dispatch by scheme name: proposed, hcc-a, hcc-b, hcc-c or pipeline.
Schedule build_schedule_by_name(const std::string& scheme, const Placement& p,
                                const Demand& d);

struct Timeline;

// Header symbol_id,link,phase,start,length_bits,xor_terms,depends_on; one row
// per symbol in id order; semicolon-joined lists; deterministic bytes.
std::string schedule_to_csv(const Schedule& s, const Timeline& t);

}  // namespace hiercache
