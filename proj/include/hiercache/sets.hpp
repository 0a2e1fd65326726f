#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace hiercache {

// Small index sets (relays, users) are bit masks. Bit b stands for member b+1,
// so masks stay 1-based at the API surface like everything else in the model.
using Mask = std::uint32_t;

inline int set_size(Mask m) { return std::popcount(m); }
inline bool contains(Mask m, int member) { return (m >> (member - 1)) & 1u; }
inline Mask with(Mask m, int member) { return m | (Mask{1} << (member - 1)); }
inline Mask without(Mask m, int member) { return m & ~(Mask{1} << (member - 1)); }
inline Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }

// Members of a mask in ascending order, 1-based.
std::vector<int> members(Mask m);

// All subsets of the members of `universe`, ordered lexicographically by their
// sorted member lists: {}, {1}, {1,2}, {1,2,3}, {1,3}, {2}, ...
std::vector<Mask> subsets_lex(Mask universe);

// Size-k subsets of `universe` in the same lexicographic order.
std::vector<Mask> combinations_lex(Mask universe, int k);

// "1.3.4" for {1,3,4}; empty string for the empty set.
std::string format_set(Mask m);

// n choose k as a double (large networks overflow 64-bit counts).
double choose(int n, int k);

}  // namespace hiercache
