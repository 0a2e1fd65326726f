#include "hiercache/sets.hpp"

#include <stdexcept>

namespace hiercache {

std::vector<int> members(Mask m) {
  std::vector<int> out;
  for (int b = 0; m != 0; ++b, m >>= 1) {
    if (m & 1u) out.push_back(b + 1);
  }
  return out;
}

namespace {

void subsets_rec(const std::vector<int>& elems, std::size_t from, Mask cur,
                 std::vector<Mask>& out) {
  out.push_back(cur);
  for (std::size_t i = from; i < elems.size(); ++i) {
    subsets_rec(elems, i + 1, with(cur, elems[i]), out);
  }
}

void combos_rec(const std::vector<int>& elems, std::size_t from, int left, Mask cur,
                std::vector<Mask>& out) {
  if (left == 0) {
    out.push_back(cur);
    return;
  }
  // Not enough members remain to finish the combination.
  if (elems.size() - from < static_cast<std::size_t>(left)) return;
  for (std::size_t i = from; i < elems.size(); ++i) {
    combos_rec(elems, i + 1, left - 1, with(cur, elems[i]), out);
  }
}

}  // namespace

std::vector<Mask> subsets_lex(Mask universe) {
  std::vector<Mask> out;
  subsets_rec(members(universe), 0, 0, out);
  return out;
}

std::vector<Mask> combinations_lex(Mask universe, int k) {
  if (k < 0) throw std::invalid_argument("combinations_lex: negative size");
  std::vector<Mask> out;
  combos_rec(members(universe), 0, k, 0, out);
  return out;
}

std::string format_set(Mask m) {
  std::string s;
  for (int v : members(m)) {
    if (!s.empty()) s += '.';
    s += std::to_string(v);
  }
  return s;
}

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

}  // namespace hiercache
