#include "hiercache/decode.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "hiercache/errors.hpp"

namespace hiercache {

namespace {

using TermKey = std::tuple<int, Mask, Mask, Mask, Mask, int>;

TermKey key_of(const XorTerm& t) {
  return {t.file, t.q_mask, t.q_care, t.s_mask, t.s_care, t.region};
}

struct TermStore {
  const BitPartition& part;
  const BitLibrary& lib;
  std::map<TermKey, std::size_t> index;
  std::vector<std::vector<std::uint32_t>> walks;      // positions, walk order
  std::vector<std::vector<std::uint64_t>> walk_bits;  // packed library bits

  explicit TermStore(const Placement& p) : part(p.partition), lib(p.library) {}

  // Positions matching the term's class pattern, in the canonical order every
  // node agrees on: region, then relay set, then user set, ascending, with
  // positions ascending inside each class.
  std::size_t materialize(const XorTerm& t) {
    const auto it = index.find(key_of(t));
    if (it != index.end()) return it->second;

    std::vector<std::uint32_t> walk;
    for (int region = 1; region <= 2; ++region) {
      if (t.region != 0 && t.region != region) continue;
      for (Mask q = 0; q < (Mask{1} << part.k1); ++q) {
        if ((q & t.q_care) != t.q_mask) continue;
        for (Mask s = 0; s < (Mask{1} << part.users); ++s) {
          if ((s & t.s_care) != t.s_mask) continue;
          const int bin = part.bin_id(region, q, s);
          const auto& off = part.bin_offset[static_cast<std::size_t>(t.file - 1)];
          const auto& pos = part.positions[static_cast<std::size_t>(t.file - 1)];
          for (std::uint32_t k = off[static_cast<std::size_t>(bin)];
               k < off[static_cast<std::size_t>(bin) + 1]; ++k)
            walk.push_back(pos[k]);
        }
      }
    }
    std::vector<std::uint64_t> bits((walk.size() + 63) / 64, 0);
    for (std::size_t j = 0; j < walk.size(); ++j)
      if (lib.bit(t.file, walk[j])) bits[j >> 6] |= std::uint64_t{1} << (j & 63);

    const std::size_t id = walks.size();
    walks.push_back(std::move(walk));
    walk_bits.push_back(std::move(bits));
    index.emplace(key_of(t), id);
    return id;
  }
};

bool walk_bit(const std::vector<std::uint64_t>& bits, std::uint64_t j) {
  return (bits[j >> 6] >> (j & 63)) & 1u;
}

}  // namespace

DecodeReport decode_all(const Schedule& s, const Placement& p,
                        const Demand& d) {
  if (p.fractional)
    throw DomainError("decoding needs a bit-level placement");
  const NetworkConfig& cfg = p.cfg;
  if (static_cast<int>(d.file_of.size()) != cfg.users())
    throw DomainError("demand must name one file per user");

  TermStore store(p);
  const std::uint64_t F = cfg.file_bits;

  DecodeReport report;
  for (int relay = 1; relay <= cfg.k1; ++relay) {
    for (int slot = 1; slot <= cfg.k2; ++slot) {
      const UserId uid{relay, slot};
      const int u = user_index(cfg, uid) + 1;  // 1-based over all users
      const int file = d.file_of[u - 1];
      UserDecodeResult res;
      res.user = uid;

      std::vector<std::uint64_t> assembled((F + 63) / 64, 0);
      std::vector<std::uint64_t> have((F + 63) / 64, 0);
      for (std::uint32_t pos :
           p.caches.user[static_cast<std::size_t>(u - 1)]
                        [static_cast<std::size_t>(file - 1)]) {
        if (p.library.bit(file, pos))
          assembled[pos >> 6] |= std::uint64_t{1} << (pos & 63);
        have[pos >> 6] |= std::uint64_t{1} << (pos & 63);
      }

      bool clean = true;
      for (const Symbol& sym : s.symbols) {
        if (sym.link != relay || sym.bits == 0) continue;
        const XorTerm* target = nullptr;
        for (const XorTerm& t : sym.terms) {
          const bool cares = (t.s_care >> (u - 1)) & 1u;
          const bool in_set = (t.s_mask >> (u - 1)) & 1u;
          if (t.file == file && cares && !in_set) {
            if (target != nullptr) {
              clean = false;
              break;
            }
            target = &t;
          }
        }
        if (!clean) break;
        if (target == nullptr) continue;

        // Every other operand must lie inside the user's cache.
        bool cancelable = true;
        for (const XorTerm& t : sym.terms) {
          if (&t == target) continue;
          const bool cares = (t.s_care >> (u - 1)) & 1u;
          const bool in_set = (t.s_mask >> (u - 1)) & 1u;
          if (!(cares && in_set)) {
            cancelable = false;
            break;
          }
        }
        if (!cancelable) {
          clean = false;
          break;
        }

        const std::size_t target_id = store.materialize(*target);
        const auto& walk = store.walks[target_id];
        std::vector<std::size_t> other_ids;
        for (const XorTerm& t : sym.terms)
          if (&t != target) other_ids.push_back(store.materialize(t));

        const std::uint64_t lo = sym.slice_begin;
        const std::uint64_t hi = sym.slice_begin + sym.bits;
        for (std::uint64_t g = lo; g < hi && g < walk.size(); ++g) {
          // Wire bit = XOR of every operand's bit at this walk index; the
          // user strips the cached operands and keeps the target's bit.
          bool v = walk_bit(store.walk_bits[target_id], g);
          for (std::size_t oid : other_ids)
            if (g < store.walks[oid].size())
              v ^= walk_bit(store.walk_bits[oid], g);
          for (std::size_t oid : other_ids)
            if (g < store.walks[oid].size())
              v ^= walk_bit(store.walk_bits[oid], g);
          const std::uint32_t pos = walk[g];
          if (v) assembled[pos >> 6] |= std::uint64_t{1} << (pos & 63);
          have[pos >> 6] |= std::uint64_t{1} << (pos & 63);
        }
      }

      std::uint64_t missing = 0;
      std::vector<std::uint64_t> missing_mask((F + 63) / 64, 0);
      for (std::uint64_t pos = 0; pos < F; ++pos) {
        const bool got = (have[pos >> 6] >> (pos & 63)) & 1u;
        const bool ok =
            got && (((assembled[pos >> 6] >> (pos & 63)) & 1u) ==
                    static_cast<std::uint64_t>(p.library.bit(file, pos)));
        if (!ok) {
          ++missing;
          missing_mask[pos >> 6] |= std::uint64_t{1} << (pos & 63);
        }
      }
      res.exact = clean && missing == 0;
      res.missing_bits = missing;

      if (missing > 0) {
        // Name the classes the uncovered positions fall into.
        for (int region = 1; region <= 2 && res.missing_classes.size() < 8;
             ++region) {
          for (Mask q = 0; q < (Mask{1} << cfg.k1); ++q) {
            for (Mask s = 0; s < (Mask{1} << cfg.users()); ++s) {
              const int bin = p.partition.bin_id(region, q, s);
              const auto& off =
                  p.partition.bin_offset[static_cast<std::size_t>(file - 1)];
              const auto& pos =
                  p.partition.positions[static_cast<std::size_t>(file - 1)];
              bool hit = false;
              for (std::uint32_t k = off[static_cast<std::size_t>(bin)];
                   !hit && k < off[static_cast<std::size_t>(bin) + 1]; ++k)
                hit = (missing_mask[pos[k] >> 6] >> (pos[k] & 63)) & 1u;
              if (hit) {
                XorTerm t;
                t.file = file;
                t.q_mask = q;
                t.q_care = full_mask(cfg.k1);
                t.s_mask = s;
                t.s_care = full_mask(cfg.users());
                t.region = static_cast<std::uint8_t>(region);
                res.missing_classes.push_back(
                    format_xor_term(t, cfg.k1, cfg.users()));
                if (res.missing_classes.size() >= 8) break;
              }
            }
            if (res.missing_classes.size() >= 8) break;
          }
        }
      }
      report.users.push_back(std::move(res));
    }
  }
  return report;
}

}  // namespace hiercache
