#include "hiercache/placement.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "hiercache/errors.hpp"

namespace hiercache {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Budgets are floors of products like m*F/n. The multiply can land a hair
// under an exact integer, so nudge before truncating.
std::uint64_t floor_units(double x) {
  if (x <= 0.0) return 0;
  return static_cast<std::uint64_t>(x * (1.0 + 4e-13) + 1e-9);
}

// Unbiased bounded draw (multiply-shift with rejection).
std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(g()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = static_cast<unsigned __int128>(g()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Draws k distinct positions from [lo, hi) by a partial shuffle, then returns
// them sorted. scratch is reused across calls to avoid reallocation.
void sample_positions(std::mt19937_64& g, std::uint64_t lo, std::uint64_t hi,
                      std::uint64_t k, std::vector<std::uint32_t>& out,
                      std::vector<std::uint32_t>& scratch) {
  out.clear();
  const std::uint64_t size = hi - lo;
  if (k > size) throw InconsistentPlacementError("cache budget exceeds region size");
  if (k == 0) return;
  scratch.resize(size);
  std::iota(scratch.begin(), scratch.end(), static_cast<std::uint32_t>(lo));
  for (std::uint64_t j = 0; j < k; ++j) {
    std::uint64_t pick = j + bounded(g, size - j);
    std::swap(scratch[j], scratch[pick]);
  }
  out.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
}

void fill_library(BitLibrary& lib, int n_files, std::uint64_t file_bits,
                  std::mt19937_64& g) {
  lib.file_bits = file_bits;
  const std::uint64_t words = (file_bits + 63) / 64;
  lib.words.assign(static_cast<std::size_t>(n_files),
                   std::vector<std::uint64_t>(words, 0));
  for (auto& fw : lib.words) {
    for (auto& w : fw) w = g();
    if (file_bits % 64 != 0 && !fw.empty())
      fw.back() &= (std::uint64_t{1} << (file_bits % 64)) - 1;
  }
}

// Buckets every position of every file by (region, relay set, user set).
BitPartition build_partition(const NetworkConfig& cfg, std::uint64_t region1_bits,
                             const NodeCaches& caches) {
  const int users = cfg.users();
  if (cfg.k1 + users > 20)
    throw DomainError("bit-level placement supports at most 20 caching nodes");
  const std::uint64_t F = cfg.file_bits;

  BitPartition part;
  part.k1 = cfg.k1;
  part.users = users;
  part.file_bits = F;
  part.region1_bits = region1_bits;
  part.bins_per_region = 1 << (cfg.k1 + users);
  const int total_bins = 2 * part.bins_per_region;
  part.positions.assign(static_cast<std::size_t>(cfg.n_files), {});
  part.bin_offset.assign(static_cast<std::size_t>(cfg.n_files), {});

  const std::uint64_t words = (F + 63) / 64;
  std::vector<std::vector<std::uint64_t>> nodebits(
      static_cast<std::size_t>(cfg.k1 + users));

  for (int f = 0; f < cfg.n_files; ++f) {
    for (auto& nb : nodebits) nb.assign(words, 0);
    for (int i = 0; i < cfg.k1; ++i)
      for (std::uint32_t p : caches.relay[i][f])
        nodebits[i][p >> 6] |= std::uint64_t{1} << (p & 63);
    for (int u = 0; u < users; ++u)
      for (std::uint32_t p : caches.user[u][f])
        nodebits[cfg.k1 + u][p >> 6] |= std::uint64_t{1} << (p & 63);

    std::vector<std::uint32_t> counts(static_cast<std::size_t>(total_bins), 0);
    std::vector<int> bin_of(static_cast<std::size_t>(F));
    for (std::uint64_t p = 0; p < F; ++p) {
      Mask q = 0, s = 0;
      for (int i = 0; i < cfg.k1; ++i)
        if ((nodebits[i][p >> 6] >> (p & 63)) & 1u) q |= Mask{1} << i;
      for (int u = 0; u < users; ++u)
        if ((nodebits[cfg.k1 + u][p >> 6] >> (p & 63)) & 1u) s |= Mask{1} << u;
      int region = p < region1_bits ? 1 : 2;
      int bin = part.bin_id(region, q, s);
      bin_of[p] = bin;
      ++counts[static_cast<std::size_t>(bin)];
    }

    auto& offs = part.bin_offset[f];
    offs.assign(static_cast<std::size_t>(total_bins) + 1, 0);
    for (int b = 0; b < total_bins; ++b)
      offs[static_cast<std::size_t>(b) + 1] =
          offs[static_cast<std::size_t>(b)] + counts[static_cast<std::size_t>(b)];
    std::vector<std::uint32_t> cursor(offs.begin(), offs.end() - 1);
    auto& pos = part.positions[f];
    pos.resize(static_cast<std::size_t>(F));
    for (std::uint64_t p = 0; p < F; ++p)
      pos[cursor[static_cast<std::size_t>(bin_of[p])]++] =
          static_cast<std::uint32_t>(p);
  }
  return part;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint32_t read_u32(std::istream& in) {
  char b[4];
  in.read(b, 4);
  if (in.gcount() != 4) throw ParseError("truncated cache state");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  char b[8];
  in.read(b, 8);
  if (in.gcount() != 8) throw ParseError("truncated cache state");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

void write_position_runs(std::ostream& out, const std::vector<std::uint32_t>& pos) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;
  for (std::size_t i = 0; i < pos.size();) {
    std::size_t j = i + 1;
    while (j < pos.size() && pos[j] == pos[j - 1] + 1) ++j;
    runs.emplace_back(pos[i], j - i);
    i = j;
  }
  write_u64(out, runs.size());
  for (const auto& [start, len] : runs) {
    write_u64(out, start);
    write_u64(out, len);
  }
}

std::vector<std::uint32_t> read_position_runs(std::istream& in,
                                              std::uint64_t file_bits) {
  std::uint64_t nruns = read_u64(in);
  std::vector<std::uint32_t> pos;
  std::uint64_t prev_end = 0;
  bool first = true;
  for (std::uint64_t r = 0; r < nruns; ++r) {
    std::uint64_t start = read_u64(in);
    std::uint64_t len = read_u64(in);
    if (len == 0 || start + len > file_bits || (!first && start < prev_end))
      throw ParseError("malformed cache state run");
    for (std::uint64_t p = start; p < start + len; ++p)
      pos.push_back(static_cast<std::uint32_t>(p));
    prev_end = start + len;
    first = false;
  }
  return pos;
}

}  // namespace

FracParams fractional_params(const NetworkConfig& cfg) {
  FracParams fp;
  fp.w1 = cfg.alpha;
  fp.w2 = 1.0 - cfg.alpha;
  if (cfg.alpha > 0.0) {
    fp.a1 = clamp01(cfg.m1 / (cfg.alpha * cfg.n_files));
    fp.b1 = clamp01(cfg.beta * cfg.m2 / (cfg.alpha * cfg.n_files));
  }
  if (cfg.alpha < 1.0)
    fp.c2 = clamp01((1.0 - cfg.beta) * cfg.m2 / ((1.0 - cfg.alpha) * cfg.n_files));
  return fp;
}

Placement fractional_place(const NetworkConfig& cfg) {
  Placement p;
  p.fractional = true;
  p.cfg = cfg;
  p.frac = fractional_params(cfg);
  return p;
}

double fractional_class_mass(const NetworkConfig& cfg, Mask relay_set,
                             Mask user_set) {
  const FracParams fp = fractional_params(cfg);
  const int users = cfg.users();
  double mass1 = fp.w1;
  for (int i = 0; i < cfg.k1; ++i)
    mass1 *= contains(relay_set, i + 1) ? fp.a1 : 1.0 - fp.a1;
  for (int u = 0; u < users; ++u)
    mass1 *= contains(user_set, u + 1) ? fp.b1 : 1.0 - fp.b1;
  double mass2 = 0.0;
  if (relay_set == 0) {
    mass2 = fp.w2;
    for (int u = 0; u < users; ++u)
      mass2 *= contains(user_set, u + 1) ? fp.c2 : 1.0 - fp.c2;
  }
  return mass1 + mass2;
}

Placement decentralized_place(const NetworkConfig& cfg, std::uint64_t seed) {
  if (cfg.file_bits == 0) throw DomainError("file_bits must be positive");
  if (cfg.file_bits > 0xFFFFFFFFull)
    throw DomainError("file_bits too large for bit-level placement");
  const int users = cfg.users();
  const std::uint64_t F = cfg.file_bits;
  const std::uint64_t F1 = floor_units(cfg.alpha * static_cast<double>(F));

  const std::uint64_t relay_budget =
      std::min(floor_units(cfg.m1 * static_cast<double>(F) / cfg.n_files), F1);
  const std::uint64_t user_total =
      floor_units(cfg.m2 * static_cast<double>(F) / cfg.n_files);
  const std::uint64_t user_budget1 = std::min(
      floor_units(cfg.beta * cfg.m2 * static_cast<double>(F) / cfg.n_files), F1);
  const std::uint64_t user_budget2 = std::min(
      user_total > user_budget1 ? user_total - user_budget1 : 0, F - F1);

  Placement p;
  p.fractional = false;
  p.cfg = cfg;
  p.frac = fractional_params(cfg);

  std::mt19937_64 rng(seed);
  fill_library(p.library, cfg.n_files, F, rng);

  p.caches.relay.assign(static_cast<std::size_t>(cfg.k1),
                        std::vector<std::vector<std::uint32_t>>(
                            static_cast<std::size_t>(cfg.n_files)));
  p.caches.user.assign(static_cast<std::size_t>(users),
                       std::vector<std::vector<std::uint32_t>>(
                           static_cast<std::size_t>(cfg.n_files)));

  std::vector<std::uint32_t> scratch;
  std::vector<std::uint32_t> picks;
  for (int f = 0; f < cfg.n_files; ++f) {
    for (int i = 0; i < cfg.k1; ++i) {
      sample_positions(rng, 0, F1, relay_budget, picks, scratch);
      p.caches.relay[i][f] = picks;
    }
    for (int u = 0; u < users; ++u) {
      sample_positions(rng, 0, F1, user_budget1, picks, scratch);
      p.caches.user[u][f] = picks;
      sample_positions(rng, F1, F, user_budget2, picks, scratch);
      auto& dst = p.caches.user[u][f];
      dst.insert(dst.end(), picks.begin(), picks.end());
    }
  }

  p.partition = build_partition(cfg, F1, p.caches);
  return p;
}

Placement centralized_fixture(std::uint64_t file_bits) {
  if (file_bits == 0 || file_bits % 2 != 0)
    throw DomainError("fixture needs a positive even file_bits");

  NetworkConfig cfg;
  cfg.n_files = 4;
  cfg.k1 = 2;
  cfg.k2 = 2;
  cfg.m1 = 2.0;
  cfg.m2 = 0.0;
  cfg.file_bits = file_bits;
  cfg.alpha = 1.0;
  cfg.beta = 1.0;

  Placement p;
  p.fractional = false;
  p.cfg = cfg;
  p.frac = fractional_params(cfg);

  std::mt19937_64 rng(0);
  fill_library(p.library, cfg.n_files, file_bits, rng);

  const std::uint64_t half = file_bits / 2;
  p.caches.relay.assign(2, std::vector<std::vector<std::uint32_t>>(4));
  p.caches.user.assign(4, std::vector<std::vector<std::uint32_t>>(4));
  for (int f = 0; f < 4; ++f) {
    auto& first = p.caches.relay[0][f];
    auto& second = p.caches.relay[1][f];
    first.resize(half);
    second.resize(half);
    std::iota(first.begin(), first.end(), 0u);
    std::iota(second.begin(), second.end(), static_cast<std::uint32_t>(half));
  }

  p.partition = build_partition(cfg, file_bits, p.caches);
  return p;
}

std::uint64_t matching_bits(const BitPartition& part, int file, int region,
                            Mask q_mask, Mask q_care, Mask s_mask, Mask s_care) {
  std::uint64_t total = 0;
  const int qn = 1 << part.k1;
  const int sn = 1 << part.users;
  for (int q = 0; q < qn; ++q) {
    if ((static_cast<Mask>(q) & q_care) != q_mask) continue;
    for (int s = 0; s < sn; ++s) {
      if ((static_cast<Mask>(s) & s_care) != s_mask) continue;
      total += part.bin_size(file, part.bin_id(region, static_cast<Mask>(q),
                                               static_cast<Mask>(s)));
    }
  }
  return total;
}

void save_cache_states(const Placement& p, std::ostream& out) {
  out.write("HCCS", 4);
  out.put(static_cast<char>(1));
  write_u32(out, static_cast<std::uint32_t>(p.cfg.k1));
  write_u32(out, static_cast<std::uint32_t>(p.cfg.k2));
  write_u32(out, static_cast<std::uint32_t>(p.cfg.n_files));
  write_u64(out, p.cfg.file_bits);
  for (int i = 0; i < p.cfg.k1; ++i)
    for (int f = 0; f < p.cfg.n_files; ++f)
      write_position_runs(out, p.caches.relay[i][f]);
  for (int u = 0; u < p.cfg.users(); ++u)
    for (int f = 0; f < p.cfg.n_files; ++f)
      write_position_runs(out, p.caches.user[u][f]);
}

NodeCaches load_cache_states(std::istream& in, const NetworkConfig& cfg) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "HCCS", 4) != 0)
    throw ParseError("not a cache state file");
  int version = in.get();
  if (version != 1) throw ParseError("unsupported cache state version");
  if (read_u32(in) != static_cast<std::uint32_t>(cfg.k1) ||
      read_u32(in) != static_cast<std::uint32_t>(cfg.k2) ||
      read_u32(in) != static_cast<std::uint32_t>(cfg.n_files) ||
      read_u64(in) != cfg.file_bits)
    throw ParseError("cache state does not match this network");

  NodeCaches caches;
  caches.relay.assign(static_cast<std::size_t>(cfg.k1),
                      std::vector<std::vector<std::uint32_t>>(
                          static_cast<std::size_t>(cfg.n_files)));
  caches.user.assign(static_cast<std::size_t>(cfg.users()),
                     std::vector<std::vector<std::uint32_t>>(
                         static_cast<std::size_t>(cfg.n_files)));
  for (int i = 0; i < cfg.k1; ++i)
    for (int f = 0; f < cfg.n_files; ++f)
      caches.relay[i][f] = read_position_runs(in, cfg.file_bits);
  for (int u = 0; u < cfg.users(); ++u)
    for (int f = 0; f < cfg.n_files; ++f)
      caches.user[u][f] = read_position_runs(in, cfg.file_bits);
  return caches;
}

}  // namespace hiercache
