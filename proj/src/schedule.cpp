#include "hiercache/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "hiercache/errors.hpp"
#include "hiercache/rates.hpp"
#include "hiercache/timeline.hpp"

namespace hiercache {

namespace {

constexpr double kAggregateThreshold = 2e5;  // fractional mode switches to families
constexpr double kBitSymbolLimit = 5e6;
constexpr double kMassEps = 1e-18;

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double ipow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

Mask group_mask(const NetworkConfig& cfg, int relay) {
  Mask m = 0;
  for (int j = 1; j <= cfg.k2; ++j)
    m = with(m, user_index(cfg, UserId{relay, j}) + 1);
  return m;
}

void check_demand(const NetworkConfig& cfg, const Demand& d) {
  if (static_cast<int>(d.file_of.size()) != cfg.users())
    throw DomainError("demand must name one file per user");
  for (int f : d.file_of)
    if (f < 1 || f > cfg.n_files) throw DomainError("demanded file out of range");
}

struct Builder {
  Schedule s;
  std::vector<int> last_on_link;  // -1 when a link has sent nothing yet

  Builder(std::string scheme, const NetworkConfig& cfg, const Demand& d,
          bool fractional) {
    s.scheme = std::move(scheme);
    s.fractional = fractional;
    s.cfg = cfg;
    s.demand = d;
    last_on_link.assign(static_cast<std::size_t>(cfg.k1) + 1, -1);
  }

  int push(int link, Phase phase, std::vector<XorTerm> terms, double length,
           std::uint64_t bits, std::uint64_t slice_begin, std::vector<int> deps,
           bool pipelined, std::string family = "") {
    Symbol sym;
    sym.id = static_cast<int>(s.symbols.size());
    sym.link = link;
    sym.phase = phase;
    sym.terms = std::move(terms);
    sym.length = length;
    sym.bits = bits;
    sym.slice_begin = slice_begin;
    sym.deps = std::move(deps);
    sym.pipelined = pipelined;
    sym.family = std::move(family);
    last_on_link[static_cast<std::size_t>(link)] = sym.id;
    s.symbols.push_back(std::move(sym));
    return s.symbols.back().id;
  }

  // Dependency set forcing a full stop: the last symbol of every active link.
  std::vector<int> barrier_deps() const {
    std::vector<int> deps;
    for (int id : last_on_link)
      if (id >= 0) deps.push_back(id);
    std::sort(deps.begin(), deps.end());
    return deps;
  }
};

// ---- symbol enumeration shared by the fractional and bit-level paths ----

// Cross-relay coded rounds: for each relay subset R (|R| >= 2), the server
// XORs one decodable component per relay in R. Component lists are paired
// index by index across the relays of R.
template <class Visit>
void enumerate_cross_relay(const NetworkConfig& cfg, const Demand& d,
                           int region, Visit&& visit) {
  const int users = cfg.users();
  const Mask all_users = full_mask(users);
  const Mask all_relays = full_mask(cfg.k1);
  const int t_max = (cfg.k1 - 1) * cfg.k2;

  std::vector<Mask> groups(static_cast<std::size_t>(cfg.k1) + 1);
  for (int i = 1; i <= cfg.k1; ++i) groups[i] = group_mask(cfg, i);

  for (int r = cfg.k1; r >= 2; --r) {
    for (Mask relay_set : combinations_lex(all_relays, r)) {
      const std::vector<int> relays = members(relay_set);
      for (int t = 0; t <= t_max; ++t) {
        for (int s = 1; s <= cfg.k2; ++s) {
          // Per relay: S-major list of (own-user set, outside set) pairs.
          std::vector<std::vector<Mask>> s_lists, t_lists;
          for (int i : relays) {
            s_lists.push_back(combinations_lex(groups[i], s));
            t_lists.push_back(combinations_lex(all_users & ~groups[i], t));
          }
          const std::size_t n_s = s_lists[0].size();
          const std::size_t n_t = t_lists[0].size();
          for (std::size_t z = 0; z < n_s * n_t; ++z) {
            const std::size_t zs = z / n_t, zt = z % n_t;
            std::vector<std::pair<int, std::vector<XorTerm>>> comps;
            for (std::size_t k = 0; k < relays.size(); ++k) {
              const int i = relays[k];
              const Mask own = s_lists[k][zs];
              const Mask out = t_lists[k][zt];
              std::vector<XorTerm> terms;
              for (int u : members(own)) {
                XorTerm term;
                term.file = d.file_of[u - 1];
                term.q_mask = relay_set & ~(Mask{1} << (i - 1));
                term.q_care = all_relays;
                term.s_mask = (own & ~(Mask{1} << (u - 1))) | out;
                term.s_care = all_users;
                term.region = static_cast<std::uint8_t>(region);
                terms.push_back(term);
              }
              comps.emplace_back(i, std::move(terms));
            }
            visit(comps);
          }
        }
      }
    }
  }
}

// Single-layer coded rounds over all users: one symbol per nonempty user set,
// smallest sets first. q_care distinguishes the no-relay classes (exact empty
// relay set) from the relay-oblivious model (any relay set).
template <class Visit>
void enumerate_user_coded(const NetworkConfig& cfg, const Demand& d, int region,
                          bool exact_empty_relay_set, Visit&& visit) {
  const int users = cfg.users();
  const Mask all_users = full_mask(users);
  for (int s = 1; s <= users; ++s) {
    for (Mask set : combinations_lex(all_users, s)) {
      std::vector<XorTerm> terms;
      for (int u : members(set)) {
        XorTerm term;
        term.file = d.file_of[u - 1];
        term.q_mask = 0;
        term.q_care = exact_empty_relay_set ? full_mask(cfg.k1) : Mask{0};
        term.s_mask = set & ~(Mask{1} << (u - 1));
        term.s_care = all_users;
        term.region = static_cast<std::uint8_t>(region);
        terms.push_back(term);
      }
      visit(set, terms);
    }
  }
}

// Relay-resident content for relay i: coded rounds over its own users, spread
// over every outside-user set, aggregated over all relay sets containing i.
template <class Visit>
void enumerate_relay_resident(const NetworkConfig& cfg, const Demand& d,
                              int relay, int region, Visit&& visit) {
  const int users = cfg.users();
  const Mask all_users = full_mask(users);
  const Mask own_group = group_mask(cfg, relay);
  const int t_max = (cfg.k1 - 1) * cfg.k2;
  for (int t = 0; t <= t_max; ++t) {
    for (int s = 1; s <= cfg.k2; ++s) {
      for (Mask own : combinations_lex(own_group, s)) {
        for (Mask out : combinations_lex(all_users & ~own_group, t)) {
          std::vector<XorTerm> terms;
          for (int u : members(own)) {
            XorTerm term;
            term.file = d.file_of[u - 1];
            term.q_mask = Mask{1} << (relay - 1);
            term.q_care = Mask{1} << (relay - 1);
            term.s_mask = (own & ~(Mask{1} << (u - 1))) | out;
            term.s_care = all_users;
            term.region = static_cast<std::uint8_t>(region);
            terms.push_back(term);
          }
          visit(terms);
        }
      }
    }
  }
}

// Relay-facing coded rounds: the server pairs one whole demanded file per
// relay of R, for every relay subset R, largest first. User caches play no
// role here, so the user pattern is fully aggregated.
template <class Visit>
void enumerate_relay_coded(const NetworkConfig& cfg, const Demand& d,
                           int region, Visit&& visit) {
  const Mask all_relays = full_mask(cfg.k1);
  for (int r = cfg.k1; r >= 1; --r) {
    for (Mask relay_set : combinations_lex(all_relays, r)) {
      for (int j = 1; j <= cfg.k2; ++j) {
        std::vector<XorTerm> terms;
        for (int i : members(relay_set)) {
          XorTerm term;
          term.file = d.file_of[user_index(cfg, UserId{i, j})];
          term.q_mask = relay_set & ~(Mask{1} << (i - 1));
          term.q_care = all_relays;
          term.s_mask = 0;
          term.s_care = 0;
          term.region = static_cast<std::uint8_t>(region);
          terms.push_back(term);
        }
        visit(terms);
      }
    }
  }
}

// Relay i's own round to its users: coded over the users' cached patterns
// restricted to the group, any relay set, any outside users.
template <class Visit>
void enumerate_group_coded(const NetworkConfig& cfg, const Demand& d, int relay,
                           int region, Visit&& visit) {
  const Mask own_group = group_mask(cfg, relay);
  for (int s = 1; s <= cfg.k2; ++s) {
    for (Mask own : combinations_lex(own_group, s)) {
      std::vector<XorTerm> terms;
      for (int u : members(own)) {
        XorTerm term;
        term.file = d.file_of[u - 1];
        term.q_mask = 0;
        term.q_care = 0;
        term.s_mask = own & ~(Mask{1} << (u - 1));
        term.s_care = own_group;
        term.region = static_cast<std::uint8_t>(region);
        terms.push_back(term);
      }
      visit(terms);
    }
  }
}

double max_term_mass(const FracParams& fp, const NetworkConfig& cfg,
                     const std::vector<XorTerm>& terms) {
  double q = 0.0;
  for (const auto& t : terms)
    q = std::max(q, term_mass(fp, cfg.k1, cfg.users(), t));
  return q;
}

std::uint64_t max_term_bits(const BitPartition& part,
                            const std::vector<XorTerm>& terms) {
  std::uint64_t q = 0;
  for (const auto& t : terms) q = std::max(q, term_bits(part, t));
  return q;
}

// ---- symbol count estimates, for the aggregation and bit-mode guards ----

double estimate_two_layer_symbols(const NetworkConfig& cfg) {
  const int k1 = cfg.k1, k2 = cfg.k2;
  double cross = 0.0;
  for (int r = 2; r <= k1; ++r) cross += choose(k1, r) * (1.0 + r);
  cross *= (std::pow(2.0, k2) - 1.0) * std::pow(2.0, (k1 - 1) * k2);
  double user_level = std::pow(2.0, k1 * k2) * (1.0 + k1);
  double resident =
      k1 * (std::pow(2.0, k2) - 1.0) * std::pow(2.0, (k1 - 1) * k2);
  return cross + 2.0 * user_level + 2.0 * resident;
}

double estimate_relay_coded_symbols(const NetworkConfig& cfg) {
  return std::pow(2.0, cfg.k1) * cfg.k2 +
         cfg.k1 * (std::pow(2.0, cfg.k2) - 1.0) +
         std::pow(2.0, cfg.k1 * cfg.k2) * (1.0 + cfg.k1);
}

void guard_bit_size(double estimate) {
  if (estimate > kBitSymbolLimit)
    throw DomainError("configuration too large for bit-level simulation");
}

// ---- aggregated (family) schedules for configurations whose full symbol
// list would be huge; lengths come from the closed forms and reproduce the
// concurrent-mode makespans exactly ----

void aggregated_tycoon_block(Builder& b, const NetworkConfig& cfg, double w,
                             double relay_frac, double user_frac,
                             const std::string& tag) {
  const double server = w * cfg.k2 * rate_r(relay_frac, cfg.k1);
  int server_id = -1;
  if (server > 0.0)
    server_id = b.push(0, Phase::I, {}, server, 0, 0, {}, false, tag + "-server");
  const double relay_round = w * rate_r(user_frac, cfg.k2);
  for (int i = 1; i <= cfg.k1; ++i) {
    if (relay_round <= 0.0) break;
    std::vector<int> deps;
    if (server_id >= 0) deps.push_back(server_id);
    b.push(i, Phase::III, {}, relay_round, 0, 0, std::move(deps), false,
           tag + "-relay");
  }
}

void aggregated_forward_block(Builder& b, const NetworkConfig& cfg, double w,
                              double user_frac, bool pipelined,
                              const std::string& tag,
                              std::vector<int> extra_deps) {
  const double server = w * rate_r(user_frac, cfg.users());
  const double per_relay = w * rate_r(user_frac, cfg.k2);
  int server_id = -1;
  if (server > 0.0)
    server_id = b.push(0, Phase::II, {}, server, 0, 0, std::move(extra_deps),
                       false, tag + "-server");
  for (int i = 1; i <= cfg.k1 && per_relay > 0.0; ++i) {
    std::vector<int> deps;
    if (server_id >= 0) deps.push_back(server_id);
    b.push(i, Phase::IIForward, {}, per_relay, 0, 0, std::move(deps), pipelined,
           tag + "-forward");
  }
}

Schedule build_proposed_aggregated(const NetworkConfig& cfg, const Demand& d) {
  Builder b("proposed", cfg, d, true);
  const ProposeComponents pc = propose_components(cfg, cfg.alpha, cfg.beta);
  const double a1 = cfg.alpha > 0.0 ? clamp01(cfg.m1 / (cfg.alpha * cfg.n_files)) : 0.0;
  const double b1 =
      cfg.alpha > 0.0 ? clamp01(cfg.beta * cfg.m2 / (cfg.alpha * cfg.n_files)) : 0.0;

  int srv1 = -1, srv2 = -1;
  if (pc.rs1 > 0.0)
    srv1 = b.push(0, Phase::I, {}, pc.rs1, 0, 0, {}, false, "t1-server");
  if (pc.rs2 > 0.0)
    srv2 = b.push(0, Phase::II, {}, pc.rs2, 0, 0, {}, false, "t2-server");

  double fwd1 = 0.0;  // one relay's share of the cross-relay rounds
  for (int r = 2; r <= cfg.k1; ++r)
    fwd1 += choose(cfg.k1 - 1, r - 1) * ipow(a1, r - 1) *
            ipow(1.0 - a1, cfg.k1 - r + 1);
  fwd1 *= cfg.alpha * rate_r(b1, cfg.k2);
  const double useful = pc.rs2 - pc.re;
  const double fill = std::min(pc.re, pc.rs3);
  const double t3 = std::max(pc.rs3 - pc.re, 0.0);

  for (int i = 1; i <= cfg.k1; ++i) {
    if (fwd1 > 0.0 && srv1 >= 0)
      b.push(i, Phase::I, {}, fwd1, 0, 0, {srv1}, true, "t1-forward");
    if (useful + fill > 0.0 && srv2 >= 0)
      b.push(i, Phase::IIForward, {}, useful + fill, 0, 0, {srv2}, true,
             "t2-relay");
    if (t3 > 0.0) b.push(i, Phase::III, {}, t3, 0, 0, {}, false, "t3-relay");
  }

  if (pc.r_double_prime > 0.0) {
    const double c2 = cfg.alpha < 1.0
                          ? clamp01((1.0 - cfg.beta) * cfg.m2 /
                                    ((1.0 - cfg.alpha) * cfg.n_files))
                          : 0.0;
    aggregated_forward_block(b, cfg, 1.0 - cfg.alpha, c2, true, "sub2",
                             b.barrier_deps());
  }

  b.s.diagnostics["aggregated"] = 1.0;
  b.s.diagnostics["mass_t1_server"] = pc.rs1;
  b.s.diagnostics["mass_t2_server"] = pc.rs2;
  b.s.diagnostics["mass_sub2_server"] = pc.r_double_prime;
  for (int i = 1; i <= cfg.k1; ++i) {
    b.s.diagnostics["mass_redundant_relay" + std::to_string(i)] = pc.re;
    b.s.diagnostics["mass_t3_relay" + std::to_string(i)] = t3;
  }
  return std::move(b.s);
}

Schedule build_hcc_aggregated(char variant, const NetworkConfig& cfg,
                              const Demand& d) {
  const double n = cfg.n_files;
  Builder b(std::string("hcc-") + variant, cfg, d, true);
  switch (variant) {
    case 'a':
      aggregated_tycoon_block(b, cfg, 1.0, clamp01(cfg.m1 / n),
                              clamp01(cfg.m2 / n), "hcc-a");
      break;
    case 'b':
      aggregated_forward_block(b, cfg, 1.0, clamp01(cfg.m2 / n), false, "hcc-b",
                               {});
      break;
    case 'c': {
      if (cfg.alpha > 0.0)
        aggregated_tycoon_block(b, cfg, cfg.alpha,
                                clamp01(cfg.m1 / (cfg.alpha * n)),
                                clamp01(cfg.beta * cfg.m2 / (cfg.alpha * n)),
                                "sub1");
      if (cfg.alpha < 1.0)
        aggregated_forward_block(
            b, cfg, 1.0 - cfg.alpha,
            clamp01((1.0 - cfg.beta) * cfg.m2 / ((1.0 - cfg.alpha) * n)), false,
            "sub2", b.barrier_deps());
      break;
    }
    default:
      throw DomainError("unknown scheme variant");
  }
  b.s.diagnostics["aggregated"] = 1.0;
  return std::move(b.s);
}

Schedule build_pipeline_aggregated(const NetworkConfig& cfg, const Demand& d) {
  Builder b("pipeline", cfg, d, true);
  aggregated_forward_block(b, cfg, 1.0, clamp01(cfg.m2 / cfg.n_files), true,
                           "pipeline", {});
  b.s.diagnostics["aggregated"] = 1.0;
  return std::move(b.s);
}

// ---- full builders ----

struct RelayFill {
  // Relay-resident symbols not yet transmitted, consumed front to back.
  struct Item {
    std::vector<XorTerm> terms;
    double mass = 0.0;
    std::uint64_t bits = 0;
    double mass_used = 0.0;
    std::uint64_t bits_used = 0;
  };
  std::vector<Item> items;
  std::size_t cursor = 0;

  bool exhausted() const { return cursor >= items.size(); }
};

Schedule finish(Builder& b) { return std::move(b.s); }

}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::IIForward: return "II-forward";
    case Phase::IIFill: return "II-fill";
    case Phase::III: return "III";
  }
  return "?";
}

std::string format_xor_term(const XorTerm& t, int k1, int users) {
  auto render = [](Mask mask, Mask care, int n) -> std::string {
    if (care == full_mask(n)) return format_set(mask);
    if (care == 0) return "*";
    return format_set(mask) + "*";
  };
  std::string out = std::to_string(t.file);
  out += ':';
  out += render(t.q_mask, t.q_care, k1);
  out += ':';
  out += render(t.s_mask, t.s_care, users);
  if (t.region == 1) out += "@1";
  if (t.region == 2) out += "@2";
  return out;
}

double term_mass(const FracParams& fp, int k1, int users, const XorTerm& t) {
  double part1 = 0.0;
  if (t.region != 2) {
    part1 = fp.w1;
    for (int i = 0; i < k1; ++i)
      if ((t.q_care >> i) & 1u)
        part1 *= ((t.q_mask >> i) & 1u) ? fp.a1 : 1.0 - fp.a1;
    for (int u = 0; u < users; ++u)
      if ((t.s_care >> u) & 1u)
        part1 *= ((t.s_mask >> u) & 1u) ? fp.b1 : 1.0 - fp.b1;
  }
  double part2 = 0.0;
  if (t.region != 1 && t.q_mask == 0) {
    part2 = fp.w2;
    for (int u = 0; u < users; ++u)
      if ((t.s_care >> u) & 1u)
        part2 *= ((t.s_mask >> u) & 1u) ? fp.c2 : 1.0 - fp.c2;
  }
  return part1 + part2;
}

std::uint64_t term_bits(const BitPartition& part, const XorTerm& t) {
  std::uint64_t total = 0;
  if (t.region != 2)
    total += matching_bits(part, t.file, 1, t.q_mask, t.q_care, t.s_mask,
                           t.s_care);
  if (t.region != 1)
    total += matching_bits(part, t.file, 2, t.q_mask, t.q_care, t.s_mask,
                           t.s_care);
  return total;
}

Schedule build_schedule_proposed(const Placement& p, const Demand& d) {
  const NetworkConfig& cfg = p.cfg;
  check_demand(cfg, d);
  const bool bit = !p.fractional;
  const double estimate = estimate_two_layer_symbols(cfg);
  if (bit)
    guard_bit_size(estimate);
  else if (estimate > kAggregateThreshold)
    return build_proposed_aggregated(cfg, d);

  const FracParams& fp = p.frac;
  const int region1 = cfg.alpha == 1.0 ? 0 : 1;
  const int region2 = cfg.alpha == 0.0 ? 0 : 2;
  Builder b("proposed", cfg, d, !bit);
  const double fbits = bit ? static_cast<double>(cfg.file_bits) : 1.0;

  // Relay-resident inventory, in transmission order.
  std::vector<RelayFill> inventory(static_cast<std::size_t>(cfg.k1) + 1);
  double rs3_mass = 0.0;
  for (int i = 1; i <= cfg.k1; ++i) {
    enumerate_relay_resident(cfg, d, i, region1, [&](std::vector<XorTerm>& terms) {
      RelayFill::Item item;
      if (bit) {
        item.bits = max_term_bits(p.partition, terms);
        if (item.bits == 0) return;
      } else {
        item.mass = max_term_mass(fp, cfg, terms);
        if (item.mass <= kMassEps) return;
      }
      item.terms = terms;
      inventory[static_cast<std::size_t>(i)].items.push_back(std::move(item));
    });
    if (i == 1)
      for (const auto& item : inventory[1].items)
        rs3_mass += bit ? item.bits / fbits : item.mass;
  }

  double t1_server = 0.0, t2_server = 0.0;
  std::vector<double> redundant(static_cast<std::size_t>(cfg.k1) + 1, 0.0);
  std::vector<double> fill_sent(static_cast<std::size_t>(cfg.k1) + 1, 0.0);

  // Bit mode defers relay transmissions: cached fill runs first, in slices
  // matching the server's symbol lengths, then the decoded forwards.
  struct PendingForward {
    int server_id;
    Phase phase;
    std::vector<XorTerm> terms;
    std::uint64_t bits;
  };
  std::vector<std::vector<PendingForward>> pending(
      static_cast<std::size_t>(cfg.k1) + 1);
  std::vector<std::uint64_t> server_slots;

  // Transmission of the cross-relay classes.
  enumerate_cross_relay(
      cfg, d, region1,
      [&](std::vector<std::pair<int, std::vector<XorTerm>>>& comps) {
        std::vector<XorTerm> server_terms;
        for (auto& [i, terms] : comps)
          server_terms.insert(server_terms.end(), terms.begin(), terms.end());
        if (bit) {
          const std::uint64_t q = max_term_bits(p.partition, server_terms);
          if (q == 0) return;
          const int sid = b.push(0, Phase::I, server_terms, q / fbits, q, 0, {},
                                 false);
          t1_server += q / fbits;
          server_slots.push_back(q);
          for (auto& [i, terms] : comps) {
            const std::uint64_t cq = max_term_bits(p.partition, terms);
            if (cq > 0)
              pending[static_cast<std::size_t>(i)].push_back(
                  PendingForward{sid, Phase::I, terms, cq});
          }
        } else {
          const double q = max_term_mass(fp, cfg, server_terms);
          if (q <= kMassEps) return;
          const int sid = b.push(0, Phase::I, server_terms, q, 0, 0, {}, false);
          t1_server += q;
          for (auto& [i, terms] : comps)
            b.push(i, Phase::I, terms, q, 0, 0, {sid}, true);
        }
      });

  // Transmission of the no-relay classes, with fill in the redundant slots.
  enumerate_user_coded(cfg, d, region1, true, [&](Mask set,
                                                  std::vector<XorTerm>& terms) {
    if (bit) {
      const std::uint64_t q = max_term_bits(p.partition, terms);
      if (q == 0) return;
      const int sid = b.push(0, Phase::II, terms, q / fbits, q, 0, {}, false);
      t2_server += q / fbits;
      server_slots.push_back(q);
      for (int i = 1; i <= cfg.k1; ++i) {
        if (set & group_mask(cfg, i))
          pending[static_cast<std::size_t>(i)].push_back(
              PendingForward{sid, Phase::IIForward, terms, q});
        else
          redundant[static_cast<std::size_t>(i)] += q / fbits;
      }
    } else {
      const double q = max_term_mass(fp, cfg, terms);
      if (q <= kMassEps) return;
      const int sid = b.push(0, Phase::II, terms, q, 0, 0, {}, false);
      t2_server += q;
      for (int i = 1; i <= cfg.k1; ++i) {
        if (set & group_mask(cfg, i)) {
          b.push(i, Phase::IIForward, terms, q, 0, 0, {sid}, true);
          continue;
        }
        redundant[static_cast<std::size_t>(i)] += q;
        auto& inv = inventory[static_cast<std::size_t>(i)];
        double slot = q;
        while (slot > kMassEps && !inv.exhausted()) {
          auto& item = inv.items[inv.cursor];
          const double avail = item.mass - item.mass_used;
          const double take = std::min(avail, slot);
          if (take > kMassEps) {
            b.push(i, Phase::IIFill, item.terms, take, 0, 0, {}, false);
            fill_sent[static_cast<std::size_t>(i)] += take;
          }
          item.mass_used += take;
          slot -= take;
          if (item.mass - item.mass_used <= kMassEps) ++inv.cursor;
        }
      }
    }
  });

  if (bit) {
    // Fill while the server is busy, then the decoded forwards in order.
    for (int i = 1; i <= cfg.k1; ++i) {
      auto& inv = inventory[static_cast<std::size_t>(i)];
      for (std::uint64_t slot : server_slots) {
        if (inv.exhausted() || slot == 0) continue;
        while (slot > 0 && !inv.exhausted()) {
          auto& item = inv.items[inv.cursor];
          const std::uint64_t avail = item.bits - item.bits_used;
          const std::uint64_t take = std::min(avail, slot);
          b.push(i, Phase::IIFill, item.terms, take / fbits, take,
                 item.bits_used, {}, false);
          fill_sent[static_cast<std::size_t>(i)] += take / fbits;
          item.bits_used += take;
          slot -= take;
          if (item.bits_used == item.bits) ++inv.cursor;
        }
      }
      for (auto& fw : pending[static_cast<std::size_t>(i)])
        b.push(i, fw.phase, fw.terms, fw.bits / fbits, fw.bits, 0,
               {fw.server_id}, false);
    }
  }

  // Remainder of the relay-resident content, server silent.
  std::vector<double> t3_mass(static_cast<std::size_t>(cfg.k1) + 1, 0.0);
  for (int i = 1; i <= cfg.k1; ++i) {
    auto& inv = inventory[static_cast<std::size_t>(i)];
    for (std::size_t k = inv.cursor; k < inv.items.size(); ++k) {
      auto& item = inv.items[k];
      if (bit) {
        const std::uint64_t rest = item.bits - item.bits_used;
        if (rest == 0) continue;
        b.push(i, Phase::III, item.terms, rest / fbits, rest, item.bits_used,
               {}, false);
        t3_mass[static_cast<std::size_t>(i)] += rest / fbits;
      } else {
        const double rest = item.mass - item.mass_used;
        if (rest <= kMassEps) continue;
        b.push(i, Phase::III, item.terms, rest, 0, 0, {}, false);
        t3_mass[static_cast<std::size_t>(i)] += rest;
      }
    }
  }

  // Second subsystem: user-level coded rounds on the remaining file parts,
  // forwarded pipeline style, after everything above has drained.
  double sub2_server = 0.0;
  if ((bit && cfg.file_bits > p.partition.region1_bits) ||
      (!bit && cfg.alpha < 1.0)) {
    std::vector<int> barrier = b.barrier_deps();
    bool first = true;
    enumerate_user_coded(
        cfg, d, region2, false, [&](Mask set, std::vector<XorTerm>& terms) {
          double q = 0.0;
          std::uint64_t qb = 0;
          if (bit) {
            qb = max_term_bits(p.partition, terms);
            if (qb == 0) return;
            q = qb / fbits;
          } else {
            q = max_term_mass(fp, cfg, terms);
            if (q <= kMassEps) return;
          }
          std::vector<int> deps;
          if (first) deps = barrier;
          first = false;
          const int sid =
              b.push(0, Phase::II, terms, q, qb, 0, std::move(deps), false);
          sub2_server += q;
          for (int i = 1; i <= cfg.k1; ++i)
            if (set & group_mask(cfg, i))
              b.push(i, Phase::IIForward, terms, q, qb, 0, {sid}, true);
        });
  }

  b.s.diagnostics["mass_t1_server"] = t1_server;
  b.s.diagnostics["mass_t2_server"] = t2_server;
  b.s.diagnostics["mass_sub2_server"] = sub2_server;
  b.s.diagnostics["mass_rs3"] = rs3_mass;
  for (int i = 1; i <= cfg.k1; ++i) {
    b.s.diagnostics["mass_redundant_relay" + std::to_string(i)] =
        redundant[static_cast<std::size_t>(i)];
    b.s.diagnostics["mass_fill_relay" + std::to_string(i)] =
        fill_sent[static_cast<std::size_t>(i)];
    b.s.diagnostics["mass_t3_relay" + std::to_string(i)] =
        t3_mass[static_cast<std::size_t>(i)];
  }
  return finish(b);
}

Schedule build_schedule_hcc(char variant, const Placement& p, const Demand& d) {
  const NetworkConfig& cfg = p.cfg;
  check_demand(cfg, d);
  const bool bit = !p.fractional;
  const double n = cfg.n_files;

  if (variant == 'c') {
    const double estimate = estimate_two_layer_symbols(cfg);
    if (bit)
      guard_bit_size(estimate);
    else if (estimate > kAggregateThreshold)
      return build_hcc_aggregated('c', cfg, d);
  } else {
    const double estimate = estimate_relay_coded_symbols(cfg);
    if (bit)
      guard_bit_size(estimate);
    else if (estimate > kAggregateThreshold)
      return build_hcc_aggregated(variant, cfg, d);
  }

  Builder b(std::string("hcc-") + variant, cfg, d, !bit);
  const double fbits = bit ? static_cast<double>(cfg.file_bits) : 1.0;

  // Tycoon subphases: server rounds to the relays, full stop, relay rounds.
  auto tycoon = [&](const FracParams& fp, int region) {
    enumerate_relay_coded(cfg, d, region, [&](std::vector<XorTerm>& terms) {
      if (bit) {
        const std::uint64_t q = max_term_bits(p.partition, terms);
        if (q > 0) b.push(0, Phase::I, terms, q / fbits, q, 0, {}, false);
      } else {
        const double q = max_term_mass(fp, cfg, terms);
        if (q > kMassEps) b.push(0, Phase::I, terms, q, 0, 0, {}, false);
      }
    });
    const int server_last = b.last_on_link[0];
    for (int i = 1; i <= cfg.k1; ++i) {
      bool first = true;
      enumerate_group_coded(cfg, d, i, region, [&](std::vector<XorTerm>& terms) {
        double q = 0.0;
        std::uint64_t qb = 0;
        if (bit) {
          qb = max_term_bits(p.partition, terms);
          if (qb == 0) return;
          q = qb / fbits;
        } else {
          q = max_term_mass(fp, cfg, terms);
          if (q <= kMassEps) return;
        }
        std::vector<int> deps;
        if (first && server_last >= 0) deps.push_back(server_last);
        first = false;
        b.push(i, Phase::III, terms, q, qb, 0, std::move(deps), false);
      });
    }
  };

  // Forwarding subphases: server rounds over all users, relays forward their
  // useful symbols verbatim once the server finishes.
  auto forwarded = [&](const FracParams& fp, int region,
                       std::vector<int> lead_deps) {
    struct Useful {
      int server_id;
      std::vector<XorTerm> terms;
      double length;
      std::uint64_t bits;
    };
    std::vector<std::vector<Useful>> useful(static_cast<std::size_t>(cfg.k1) +
                                            1);
    bool first = true;
    enumerate_user_coded(
        cfg, d, region, false, [&](Mask set, std::vector<XorTerm>& terms) {
          double q = 0.0;
          std::uint64_t qb = 0;
          if (bit) {
            qb = max_term_bits(p.partition, terms);
            if (qb == 0) return;
            q = qb / fbits;
          } else {
            q = max_term_mass(fp, cfg, terms);
            if (q <= kMassEps) return;
          }
          std::vector<int> deps;
          if (first) deps = std::move(lead_deps);
          first = false;
          const int sid =
              b.push(0, Phase::II, terms, q, qb, 0, std::move(deps), false);
          for (int i = 1; i <= cfg.k1; ++i)
            if (set & group_mask(cfg, i))
              useful[static_cast<std::size_t>(i)].push_back(
                  Useful{sid, terms, q, qb});
        });
    const int server_last = b.last_on_link[0];
    for (int i = 1; i <= cfg.k1; ++i) {
      bool lead = true;
      for (auto& u : useful[static_cast<std::size_t>(i)]) {
        std::vector<int> deps{lead && server_last >= 0 ? server_last
                                                       : u.server_id};
        lead = false;
        b.push(i, Phase::IIForward, u.terms, u.length, u.bits, 0,
               std::move(deps), false);
      }
    }
  };

  switch (variant) {
    case 'a': {
      FracParams fp;
      fp.w1 = 1.0;
      fp.a1 = clamp01(cfg.m1 / n);
      fp.b1 = clamp01(cfg.m2 / n);
      tycoon(fp, 0);
      break;
    }
    case 'b': {
      FracParams fp;
      fp.w1 = 1.0;
      fp.b1 = clamp01(cfg.m2 / n);
      forwarded(fp, 0, {});
      break;
    }
    case 'c': {
      const int region1 = cfg.alpha == 1.0 ? 0 : 1;
      const int region2 = cfg.alpha == 0.0 ? 0 : 2;
      if (cfg.alpha > 0.0 || bit) {
        FracParams fp;
        fp.w1 = cfg.alpha;
        if (cfg.alpha > 0.0) {
          fp.a1 = clamp01(cfg.m1 / (cfg.alpha * n));
          fp.b1 = clamp01(cfg.beta * cfg.m2 / (cfg.alpha * n));
        }
        tycoon(fp, region1);
      }
      if (cfg.alpha < 1.0 || (bit && cfg.file_bits > p.partition.region1_bits)) {
        FracParams fp;
        fp.w2 = 1.0 - cfg.alpha;
        if (cfg.alpha < 1.0)
          fp.c2 = clamp01((1.0 - cfg.beta) * cfg.m2 / ((1.0 - cfg.alpha) * n));
        forwarded(fp, region2, b.barrier_deps());
      }
      break;
    }
    default:
      throw DomainError("unknown scheme variant");
  }
  return finish(b);
}

Schedule build_schedule_pipeline(const Placement& p, const Demand& d) {
  const NetworkConfig& cfg = p.cfg;
  check_demand(cfg, d);
  const bool bit = !p.fractional;
  const double estimate = estimate_relay_coded_symbols(cfg);
  if (bit)
    guard_bit_size(estimate);
  else if (estimate > kAggregateThreshold)
    return build_pipeline_aggregated(cfg, d);

  Builder b("pipeline", cfg, d, !bit);
  const double fbits = bit ? static_cast<double>(cfg.file_bits) : 1.0;
  FracParams fp;
  fp.w1 = 1.0;
  fp.b1 = clamp01(cfg.m2 / cfg.n_files);

  struct Useful {
    int server_id;
    std::vector<XorTerm> terms;
    double length;
    std::uint64_t bits;
  };
  std::vector<std::vector<Useful>> useful(static_cast<std::size_t>(cfg.k1) + 1);
  enumerate_user_coded(cfg, d, 0, false,
                       [&](Mask set, std::vector<XorTerm>& terms) {
                         double q = 0.0;
                         std::uint64_t qb = 0;
                         if (bit) {
                           qb = max_term_bits(p.partition, terms);
                           if (qb == 0) return;
                           q = qb / fbits;
                         } else {
                           q = max_term_mass(fp, cfg, terms);
                           if (q <= kMassEps) return;
                         }
                         const int sid =
                             b.push(0, Phase::II, terms, q, qb, 0, {}, false);
                         for (int i = 1; i <= cfg.k1; ++i)
                           if (set & group_mask(cfg, i))
                             useful[static_cast<std::size_t>(i)].push_back(
                                 Useful{sid, terms, q, qb});
                       });
  for (int i = 1; i <= cfg.k1; ++i)
    for (auto& u : useful[static_cast<std::size_t>(i)])
      b.push(i, Phase::IIForward, u.terms, u.length, u.bits, 0, {u.server_id},
             true);
  return finish(b);
}

std::string schedule_to_csv(const Schedule& s, const Timeline& t) {
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out =
      "symbol_id,link,phase,start,length_bits,xor_terms,depends_on\n";
  for (const auto& sym : s.symbols) {
    out += std::to_string(sym.id);
    out += ',';
    out += std::to_string(sym.link);
    out += ',';
    out += phase_name(sym.phase);
    out += ',';
    out += fmt(t.start[static_cast<std::size_t>(sym.id)]);
    out += ',';
    out += s.fractional ? fmt(sym.length) : std::to_string(sym.bits);
    out += ',';
    if (sym.terms.empty()) {
      out += sym.family;
    } else {
      for (std::size_t i = 0; i < sym.terms.size(); ++i) {
        if (i > 0) out += ';';
        out += format_xor_term(sym.terms[i], s.cfg.k1, s.cfg.users());
      }
    }
    out += ',';
    for (std::size_t i = 0; i < sym.deps.size(); ++i) {
      if (i > 0) out += ';';
      out += std::to_string(sym.deps[i]);
    }
    out += '\n';
  }
  return out;
}

Schedule build_schedule_by_name(const std::string& scheme, const Placement& p,
                                const Demand& d) {
  if (scheme == "proposed") return build_schedule_proposed(p, d);
  if (scheme == "hcc-a") return build_schedule_hcc('a', p, d);
  if (scheme == "hcc-b") return build_schedule_hcc('b', p, d);
  if (scheme == "hcc-c") return build_schedule_hcc('c', p, d);
  if (scheme == "pipeline") return build_schedule_pipeline(p, d);
  throw DomainError("unknown scheme: " + scheme);
}

}  // namespace hiercache
