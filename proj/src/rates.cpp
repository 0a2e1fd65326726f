#include "hiercache/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hiercache/errors.hpp"

namespace hiercache {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

double rate_r(double m, int k) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("rate_r: fraction outside [0,1]");
  if (k < 0) throw DomainError("rate_r: negative group size");
  if (k == 0) return 0.0;
  if (m == 0.0) return static_cast<double>(k);
  if (m == 1.0) return 0.0;
  return (1.0 - m) / m * (1.0 - ipow(1.0 - m, k));
}

RatePair hcc_a_rates(const NetworkConfig& cfg) {
  double n = cfg.n_files;
  return RatePair{cfg.k2 * rate_r(clamp01(cfg.m1 / n), cfg.k1),
                  rate_r(clamp01(cfg.m2 / n), cfg.k2)};
}

RatePair hcc_b_rates(const NetworkConfig& cfg) {
  double m2 = clamp01(cfg.m2 / cfg.n_files);
  return RatePair{rate_r(m2, cfg.users()), rate_r(m2, cfg.k2)};
}

RatePair hcc_c_rates(const NetworkConfig& cfg, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("hcc_c_rates: alpha outside [0,1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("hcc_c_rates: beta outside [0,1]");
  double n = cfg.n_files;
  RatePair r;
  if (alpha > 0.0) {
    double a1 = clamp01(cfg.m1 / (alpha * n));
    double b1 = clamp01(beta * cfg.m2 / (alpha * n));
    r.r1 += alpha * cfg.k2 * rate_r(a1, cfg.k1);
    r.r2 += alpha * rate_r(b1, cfg.k2);
  }
  if (alpha < 1.0) {
    double c2 = clamp01((1.0 - beta) * cfg.m2 / ((1.0 - alpha) * n));
    r.r1 += (1.0 - alpha) * rate_r(c2, cfg.users());
    r.r2 += (1.0 - alpha) * rate_r(c2, cfg.k2);
  }
  return r;
}

void hcc_c_alpha_beta(const NetworkConfig& cfg, double& alpha, double& beta) {
  double n = cfg.n_files;
  double reach = cfg.m1 + cfg.m2 * cfg.k2;
  if (reach < n) {
    alpha = reach > 0.0 ? cfg.m1 / reach : 0.0;
    beta = 0.0;
  } else if (cfg.m1 <= n / 4.0) {
    alpha = cfg.m1 / n;
    beta = cfg.m1 / n;
  } else {
    alpha = cfg.m1 / n;
    beta = 0.25;
  }
}

double hcc_c_delay(const NetworkConfig& cfg) {
  double a, b;
  hcc_c_alpha_beta(cfg, a, b);
  return hcc_c_rates(cfg, a, b).total();
}

ProposeComponents propose_components(const NetworkConfig& cfg, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("propose_components: alpha outside [0,1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("propose_components: beta outside [0,1]");
  double n = cfg.n_files;
  int k1 = cfg.k1, k2 = cfg.k2, ku = cfg.users();
  ProposeComponents c;
  if (alpha > 0.0) {
    double m1 = clamp01(cfg.m1 / (alpha * n));
    double m2 = clamp01(beta * cfg.m2 / (alpha * n));
    double miss1 = ipow(1.0 - m1, k1);  // fraction no relay holds
    c.rs1 = alpha * (rate_r(m1, k1) - k1 * miss1) * rate_r(m2, k2);
    c.rs2 = alpha * miss1 * rate_r(m2, ku);
    c.rs3 = alpha * m1 * rate_r(m2, k2);
    c.re = alpha * miss1 * ipow(1.0 - m2, k2) * rate_r(m2, (k1 - 1) * k2);
    c.rs2_alt = alpha * ipow(1.0 - clamp01(cfg.m1 / n), k1) * rate_r(m2, ku);
    c.r_prime = c.rs1 + c.rs2 + std::max(c.rs3 - c.re, 0.0);
  }
  if (alpha < 1.0) {
    double c2 = clamp01((1.0 - beta) * cfg.m2 / ((1.0 - alpha) * n));
    c.r_double_prime = (1.0 - alpha) * rate_r(c2, ku);
  }
  return c;
}

double propose_delay(const NetworkConfig& cfg, double alpha, double beta) {
  return propose_components(cfg, alpha, beta).total();
}

OptimizeResult optimize_propose(const NetworkConfig& cfg, int grid_steps) {
  if (grid_steps < 2) throw DomainError("optimize_propose: need at least 2 grid steps");
  OptimizeResult best;
  best.delay = std::numeric_limits<double>::infinity();
  auto consider = [&](double a, double b) {
    a = clamp01(a);
    b = clamp01(b);
    double d = propose_delay(cfg, a, b);
    if (d < best.delay - 1e-15) {
      best = OptimizeResult{a, b, d};
    }
  };
  double h = 1.0 / (grid_steps - 1);
  for (int i = 0; i < grid_steps; ++i)
    for (int j = 0; j < grid_steps; ++j) consider(i * h, j * h);
  // One local refinement pass at 10x resolution around the coarse winner.
  double a0 = best.alpha, b0 = best.beta, fine = h / 10.0;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) consider(a0 + i * fine, b0 + j * fine);
  return best;
}

double two_relay_delay(const NetworkConfig& cfg) {
  if (cfg.k1 != 2) throw NotTwoRelayError("two_relay_delay: defined for k1 = 2 only");
  double n = cfg.n_files;
  double m1 = clamp01(cfg.m1 / n), m2 = clamp01(cfg.m2 / n);
  double miss = (1.0 - m1) * (1.0 - m1) * (1.0 - m2) * (1.0 - m2);
  if (m1 >= miss) return rate_r(m2, cfg.k2);
  return m1 * (1.0 - m1) * rate_r(m2, cfg.k2) +
         (1.0 - m1) * (1.0 - m1) * rate_r(m2, 2 * cfg.k2);
}

double m1_threshold(double m2, int k1) {
  if (k1 != 2) throw NotTwoRelayError("m1_threshold: defined for k1 = 2 only");
  if (!(m2 >= 0.0 && m2 <= 1.0)) throw DomainError("m1_threshold: fraction outside [0,1]");
  double c = (1.0 - m2) * (1.0 - m2);
  if (c == 0.0) return 0.0;
  // Smaller root of c x^2 - (2c+1) x + c = 0.
  double p = 2.0 * c + 1.0;
  double x = (p - std::sqrt(p * p - 4.0 * c * c)) / (2.0 * c);
  // Cross-check with bisection on f(x) = x - c (1-x)^2, increasing on [0,1].
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid - c * (1.0 - mid) * (1.0 - mid) < 0.0) lo = mid;
    else hi = mid;
  }
  if (std::fabs(x - 0.5 * (lo + hi)) > 1e-12)
    throw DomainError("m1_threshold: closed form and bisection disagree");
  return x;
}

double lower_bound_delay(const NetworkConfig& cfg) {
  double n = cfg.n_files;
  double best = 0.0;
  for (int s1 = 1; s1 <= cfg.k1; ++s1) {
    for (int s2 = 1; s2 <= cfg.k2; ++s2) {
      long denom = static_cast<long>(n) / (static_cast<long>(s1) * s2);
      if (denom <= 0) continue;
      double v = s1 * s2 - (s1 * cfg.m1 + s1 + s2 * cfg.m2) / static_cast<double>(denom);
      best = std::max(best, v);
    }
  }
  for (int s = 1; s <= cfg.k2; ++s) {
    long denom = static_cast<long>(n) / s;
    if (denom <= 0) continue;
    double v = s - s * cfg.m2 / static_cast<double>(denom);
    best = std::max(best, v);
  }
  return std::max(best, 0.0);
}

GapReport gap_report(const NetworkConfig& cfg) {
  double n = cfg.n_files;
  double reach = cfg.m1 + cfg.m2 * cfg.k2;
  GapReport g;
  hcc_c_alpha_beta(cfg, g.alpha, g.beta);
  if (reach < n) {
    g.regime = 2;
    g.guaranteed_gap =
        reach > 0.0
            ? (cfg.m2 * cfg.k2 / reach) * rate_r(clamp01(reach / (n * cfg.k2)), cfg.k2)
            : 0.0;
  } else if (cfg.m1 <= n / 4.0) {
    g.regime = 1;
    g.guaranteed_gap = (1.0 - cfg.m1 / n) * rate_r(clamp01(cfg.m2 / n), cfg.k2);
  } else {
    g.regime = 3;
    double rest = n - cfg.m1;
    g.guaranteed_gap =
        rest > 0.0
            ? (1.0 - cfg.m1 / n) * rate_r(clamp01(3.0 * cfg.m2 / (4.0 * rest)), cfg.k2)
            : 0.0;
  }
  g.hcc_delay = hcc_c_rates(cfg, g.alpha, g.beta).total();
  g.propose_delay = propose_delay(cfg, g.alpha, g.beta);
  return g;
}

RatePair pipeline_rates(const NetworkConfig& cfg) {
  double m2 = clamp01(cfg.m2 / cfg.n_files);
  return RatePair{rate_r(m2, cfg.users()), rate_r(m2, cfg.k2)};
}

double pipeline_delay(const NetworkConfig& cfg) { return pipeline_rates(cfg).r1; }

}  // namespace hiercache
