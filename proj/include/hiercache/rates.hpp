#pragma once

#include <string>

#include "hiercache/config.hpp"

namespace hiercache {

// Per-delivery-scheme rates on the two link layers, in units of one file.
struct RatePair {
  double r1 = 0.0;  // server link
  double r2 = 0.0;  // worst relay link
  double total() const { return r1 + r2; }
};

// Breakdown of the concurrent scheme's delay. rs1..re are the first
// subsystem's phase rates; r_prime = rs1 + rs2 + max(rs3 - re, 0) is its
// delay and r_double_prime the second subsystem's.
struct ProposeComponents {
  double rs1 = 0.0;
  double rs2 = 0.0;
  double rs3 = 0.0;
  double re = 0.0;
  double r_prime = 0.0;
  double r_double_prime = 0.0;
  // rs2 evaluated with the plain library fraction m1/n instead of the
  // subsystem fraction m1/(alpha*n); kept for diagnostics.
  double rs2_alt = 0.0;
  double total() const { return r_prime + r_double_prime; }
};

struct GapReport {
  int regime = 0;  // 1, 2 or 3, matching the split-parameter cases
  double guaranteed_gap = 0.0;
  double hcc_delay = 0.0;
  double propose_delay = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

// Delivery rate of the single-shared-link scheme with k users each caching a
// fraction m of every file: ((1-m)/m) * (1 - (1-m)^k), extended by continuity
// to k at m = 0 and to 0 at m = 1 or k = 0. Throws DomainError outside
// m in [0,1] or k < 0.
double rate_r(double m, int k);

// Tycoon baseline: relays first fetch their users' full files, then serve them.
RatePair hcc_a_rates(const NetworkConfig& cfg);

// Relay-cache-ignoring baseline: one big shared-link delivery, relays forward
// whatever concerns their own users after the server finishes.
RatePair hcc_b_rates(const NetworkConfig& cfg);

// Mixture of the two baselines: fraction alpha of every file (and beta of each
// user budget) runs scheme A, the rest scheme B.
RatePair hcc_c_rates(const NetworkConfig& cfg, double alpha, double beta);
double hcc_c_delay(const NetworkConfig& cfg);  // at the split below

// Near-optimal (alpha, beta) split for the mixture scheme.
void hcc_c_alpha_beta(const NetworkConfig& cfg, double& alpha, double& beta);

// Concurrent scheme delay components and total.
ProposeComponents propose_components(const NetworkConfig& cfg, double alpha, double beta);
double propose_delay(const NetworkConfig& cfg, double alpha, double beta);

// Grid search over (alpha, beta) in [0,1]^2 with one 10x local refinement.
// Ties break toward smaller alpha, then smaller beta.
struct OptimizeResult {
  double alpha = 0.0;
  double beta = 0.0;
  double delay = 0.0;
};
OptimizeResult optimize_propose(const NetworkConfig& cfg, int grid_steps = 101);

// Two-relay closed form of the concurrent scheme at alpha = beta = 1.
double two_relay_delay(const NetworkConfig& cfg);

// Smallest relay fraction m1/n at which the two-relay delay flattens to
// rate_r(m2, k2): the root of x = (1-x)^2 (1-m2)^2 in [0,1].
double m1_threshold(double m2, int k1 = 2);

// Cut-set lower bound on the delay of any scheme.
double lower_bound_delay(const NetworkConfig& cfg);

// Guaranteed mixture-vs-concurrent gap at the matched split parameters.
GapReport gap_report(const NetworkConfig& cfg);

// Relays forward the shared-link delivery while it is still running.
double pipeline_delay(const NetworkConfig& cfg);
RatePair pipeline_rates(const NetworkConfig& cfg);

}  // namespace hiercache
