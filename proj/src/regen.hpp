#pragma once

#include <string>
#include <vector>

#include "ldp.hpp"
#include "models.hpp"

namespace ldplab::regen {

struct MinorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical Nummelin splitting data: P(x, .) >= epsilon * nu(.) for x in the
// small set C, with nu stored as a piecewise-constant density on a
// quantile-spaced grid.
struct Minorization {
  double c_lo = 0.0, c_hi = 0.0;  // small set C = [c_lo, c_hi]
  double epsilon = 0.0;
  std::vector<double> edges;      // cell edges, size cells + 1
  std::vector<double> dens;       // normalized density per cell
  std::vector<double> cdf;        // cumulative mass, size cells + 1

  bool in_c(double s) const { return s >= c_lo && s <= c_hi; }
  double sample(RngStream& rng) const;  // inverse CDF, linear within cells
  double density(double y) const;
};

// Builds the minorization for AR1, SRE_AFFINE, or the GARCH sigma^2 chain.
// c sets the small-set half-width ([-c, c]; GARCH uses [floor, c]).
Minorization build_minorization(const models::ModelSpec& model, double c,
                                int grid_points = 4096);

// One-step transition density of the driving scalar chain.
double transition_density(const models::ModelSpec& model, double s, double y);

// Split-chain output: the raw path, regeneration times, and the cycle
// decomposition of the centered sums.
struct CycleSet {
  std::vector<double> path;               // raw values X_t, t = 1..n
  double mu = 0.0;                        // centering applied to sums
  std::vector<std::size_t> regen_times;   // 1-based steps entered via nu
  std::size_t first_block_len = 0;
  double first_block_sum = 0.0;
  std::vector<std::size_t> cycle_len;
  std::vector<double> cycle_sum;
  std::size_t residual_len = 0;
  double residual_sum = 0.0;
  std::size_t n_covered = 0;
};

CycleSet simulate_split_chain(const models::ModelSpec& model,
                              const Minorization& minor, std::size_t n,
                              std::uint64_t seed, std::uint64_t stream_id = 0);

// Polynomial drift certificate: fits beta in
// E(V_p(state_1) | state_0 = y) <= beta V_p(y) + b 1{y in atom proxy},
// with V_p = |x|^p (or (sigma^2)^{p/2} for GARCH).
ldp::ConditionReport check_drift(const models::ModelSpec& model,
                                 const std::vector<double>& p_grid,
                                 std::size_t probe_reps, double atom_proxy);

// First-regeneration-time tail P(tau_A > n) from stationarity.
struct TauTail {
  double estimate = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  bool zero_hits = false;  // estimate is an upper confidence bound only
};
TauTail tau_A_tail(const models::ModelSpec& model, const Minorization& minor,
                   std::size_t n, std::size_t reps, std::uint64_t seed,
                   int workers = 8);

// The regeneration form of the ratio convergence: three mutually consistent
// tables plus the Kac identity data.
struct RegenTables {
  ldp::LdpTable cycle_tail;  // P_A(S_A > x)/P(|X|>x) vs E(tau_A) b_plus
  ldp::LdpTable int_ratio;   // P(S_n > x)/(n P_A(S_A > x)) vs 1/E(tau_A)
  ldp::LdpTable remainder;   // P(S_n > x, tau_A > n)/(n P(|X|>x)) and bound
  std::vector<double> remainder_bound;  // P(tau_A > n)/(n P(|X|>x)) per row
  double e_tau = 0.0, e_tau_ci = 0.0;
  double pi_a = 0.0;         // regenerations per step
  double kac_product = 0.0;  // e_tau * pi_a, should be ~1
  double kac_ci = 0.0;
  double tau_gt_n = 0.0;     // fraction of chains never regenerating by n
};

RegenTables verify_regeneration_ldp(const models::ModelSpec& model,
                                    const Minorization& minor,
                                    const std::vector<std::size_t>& n_grid,
                                    const std::vector<double>& x_grid,
                                    std::size_t reps, int workers = 8);

}  // namespace ldplab::regen
