#pragma once

#include <string>
#include <vector>

#include "models.hpp"
#include "theory.hpp"

namespace ldplab::ldp {

struct PowerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LdpRow {
  std::size_t n = 0;
  double x = 0.0;
  bool in_region = true;
  std::size_t hits = 0;
  std::size_t reps = 0;
  double ratio_hat = 0.0;
  double ci_halfwidth = 0.0;
  double b_plus_ref = 0.0;
  double b_plus_ref_ci = 0.0;
};

struct LdpTable {
  std::vector<LdpRow> rows;       // right tail vs b_plus
  std::vector<LdpRow> left_rows;  // left tail (X -> -X) vs b_minus
  std::string region_rule;
  std::vector<std::string> notes;
};

struct RatioOptions {
  std::string rule;               // empty: default per model kind
  theory::RegionParams region;
  std::vector<double> x_factors;  // explicit x = factor * b_n grid; empty: auto
  int workers = 8;
  double min_expected_hits = 50.0;
};

// Default region rule tag for a model kind.
std::string default_rule(const models::ModelSpec& model);

// The core ratio table: P(S_n > x) / (n P(|X| > x)) over (n, x) grids with
// common random numbers across each n's x grid.
LdpTable estimate_ratio(const models::ModelSpec& model,
                        const std::vector<std::size_t>& n_grid, int x_per_n,
                        std::size_t reps, std::uint64_t seed,
                        const RatioOptions& opts = {});

struct ConditionEntry {
  int k = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double param = 0.0;  // drift: the moment order p
  double se = 0.0;     // drift: standard error of the fitted beta
};

struct ConditionReport {
  std::string condition;  // AC_alpha | trunc_sum | drift
  std::vector<ConditionEntry> entries;
  bool pass = false;      // joint verdict over the k grid
  std::vector<std::string> trace;
};

// Anti-clustering statistic per k: sup over the x grid of
// delta_k^{-alpha} * sum_{j=k}^{n} P(|X_j| > x delta_k | |X_0| > x delta_k),
// with conditioning by an exceedance-seeded resampler.
ConditionReport check_anticlustering(const models::ModelSpec& model,
                                     const std::vector<int>& k_grid,
                                     const std::vector<double>& delta_schedule,
                                     std::size_t n,
                                     const std::vector<double>& x_grid,
                                     std::size_t reps, int workers = 8);

// Truncated-sum statistic per k: sup over the x grid of
// P(sum_i X_i 1{|X_i| <= delta_k x} > eps_k x) / (n P(|X| > x)).
ConditionReport check_truncated_sum(const models::ModelSpec& model,
                                    std::size_t n,
                                    const std::vector<double>& x_grid,
                                    const std::vector<int>& k_grid,
                                    std::size_t reps, int workers = 8);

// Default schedules delta_k = e^{-k}, eps_k = k^{-2}.
double default_delta(int k);
double default_eps(int k);

}  // namespace ldplab::ldp
