#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "models.hpp"
#include "stats.hpp"

namespace ldplab::theory {

struct NonRegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validity region (b_n, c_n) for the ratio convergence, tagged by the rule
// that generated it.
struct Region {
  std::size_t n = 0;
  double b_n = 0.0;
  double c_n = std::numeric_limits<double>::infinity();
  std::string rule;
};

struct RegionParams {
  double delta = 0.1;   // exponent slack for alpha <= 2
  double a = 0.0;       // Nagaev constant for alpha > 2; 0 means alpha - 1
  double gamma = 0.02;  // c_n = exp(gamma n) for the Kesten rule, alpha > 1
  // Regeneration-time tail P(tau_A > n), needed by the markov_atom rule to
  // invert P(tau_A > n) = o(n P(|X| > c_n)).
  std::function<double(std::size_t)> tau_tail;
  double alpha_for_cn = 0.0;  // tail index used in the markov_atom inversion
};

Region region(double alpha, std::size_t n, const std::string& rule,
              const RegionParams& params = {});

struct ConstantEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;
  enum class Method { closed_form, mc_expectation, tail_ratio_diff } method =
      Method::closed_form;
  std::string inputs_hash;
};

std::string method_name(ConstantEstimate::Method m);

// Tail-ratio estimate of b_plus(k) = lim P(S_k > x)/P(|X| > x) with plateau
// detection over a log-spaced x grid (auto-built when empty).
ConstantEstimate b_plus_k(const models::ModelSpec& model, int k,
                          std::vector<double> x_grid, std::size_t reps,
                          int workers = 8);

// The limit constant b_plus: closed form where available, defining MC
// expectation for the Kesten family, differencing fallback otherwise.
ConstantEstimate b_plus_limit(const models::ModelSpec& model,
                              std::size_t reps = 400'000, int workers = 8);

// MC of E[(1 + sum Pi_i)^alpha - (sum Pi_i)^alpha] for the affine recursion.
ConstantEstimate sre_b_plus(const models::ModelSpec& model, int series_cap,
                            double tol, std::size_t reps, int workers = 8);

// MC of E[|Z_0 + sqrt(A_1) T|^alpha - |sqrt(A_1) T|^alpha] / (2 E|Z|^alpha).
ConstantEstimate garch_b_plus(const models::ModelSpec& model, int series_cap,
                              double tol, std::size_t reps, int workers = 8);

// Goldie constant c_inf+ (or c_inf- with positive_tail = false).
ConstantEstimate goldie_c_plus(const models::ModelSpec& model, std::size_t reps,
                               bool positive_tail = true);

// Exact window-sum value of b_plus(k) for finite-order moving averages.
double ma_b_plus_k_closed(const models::ModelSpec& model, int k);

// Default 8-point log-spaced x grid inside the asymptotic regime.
std::vector<double> default_x_grid(const models::ModelSpec& model,
                                   std::size_t points = 8);

}  // namespace ldplab::theory
