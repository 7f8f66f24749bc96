#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace ldplab::rv {

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Marginal tail law with an exact Pareto magnitude: P(|X|>x) = (x/x_m)^{-alpha}
// for x >= x_m, sign +1 with probability p and -1 with probability q = 1-p.
struct TailSpec {
  double alpha = 1.5;
  double p = 0.5;
  double q = 0.5;
  double x_m = 1.0;

  void validate() const;
};

struct TruncatedMomentQuery {
  double r = 0.0;  // moment order, >= 0
  double x = 1.0;  // truncation level, must be >= x_m
};

// P(|X| > x); right tail = p * tail, left tail = q * tail for x >= x_m.
double tail_prob(const TailSpec& spec, double x);

// One signed draw; |X| by inverse CDF, sign by an independent uniform.
double sample(const TailSpec& spec, RngStream& rng);

// Exact E|X|^r 1{|X| <= x}.
double truncated_abs_moment(const TailSpec& spec, const TruncatedMomentQuery& query);

// E X (finite only for alpha > 1).
double mean(const TailSpec& spec);

// Hill estimator over the k largest magnitudes.
double hill_estimate(std::span<const double> sample, std::size_t k);

}  // namespace ldplab::rv
