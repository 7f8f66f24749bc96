#include "tailspec.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ldplab::rv {

void TailSpec::validate() const {
  if (!(alpha > 0.0)) throw InputError("TailSpec: alpha must be positive");
  if (!(x_m > 0.0)) throw InputError("TailSpec: x_m must be positive");
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    throw InputError("TailSpec: p, q must lie in [0,1]");
  if (std::abs(p + q - 1.0) > 1e-12)
    throw InputError("TailSpec: p + q must equal 1");
}

double tail_prob(const TailSpec& spec, double x) {
  if (!std::isfinite(x)) throw InputError("tail_prob: x must be finite");
  if (x < spec.x_m) return 1.0;
  return std::pow(x / spec.x_m, -spec.alpha);
}

double sample(const TailSpec& spec, RngStream& rng) {
  double u = rng.u01();
  double mag = spec.x_m * std::pow(u, -1.0 / spec.alpha);
  // Sign convention chosen so swapping p and q negates the draw pathwise on
  // the same stream (the events {u <= p} and {u > q} coincide for p >= 1/2).
  double us = rng.u01();
  bool pos = (spec.p >= 0.5) ? (us > spec.q) : (us <= spec.p);
  return pos ? mag : -mag;
}

double truncated_abs_moment(const TailSpec& spec, const TruncatedMomentQuery& query) {
  if (query.x < spec.x_m)
    throw InputError("truncated_abs_moment: truncation level below x_m");
  const double a = spec.alpha, xm = spec.x_m, r = query.r, x = query.x;
  if (std::abs(r - a) < 1e-14)
    return a * std::pow(xm, a) * std::pow(xm, r - a) * std::log(x / xm);
  return a * std::pow(xm, a) * (std::pow(x, r - a) - std::pow(xm, r - a)) / (r - a);
}

double mean(const TailSpec& spec) {
  if (spec.alpha <= 1.0)
    throw InputError("mean: undefined for alpha <= 1");
  return (spec.p - spec.q) * spec.alpha / (spec.alpha - 1.0) * spec.x_m;
}

double hill_estimate(std::span<const double> sample, std::size_t k) {
  if (k + 1 > sample.size())
    throw InputError("hill_estimate: k must be smaller than the sample size");
  std::vector<double> mags;
  mags.reserve(sample.size());
  for (double v : sample)
    if (v != 0.0) mags.push_back(std::abs(v));
  if (mags.size() < k + 1)
    throw DegenerateSampleError("hill_estimate: fewer than k+1 nonzero magnitudes");
  std::nth_element(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
  const double pivot = mags[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(mags[i] / pivot);
  if (sum <= 0.0)
    throw DegenerateSampleError("hill_estimate: top order statistics are tied");
  return static_cast<double>(k) / sum;
}

}  // namespace ldplab::rv
