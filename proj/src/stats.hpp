#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ldplab::stats {

// Pairwise summation: order-independent to ~1e-12 relative and deterministic
// for a fixed input order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty span");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

struct Estimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;  // ~95% half width
};

// Batch-means CI over a per-replication vector; robust when the integrand
// is heavy tailed but integrable.
inline Estimate batch_means(std::span<const double> v, std::size_t batches = 32) {
  if (v.size() < batches * 2) batches = std::max<std::size_t>(2, v.size() / 2);
  const std::size_t m = v.size() / batches;
  std::vector<double> bm(batches);
  for (std::size_t b = 0; b < batches; ++b)
    bm[b] = mean(v.subspan(b * m, m));
  double g = mean(bm);
  double ss = 0.0;
  for (double x : bm) ss += (x - g) * (x - g);
  double se = std::sqrt(ss / (batches * (batches - 1.0)));
  return {g, 1.96 * se};
}

// Wilson score interval for a binomial proportion (95%).
struct Interval {
  double lo = 0.0, hi = 0.0, center = 0.0;
};
inline Interval wilson(std::size_t hits, std::size_t n) {
  if (n == 0) throw std::invalid_argument("wilson: n = 0");
  const double z = 1.959963984540054;
  const double ph = static_cast<double>(hits) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double center = (ph + z2n / 2.0) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2n / (4.0 * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half), center};
}

// Ordinary least squares y = a + b x with standard errors.
struct LinFit {
  double intercept = 0.0, slope = 0.0;
  double se_intercept = 0.0, se_slope = 0.0;
};
inline LinFit linfit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw std::invalid_argument("linfit: need n >= 3 matched points");
  double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linfit: degenerate x");
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  double s2 = sse / (n - 2.0);
  f.se_slope = std::sqrt(s2 / sxx);
  f.se_intercept = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  return f;
}

// Weighted least squares slope with standard error (weights ~ 1/var).
inline LinFit wlinfit(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w) {
  const std::size_t n = x.size();
  if (n != y.size() || n != w.size() || n < 3)
    throw std::invalid_argument("wlinfit: need n >= 3 matched points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  double mx = swx / sw, my = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("wlinfit: degenerate x");
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // With w = 1/var, se of slope is 1/sqrt(sxx).
  f.se_slope = 1.0 / std::sqrt(sxx);
  f.se_intercept = std::sqrt(1.0 / sw + mx * mx / sxx);
  return f;
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) throw std::invalid_argument("ks: empty sample");
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  double ne = static_cast<double>(n) * m / (n + m);
  double t = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Kolmogorov distribution tail.
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  return std::clamp(p, 0.0, 1.0);
}

// Ljung-Box statistic p-value is left to the caller; this returns the
// Q statistic for the first `lags` autocorrelations.
inline double ljung_box_q(std::span<const double> v, int lags) {
  const std::size_t n = v.size();
  double m = mean(v);
  double denom = 0.0;
  for (double x : v) denom += (x - m) * (x - m);
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
      num += (v[t] - m) * (v[t - k] - m);
    double rho = num / denom;
    q += rho * rho / (n - k);
  }
  return q * n * (n + 2.0);
}

}  // namespace ldplab::stats
