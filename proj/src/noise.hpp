#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rng.hpp"
#include "tailspec.hpp"

namespace ldplab {

// Scalar noise law shared by the model zoo.  Every law samples with a fixed
// number of uniforms per draw so a recorded stream determines the path.
struct NoiseLaw {
  enum class Kind { Pareto, Gaussian, StudentT, LogNormal, Discrete3 };

  Kind kind = Kind::Pareto;
  rv::TailSpec pareto;           // Kind::Pareto
  double sd = 1.0;               // Kind::Gaussian (mean 0)
  double nu = 3.0;               // Kind::StudentT degrees of freedom
  double t_scale = 1.0;          // Kind::StudentT scale (set via unit_variance_t)
  double ln_mu = 0.0;            // Kind::LogNormal: exp(ln_mu + ln_sigma * N)
  double ln_sigma = 1.0;
  std::vector<double> values;    // Kind::Discrete3
  std::vector<double> probs;

  static NoiseLaw make_pareto(const rv::TailSpec& spec);
  static NoiseLaw make_gaussian(double sd);
  static NoiseLaw make_student_t(double nu, double scale = 1.0);
  // Student-t scaled to unit variance (requires nu > 2).
  static NoiseLaw unit_variance_t(double nu);
  static NoiseLaw make_lognormal(double mu, double sigma);
  static NoiseLaw make_discrete3(std::vector<double> values, std::vector<double> probs);

  void validate() const;

  double sample(RngStream& rng) const;
  // Lebesgue density (Discrete3 unsupported).
  double density(double y) const;
  bool has_density() const { return kind != Kind::Discrete3; }
  // P(|Z| > x).
  double abs_tail(double x) const;
  // Quantile of Z at level u in (0,1) (used for minorization grids).
  double quantile(double u) const;
  double mean() const;
  // E|Z|^r by closed form where available, else adaptive quadrature.
  double abs_moment(double r) const;

  // Regular-variation data when the law is heavy tailed: (alpha, p, q).
  struct RvInfo { double alpha, p, q; };
  std::optional<RvInfo> rv_info() const;

  std::string describe() const;
};

}  // namespace ldplab
