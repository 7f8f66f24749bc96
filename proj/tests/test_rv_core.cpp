#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <vector>

#include "rng.hpp"
#include "tailspec.hpp"

using namespace ldplab;
using rv::TailSpec;

namespace {

TailSpec spec(double alpha, double p, double xm = 1.0) {
  TailSpec s;
  s.alpha = alpha;
  s.p = p;
  s.q = 1.0 - p;
  s.x_m = xm;
  s.validate();
  return s;
}

// Quadrature oracle for E[|X|^r 1{|X| <= x}]: integrate the Pareto magnitude
// density alpha xm^alpha y^{-alpha-1} against y^r over [xm, x].
struct MomParams {
  double alpha, xm, r;
};
double mom_integrand(double y, void* p) {
  auto* q = static_cast<MomParams*>(p);
  return std::pow(y, q->r) * q->alpha * std::pow(q->xm, q->alpha) *
         std::pow(y, -q->alpha - 1.0);
}
double mom_oracle(const TailSpec& s, double r, double x) {
  MomParams mp{s.alpha, s.x_m, r};
  gsl_function f{&mom_integrand, &mp};
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
  double res = 0.0, err = 0.0;
  gsl_integration_qags(&f, s.x_m, x, 0.0, 1e-12, 4096, ws, &res, &err);
  gsl_integration_workspace_free(ws);
  return res;
}

}  // namespace

TEST_CASE("tail_prob closed forms") {
  CHECK(rv::tail_prob(spec(1.0, 0.5), 1.0) == 1.0);
  CHECK(rv::tail_prob(spec(2.0, 0.5), 10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(rv::tail_prob(spec(1.5, 0.5), 100.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(rv::tail_prob(spec(1.5, 0.5), 0.5) == 1.0);  // below x_m
  CHECK(rv::tail_prob(spec(1.5, 0.5, 2.0), 20.0) ==
        doctest::Approx(std::pow(10.0, -1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(rv::tail_prob(spec(1.5, 0.5),
                                std::numeric_limits<double>::infinity()),
                  rv::InputError);
}

TEST_CASE("TailSpec validation") {
  TailSpec bad = spec(1.5, 0.5);
  bad.q = 0.6;  // p + q != 1
  CHECK_THROWS_AS(bad.validate(), rv::InputError);
  bad = spec(1.5, 0.5);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), rv::InputError);
  bad = spec(1.5, 0.5);
  bad.x_m = -1.0;
  CHECK_THROWS_AS(bad.validate(), rv::InputError);
}

TEST_CASE("sampler matches the law (sign balance and tail frequency)") {
  auto s = spec(2.0, 0.7);
  const std::size_t n = 1'000'000;
  RngStream rng(42, 0);
  std::size_t pos = 0, exceed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = rv::sample(s, rng);
    CHECK(std::abs(v) >= s.x_m);
    if (v > 0) ++pos;
    if (std::abs(v) > 10.0) ++exceed;
  }
  double sd_p = std::sqrt(0.7 * 0.3 / n);
  CHECK(std::abs(static_cast<double>(pos) / n - 0.7) < 4.0 * sd_p);
  double pt = 0.01;  // P(|X| > 10) at alpha = 2
  double sd_t = std::sqrt(pt * (1.0 - pt) / n);
  CHECK(std::abs(static_cast<double>(exceed) / n - pt) < 4.0 * sd_t);
}

TEST_CASE("swapping p and q negates draws pathwise on the same stream") {
  auto s = spec(1.5, 0.7);
  auto f = spec(1.5, 0.3);
  RngStream r1(9, 3), r2(9, 3);
  for (int i = 0; i < 10000; ++i)
    CHECK(rv::sample(s, r1) == -rv::sample(f, r2));
}

TEST_CASE("truncated_abs_moment against quadrature oracle") {
  auto s = spec(1.5, 1.0);
  RngStream rng(7, 0);
  for (int i = 0; i < 20; ++i) {
    double r = 3.0 * rng.u01();
    double x = 1.0 + 99.0 * rng.u01();
    double got = rv::truncated_abs_moment(s, {r, x});
    double want = mom_oracle(s, r, x);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
  // r = alpha needs the logarithmic branch.
  CHECK(rv::truncated_abs_moment(s, {1.5, 50.0}) ==
        doctest::Approx(mom_oracle(s, 1.5, 50.0)).epsilon(1e-9));
  // Nonunit x_m.
  auto s2 = spec(2.5, 1.0, 3.0);
  CHECK(rv::truncated_abs_moment(s2, {1.2, 80.0}) ==
        doctest::Approx(mom_oracle(s2, 1.2, 80.0)).epsilon(1e-9));
}

TEST_CASE("truncated_abs_moment edge behavior") {
  auto s = spec(1.5, 0.5);
  // r = 0 recovers P(|X| <= x).
  CHECK(rv::truncated_abs_moment(s, {0.0, 4.0}) ==
        doctest::Approx(1.0 - rv::tail_prob(s, 4.0)).epsilon(1e-12));
  // Karamata: E[|X|^r 1{|X|<=x}] / (x^r P(|X|>x)) -> alpha/(r - alpha).
  double r = 2.0, x = 1e12;  // correction decays like x^{alpha - r}
  double ratio = rv::truncated_abs_moment(s, {r, x}) /
                 (std::pow(x, r) * rv::tail_prob(s, x));
  CHECK(ratio == doctest::Approx(s.alpha / (r - s.alpha)).epsilon(1e-5));
  CHECK_THROWS_AS(rv::truncated_abs_moment(s, {1.0, 0.5}), rv::InputError);
}

TEST_CASE("pareto mean") {
  auto s = spec(1.5, 1.0);
  CHECK(rv::mean(s) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(rv::mean(spec(0.9, 1.0)), rv::InputError);
}

TEST_CASE("hill estimator recovers alpha and is scale invariant") {
  auto s = spec(1.5, 0.6);
  const std::size_t n = 100'000;
  RngStream rng(11, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = rv::sample(s, rng);
  double a_hat = rv::hill_estimate(v, 1000);
  CHECK(a_hat / 1.5 > 0.9);
  CHECK(a_hat / 1.5 < 1.1);

  std::vector<double> scaled(v);
  for (auto& x : scaled) x *= 7.0;
  double a_scaled = rv::hill_estimate(scaled, 1000);
  CHECK(a_scaled == doctest::Approx(a_hat).epsilon(1e-12));
}

TEST_CASE("hill estimator degenerate input") {
  std::vector<double> flat(5000, 3.0);
  CHECK_THROWS_AS(rv::hill_estimate(flat, 100), rv::DegenerateSampleError);
  std::vector<double> tiny(10, 1.0);
  CHECK_THROWS_AS(rv::hill_estimate(tiny, 50), rv::InputError);
}
