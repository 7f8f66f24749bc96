#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "models.hpp"
#include "stats.hpp"
#include "tailspec.hpp"

using namespace ldplab;
using models::Kind;
using models::ModelSpec;

namespace {

NoiseLaw pareto(double alpha, double p, double xm = 1.0) {
  rv::TailSpec ts;
  ts.alpha = alpha;
  ts.p = p;
  ts.q = 1.0 - p;
  ts.x_m = xm;
  return NoiseLaw::make_pareto(ts);
}

ModelSpec iid_model(double alpha = 1.5, double p = 0.7) {
  ModelSpec m;
  m.kind = Kind::IID;
  m.noise = pareto(alpha, p);
  m.validate();
  return m;
}

ModelSpec ar1_model(double phi = 0.5, double alpha = 1.5, double p = 0.7) {
  ModelSpec m;
  m.kind = Kind::AR1;
  m.phi = phi;
  m.noise = pareto(alpha, p);
  m.validate();
  return m;
}

// Lognormal A with Kesten root alpha = -2 mu / sigma^2 = 1.5.
NoiseLaw a_ln() { return NoiseLaw::make_lognormal(-0.3, std::sqrt(0.4)); }

ModelSpec sre_model() {
  ModelSpec m;
  m.kind = Kind::SRE_AFFINE;
  m.a_law = a_ln();
  m.noise = NoiseLaw::make_lognormal(0.0, 0.5);  // positive B, light tail
  m.validate();
  return m;
}

ModelSpec garch_model() {
  ModelSpec m;
  m.kind = Kind::GARCH11;
  m.garch_a0 = 0.05;
  m.garch_a1 = 0.3;
  m.garch_b1 = 0.65;
  m.noise = NoiseLaw::make_gaussian(1.0);
  m.validate();
  return m;
}

std::vector<ModelSpec> model_zoo() {
  std::vector<ModelSpec> zoo;
  zoo.push_back(iid_model());
  {
    ModelSpec m;
    m.kind = Kind::MA;
    m.theta = {0.5, -0.3};
    m.noise = pareto(1.5, 0.7);
    m.validate();
    zoo.push_back(m);
  }
  zoo.push_back(ar1_model());
  zoo.push_back(sre_model());
  {
    ModelSpec m;
    m.kind = Kind::SRE_MAX;
    m.a_law = a_ln();
    m.noise = NoiseLaw::make_lognormal(0.0, 0.5);
    m.validate();
    zoo.push_back(m);
  }
  {
    ModelSpec m;
    m.kind = Kind::LETAC;
    m.a_law = a_ln();
    m.c_law = NoiseLaw::make_gaussian(1.0);
    m.d_law = NoiseLaw::make_lognormal(0.0, 0.3);
    m.validate();
    zoo.push_back(m);
  }
  {
    ModelSpec m;
    m.kind = Kind::SV;
    m.sv_a = 0.5;
    m.sv_eta_sd = 0.7;
    m.noise = pareto(1.5, 0.7);
    m.validate();
    zoo.push_back(m);
  }
  zoo.push_back(garch_model());
  return zoo;
}

}  // namespace

TEST_CASE("simulate is deterministic in (seed, stream)") {
  for (const auto& m : model_zoo()) {
    auto p1 = models::simulate(m, 200, 123, 4);
    auto p2 = models::simulate(m, 200, 123, 4);
    auto p3 = models::simulate(m, 200, 123, 5);
    CHECK(p1.values == p2.values);
    CHECK(p1.values != p3.values);
  }
}

TEST_CASE("AR1 with phi = 0 is bit-identical to IID on the same stream") {
  auto iid = iid_model();
  auto ar = ar1_model(0.0);
  auto p1 = models::simulate(iid, 1000, 7, 0);
  auto p2 = models::simulate(ar, 1000, 7, 0);
  CHECK(p1.values == p2.values);
}

TEST_CASE("MA with zero thetas is bit-identical to IID on the same stream") {
  auto iid = iid_model();
  ModelSpec ma;
  ma.kind = Kind::MA;
  ma.theta = {0.0};
  ma.noise = pareto(1.5, 0.7);
  ma.validate();
  auto p1 = models::simulate(iid, 1000, 7, 0);
  auto p2 = models::simulate(ma, 1000, 7, 0);
  CHECK(p1.values == p2.values);
}

TEST_CASE("SRE with A = 0 a.s. reproduces IID draws of B") {
  ModelSpec m;
  m.kind = Kind::SRE_AFFINE;
  m.a_law = NoiseLaw::make_discrete3({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  m.noise = pareto(1.5, 0.7);
  m.validate();
  CHECK(m.tail_index() == doctest::Approx(1.5));
  const std::size_t n = 50'000;
  auto path = models::simulate(m, n, 3, 0);
  std::vector<double> ref(n);
  RngStream rng(99, 1);
  for (auto& v : ref) v = m.noise.sample(rng);
  CHECK(stats::ks_two_sample_pvalue(path.values, ref) > 1e-3);
}

TEST_CASE("GARCH with a1 = b1 = 0 has constant volatility") {
  ModelSpec m;
  m.kind = Kind::GARCH11;
  m.garch_a0 = 0.25;
  m.garch_a1 = 0.0;
  m.garch_b1 = 0.0;
  m.noise = NoiseLaw::make_student_t(2.5);
  m.validate();
  CHECK(m.tail_index() == doctest::Approx(2.5));
  RngStream rng(5, 0);
  models::Simulator sim(m);
  sim.init_stationary(rng);
  CHECK(sim.state()[0] == doctest::Approx(0.25).epsilon(1e-12));
  for (int t = 0; t < 50; ++t) {
    sim.step(rng);
    CHECK(sim.state()[0] == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("stationary initialization: X_1 and X_{n/2} have the same law") {
  for (const auto& m : model_zoo()) {
    const std::size_t reps = 30'000, n = 16;
    std::vector<double> first(reps), mid(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      auto path = models::simulate(m, n, 0xa11ce, r);
      first[r] = path.values[0];
      mid[r] = path.values[n / 2];
    }
    INFO("model ", m.describe());
    CHECK(stats::ks_two_sample_pvalue(first, mid) > 1e-3);
  }
}

TEST_CASE("Letac recursion stays inside the affine envelope") {
  ModelSpec m;
  m.kind = Kind::LETAC;
  m.a_law = a_ln();
  m.c_law = NoiseLaw::make_gaussian(1.0);
  m.d_law = NoiseLaw::make_lognormal(0.0, 0.3);  // D > 0 keeps X positive
  m.validate();

  // Manual recursion with the same per-step draw order as the simulator.
  RngStream rng(21, 2);
  double x = 1.0;
  for (int t = 0; t < 20'000; ++t) {
    double a = m.a_law.sample(rng);
    double c = m.c_law.sample(rng);
    double d = m.d_law.sample(rng);
    double next = a * std::max(c, x) + d;
    double b = a * std::max(c, 0.0) + d;  // the affine-dominating innovation
    CHECK(next <= a * x + b + 1e-12);
    CHECK(next >= a * x - std::abs(b) - 1e-12);
    x = next;
    CHECK(x > 0.0);
  }

  // The simulator implements the same map.
  models::Simulator sim(m);
  sim.set_state({2.5});
  RngStream r1(77, 0), r2(77, 0);
  double got = sim.step(r1);
  double a = m.a_law.sample(r2);
  double c = m.c_law.sample(r2);
  double d = m.d_law.sample(r2);
  CHECK(got == a * std::max(c, 2.5) + d);
}

TEST_CASE("state round trip reproduces the continuation") {
  for (const auto& m : model_zoo()) {
    RngStream rng(31, 0);
    models::Simulator sim(m);
    sim.init_stationary(rng);
    for (int t = 0; t < 10; ++t) sim.step(rng);
    auto st = sim.state();
    RngStream cont1 = rng;  // copy of the stream position
    std::vector<double> ahead(5);
    for (auto& v : ahead) v = sim.step(rng);
    models::Simulator sim2(m);
    sim2.set_state(st);
    for (double v : ahead) CHECK(sim2.step(cont1) == v);
  }
}

TEST_CASE("AR1 marginal tail constant against direct Monte Carlo") {
  auto m = ar1_model(0.5, 1.5, 0.7);
  // Closed asymptotic form: sum_j |phi|^{j alpha} = 1/(1 - 0.5^1.5).
  double factor = 1.0 / (1.0 - std::pow(0.5, 1.5));
  double x = 133.0;
  auto tv = models::marginal_tail(m, x);
  CHECK(tv.value ==
        doctest::Approx(factor * m.noise.abs_tail(x)).epsilon(1e-6));

  const std::size_t n = 4'000'000;
  RngStream rng(55, 0);
  models::Simulator sim(m);
  sim.init_stationary(rng);
  std::vector<double> ind(n);
  for (std::size_t t = 0; t < n; ++t)
    ind[t] = std::abs(sim.step(rng)) > x ? 1.0 : 0.0;
  auto est = stats::batch_means(ind);
  CHECK(std::abs(est.value - tv.value) <
        std::max(4.0 * est.ci_halfwidth, 0.08 * tv.value));
}

TEST_CASE("marginal tail refuses the pre-asymptotic regime") {
  auto m = ar1_model();
  double thr = models::regime_threshold(m);
  CHECK(thr > 0.0);
  CHECK_THROWS_AS(models::marginal_tail(m, 0.5 * thr), models::RegimeError);
  CHECK_NOTHROW(models::marginal_tail(m, 2.0 * thr));
}

TEST_CASE("marginal balance for linear models with positive coefficients") {
  auto m = ar1_model(0.5, 1.5, 0.7);
  auto bal = models::marginal_balance(m);
  CHECK(bal.p == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(bal.q == doctest::Approx(0.3).epsilon(1e-9));
  // Nonnegative processes have a pure right tail.
  auto bs = models::marginal_balance(sre_model());
  CHECK(bs.p == doctest::Approx(1.0));
}

TEST_CASE("stationary mean closed forms agree with long-run averages") {
  auto ar = ar1_model(0.5, 1.5, 1.0);  // positive noise, mean 3
  auto mi = models::stationary_mean(ar);
  CHECK(mi.closed_form);
  CHECK(mi.value == doctest::Approx(6.0).epsilon(1e-12));

  ModelSpec ma;
  ma.kind = Kind::MA;
  ma.theta = {0.5, 0.25};
  ma.noise = pareto(1.5, 1.0);
  ma.validate();
  CHECK(models::stationary_mean(ma).value ==
        doctest::Approx(3.0 * 1.75).epsilon(1e-12));

  // MC cross-check for AR1.
  const std::size_t n = 2'000'000;
  RngStream rng(61, 0);
  models::Simulator sim(ar);
  sim.init_stationary(rng);
  std::vector<double> v(n);
  for (auto& x : v) x = sim.step(rng);
  auto est = stats::batch_means(v);
  CHECK(std::abs(est.value - 6.0) < 5.0 * est.ci_halfwidth);
}

TEST_CASE("Kesten root certification") {
  double root = models::kesten_root_sre(a_ln());
  CHECK(root == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(models::a_moment(a_ln(), root) == doctest::Approx(1.0).epsilon(1e-9));

  auto g = garch_model();
  double alpha = g.tail_index();
  CHECK(alpha > 2.0);
  CHECK(alpha < 4.0);
  // MC verification of E (a1 Z^2 + b1)^{alpha/2} = 1.
  RngStream rng(71, 0);
  const std::size_t n = 2'000'000;
  std::vector<double> v(n);
  for (auto& x : v) {
    double z = g.noise.sample(rng);
    x = std::pow(g.garch_a1 * z * z + g.garch_b1, alpha / 2.0);
  }
  auto est = stats::batch_means(v);
  CHECK(std::abs(est.value - 1.0) < 4.0 * est.ci_halfwidth);
}

TEST_CASE("construction errors") {
  ModelSpec m;
  m.kind = Kind::AR1;
  m.phi = 1.0;
  m.noise = pareto(1.5, 0.7);
  CHECK_THROWS_AS(m.validate(), models::ConstructionError);

  ModelSpec s;
  s.kind = Kind::SRE_AFFINE;
  s.a_law = NoiseLaw::make_lognormal(0.1, 0.5);  // E log A > 0
  s.noise = NoiseLaw::make_lognormal(0.0, 0.5);
  CHECK_THROWS_AS(s.validate(), models::ConstructionError);

  ModelSpec s2;
  s2.kind = Kind::SRE_AFFINE;
  s2.a_law = a_ln();
  s2.noise = NoiseLaw::make_lognormal(0.0, 0.5);
  s2.declared_alpha = 1.0;  // does not solve E A^alpha = 1
  CHECK_THROWS_AS(s2.validate(), models::ConstructionError);

  ModelSpec b;  // B as heavy as the Kesten tail
  b.kind = Kind::SRE_AFFINE;
  b.a_law = a_ln();
  b.noise = pareto(1.2, 1.0);
  CHECK_THROWS_AS(b.validate(), models::ConstructionError);

  ModelSpec a2;  // alpha = 2 boundary
  a2.kind = Kind::IID;
  a2.noise = pareto(2.0, 0.5);
  CHECK_THROWS_AS(a2.validate(), models::ConstructionError);

  ModelSpec g;
  g.kind = Kind::GARCH11;
  g.garch_a0 = 0.05;
  g.garch_a1 = 0.9;
  g.garch_b1 = 0.9;  // E log(a1 Z^2 + b1) >= 0
  g.noise = NoiseLaw::make_gaussian(1.0);
  CHECK_THROWS_AS(g.validate(), models::ConstructionError);
}

TEST_CASE("model kind names round trip") {
  for (Kind k : {Kind::IID, Kind::MA, Kind::AR1, Kind::SRE_AFFINE,
                 Kind::SRE_MAX, Kind::LETAC, Kind::SV, Kind::GARCH11})
    CHECK(models::kind_from_name(models::kind_name(k)) == k);
  CHECK_THROWS_AS(models::kind_from_name("arma"), models::ConstructionError);
}
