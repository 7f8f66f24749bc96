#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ldp.hpp"
#include "models.hpp"
#include "stats.hpp"

using namespace ldplab;
using models::Kind;
using models::ModelSpec;

namespace {

NoiseLaw pareto(double alpha, double p) {
  rv::TailSpec ts;
  ts.alpha = alpha;
  ts.p = p;
  ts.q = 1.0 - p;
  return NoiseLaw::make_pareto(ts);
}

ModelSpec iid_model(double alpha = 1.5, double p = 0.7) {
  ModelSpec m;
  m.kind = Kind::IID;
  m.noise = pareto(alpha, p);
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("default region rules per model kind") {
  CHECK(ldp::default_rule(iid_model()) == "nagaev_iid");
  ModelSpec ma;
  ma.kind = Kind::MA;
  ma.theta = {0.5};
  ma.noise = pareto(1.5, 0.7);
  ma.validate();
  CHECK(ldp::default_rule(ma) == "m0_dep");
  ModelSpec sv;
  sv.kind = Kind::SV;
  sv.sv_a = 0.5;
  sv.sv_eta_sd = 0.7;
  sv.noise = pareto(1.5, 0.7);
  sv.validate();
  CHECK(ldp::default_rule(sv) == "sv");
  ModelSpec ar;
  ar.kind = Kind::AR1;
  ar.phi = 0.5;
  ar.noise = pareto(1.5, 0.7);
  ar.validate();
  CHECK(ldp::default_rule(ar) == "sre");
}

TEST_CASE("short sums reduce to the marginal tail at large x") {
  auto m = iid_model(1.5, 0.7);
  ldp::RatioOptions opts;
  opts.workers = 4;
  auto t = ldp::estimate_ratio(m, {2}, 8, 200'000, 11, opts);
  REQUIRE(t.rows.size() == 8);
  // At the largest usable x the single-big-jump ratio is already p.
  const auto& r = t.rows.back();
  CHECK(std::abs(r.ratio_hat - 0.7) < 3.0 * r.ci_halfwidth + 0.05);
  CHECK(r.b_plus_ref == doctest::Approx(0.7));
}

TEST_CASE("positive noise has an empty left tail") {
  auto m = iid_model(0.8, 1.0);  // alpha < 1: no centering, S_n >= 0
  ldp::RatioOptions opts;
  opts.workers = 4;
  auto t = ldp::estimate_ratio(m, {200}, 4, 50'000, 5, opts);
  REQUIRE(!t.left_rows.empty());
  for (const auto& r : t.left_rows) {
    CHECK(r.hits == 0);
    CHECK(r.b_plus_ref == 0.0);
  }
}

TEST_CASE("common random numbers make hits monotone in x") {
  auto m = iid_model();
  ldp::RatioOptions opts;
  opts.workers = 4;
  auto t = ldp::estimate_ratio(m, {500}, 8, 100'000, 3, opts);
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].hits <= t.rows[i - 1].hits);
}

TEST_CASE("flipping the noise sign swaps the two tables exactly") {
  auto mp = iid_model(1.5, 0.7);
  auto mq = iid_model(1.5, 0.3);
  ldp::RatioOptions opts;
  opts.workers = 4;
  opts.x_factors = {1.0, 2.0, 4.0};
  auto tp = ldp::estimate_ratio(mp, {400}, 8, 40'000, 77, opts);
  auto tq = ldp::estimate_ratio(mq, {400}, 8, 40'000, 77, opts);
  REQUIRE(tp.rows.size() == tq.rows.size());
  for (std::size_t i = 0; i < tp.rows.size(); ++i) {
    CHECK(tp.left_rows[i].hits == tq.rows[i].hits);
    CHECK(tp.left_rows[i].ratio_hat == tq.rows[i].ratio_hat);
    // q stored as 1 - p differs from the literal by one ulp.
    CHECK(tp.left_rows[i].b_plus_ref ==
          doctest::Approx(tq.rows[i].b_plus_ref).epsilon(1e-15));
    CHECK(tp.rows[i].hits == tq.left_rows[i].hits);
    CHECK(tp.rows[i].ratio_hat == tq.left_rows[i].ratio_hat);
  }
}

TEST_CASE("worker count does not change any count") {
  auto m = iid_model();
  for (int workers : {1, 3, 8}) {
    ldp::RatioOptions opts;
    opts.workers = workers;
    auto t = ldp::estimate_ratio(m, {300}, 4, 20'000, 9, opts);
    static std::vector<std::size_t> ref;
    std::vector<std::size_t> hits;
    for (const auto& r : t.rows) hits.push_back(r.hits);
    for (const auto& r : t.left_rows) hits.push_back(r.hits);
    if (ref.empty()) ref = hits;
    CHECK(hits == ref);
  }
}

TEST_CASE("power precheck rejects unreachable thresholds") {
  auto m = iid_model();
  ldp::RatioOptions opts;
  opts.workers = 4;
  CHECK_THROWS_AS(ldp::estimate_ratio(m, {1000}, 8, 100, 1, opts),
                  ldp::PowerError);
  // Explicit factors beyond the power limit are dropped with a note.
  ldp::RatioOptions opts2;
  opts2.workers = 4;
  opts2.x_factors = {1.0, 1e6};
  auto t = ldp::estimate_ratio(m, {200}, 8, 50'000, 1, opts2);
  CHECK(t.rows.size() == 1);
  CHECK(!t.notes.empty());
}

TEST_CASE("exhaustive three-point-noise oracle for short sums") {
  // IID three-point noise, exact P(S_n - n mu > x) by enumerating all 3^n
  // outcomes, against the simulator's centered hit counts.
  ModelSpec m;
  m.kind = Kind::IID;
  m.noise = NoiseLaw::make_discrete3({-1.0, 0.5, 4.0}, {0.3, 0.5, 0.2});
  m.declared_alpha = 1.5;  // forces the centering path
  const double mu = m.noise.mean();
  CHECK(models::stationary_mean(m).value == doctest::Approx(mu));

  auto exact_tail = [&](std::size_t n, double x) {
    double total = 0.0;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
      double s = 0.0, pr = 1.0;
      std::size_t rem = c;
      for (std::size_t i = 0; i < n; ++i) {
        int d = rem % 3;
        rem /= 3;
        s += m.noise.values[d];
        pr *= m.noise.probs[d];
      }
      if (s - n * mu > x) total += pr;
    }
    return total;
  };

  RngStream pick(0x0a11, 0);
  const std::size_t reps = 200'000;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(pick.u01() * 5);  // 2..6
    double x = -2.0 + 12.0 * pick.u01();
    double want = exact_tail(n, x);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      auto path = models::simulate(m, n, 0x5eed + trial, r);
      double s = 0.0;
      for (double v : path.values) s += v;
      if (s - n * mu > x) ++hits;
    }
    double got = static_cast<double>(hits) / reps;
    double sd = std::sqrt(std::max(want * (1.0 - want), 1e-9) / reps);
    INFO("n=", n, " x=", x, " exact=", want, " mc=", got);
    CHECK(std::abs(got - want) < 4.0 * sd + 1e-9);
  }
}

TEST_CASE("anticlustering statistic is well formed") {
  auto m = iid_model();
  auto xg = std::vector<double>{20.0, 40.0};
  auto rep = ldp::check_anticlustering(m, {2, 3}, {}, 50, xg, 4000, 4);
  CHECK(rep.condition == "AC_alpha");
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) CHECK(e.statistic >= 0.0);
  CHECK(!rep.trace.empty());

  CHECK_THROWS_AS(
      ldp::check_anticlustering(m, {2, 3}, {0.1, 0.2}, 50, xg, 1000, 4),
      rv::InputError);  // schedule must decrease
  CHECK_THROWS_AS(ldp::check_anticlustering(m, {2}, {}, 50, {1e7}, 1000, 4),
                  ldp::ConditioningError);  // no exceedances that deep
}

TEST_CASE("truncated-sum statistic is well formed") {
  auto m = iid_model();
  auto rep = ldp::check_truncated_sum(m, 100, {30.0, 60.0}, {2, 4}, 20'000, 4);
  CHECK(rep.condition == "trunc_sum");
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) CHECK(e.statistic >= 0.0);
  CHECK(ldp::default_delta(2) == doctest::Approx(std::exp(-2.0)));
  CHECK(ldp::default_eps(4) == doctest::Approx(1.0 / 16.0));
}
