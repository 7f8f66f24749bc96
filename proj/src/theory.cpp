#include "theory.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "parallel.hpp"
#include "tailspec.hpp"

namespace ldplab::theory {

namespace {

std::string hash_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(s));
  return buf;
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

std::string method_name(ConstantEstimate::Method m) {
  switch (m) {
    case ConstantEstimate::Method::closed_form: return "closed_form";
    case ConstantEstimate::Method::mc_expectation: return "mc_expectation";
    case ConstantEstimate::Method::tail_ratio_diff: return "tail_ratio_diff";
  }
  return "?";
}

Region region(double alpha, std::size_t n, const std::string& rule,
              const RegionParams& params) {
  if (!(alpha > 0.0)) throw rv::InputError("region: alpha must be positive");
  if (std::abs(alpha - 2.0) < 1e-12)
    throw rv::InputError("region: alpha = 2 is an unsupported boundary case");
  if (n < 2) throw rv::InputError("region: n must be >= 2");

  Region reg;
  reg.n = n;
  reg.rule = rule;
  const double nn = static_cast<double>(n);
  if (alpha > 2.0) {
    double a = params.a > 0.0 ? params.a : alpha - 1.0;
    if (!(a > alpha - 2.0))
      throw rv::InputError("region: need a > alpha - 2 for the sqrt(a n log n) rule");
    reg.b_n = std::sqrt(a * nn * std::log(nn));
  } else {
    if (!(params.delta > 0.0))
      throw rv::InputError("region: need delta > 0 for the n^{1/alpha+delta} rule");
    reg.b_n = std::pow(nn, 1.0 / alpha + params.delta);
  }

  const double inf = std::numeric_limits<double>::infinity();
  if (rule == "nagaev_iid" || rule == "m0_dep" || rule == "sv") {
    reg.c_n = inf;
  } else if (rule == "sre") {
    if (alpha <= 1.0) {
      reg.c_n = inf;
    } else {
      if (!(params.gamma > 0.0))
        throw rv::InputError("region: need gamma > 0 for c_n = exp(gamma n)");
      double loge = params.gamma * nn;
      reg.c_n = loge > 700.0 ? inf : std::exp(loge);
    }
  } else if (rule == "markov_atom") {
    if (!params.tau_tail)
      throw rv::InputError("region: markov_atom rule needs a tau_A tail callback");
    double a_cn = params.alpha_for_cn > 0.0 ? params.alpha_for_cn : alpha;
    double p_tau = std::max(params.tau_tail(n), 1e-300);
    // Choose c_n so n P(|X| > c_n) exceeds P(tau_A > n) by a factor log n.
    double s_n = std::log(nn + 1.0);
    reg.c_n = std::pow(nn / (p_tau * s_n), 1.0 / a_cn);
  } else {
    throw rv::InputError("region: unknown rule " + rule);
  }
  if (!(reg.b_n < reg.c_n))
    throw rv::InputError("region: b_n >= c_n; regeneration tail too heavy at this n");
  return reg;
}

std::vector<double> default_x_grid(const models::ModelSpec& model,
                                   std::size_t points) {
  // Base scale: roughly the 0.999 magnitude quantile of |X|.
  double base;
  if (model.kind == models::Kind::IID) {
    base = 2.0;
    if (auto rv = model.noise.rv_info())
      base = std::pow(1000.0, 1.0 / rv->alpha);
  } else {
    base = models::regime_threshold(model);
  }
  double lo = 2.0 * base;
  double hi = 40.0 * lo;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return grid;
}

ConstantEstimate b_plus_k(const models::ModelSpec& model, int k,
                          std::vector<double> x_grid, std::size_t reps,
                          int workers) {
  if (k < 1) throw rv::InputError("b_plus_k: k must be >= 1");
  if (x_grid.empty()) x_grid = default_x_grid(model);
  const std::size_t m = x_grid.size();
  if (m < 8) throw rv::InputError("b_plus_k: need at least 8 grid points");

  double center = 0.0;
  if (model.centered()) center = k * models::stationary_mean(model).value;

  // Common random numbers: one path set, every threshold swept over it.
  std::vector<std::vector<std::uint8_t>> exceed(m,
      std::vector<std::uint8_t>(reps, 0));
  parallel_for(reps, workers, [&](std::size_t r) {
    RngStream rng(0xb91ed5a1u + static_cast<std::uint64_t>(k), r);
    models::Simulator sim(model);
    sim.init_stationary(rng);
    double s = 0.0;
    for (int t = 0; t < k; ++t) s += sim.step(rng);
    s -= center;
    for (std::size_t i = 0; i < m; ++i)
      exceed[i][r] = s > x_grid[i] ? 1 : 0;
  });

  std::vector<double> ratio(m), se(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t hits = 0;
    for (std::uint8_t e : exceed[i]) hits += e;
    double denom = models::marginal_tail(model, x_grid[i]).value;
    auto w = stats::wilson(hits, reps);
    ratio[i] = static_cast<double>(hits) / reps / denom;
    se[i] = std::max((w.hi - w.lo) / 2.0 / denom, 1e-12);
  }

  // Plateau over the last half of the grid.
  const std::size_t tail_pts = 4;
  std::vector<double> lx(tail_pts), ry(tail_pts), wt(tail_pts);
  for (std::size_t i = 0; i < tail_pts; ++i) {
    std::size_t j = m - tail_pts + i;
    lx[i] = std::log(x_grid[j]);
    ry[i] = ratio[j];
    wt[i] = 1.0 / (se[j] * se[j]);
  }
  auto fit = stats::wlinfit(lx, ry, wt);
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < tail_pts; ++i) {
    sw += wt[i];
    swy += wt[i] * ry[i];
  }
  double value = swy / sw;
  double drift = std::abs(fit.slope) * (lx.back() - lx.front());
  bool slope_nonzero = std::abs(fit.slope) > 1.96 * fit.se_slope;
  if (slope_nonzero && drift > 0.10 * std::max(std::abs(value), 1e-12)) {
    std::ostringstream os;
    os << "b_plus_k: no plateau (relative drift "
       << drift / std::max(std::abs(value), 1e-12) << " over last " << tail_pts
       << " grid points, slope " << fit.slope << " +- " << fit.se_slope << ")";
    throw NonRegimeError(os.str());
  }
  ConstantEstimate est;
  est.value = value;
  est.ci_halfwidth = 1.96 / std::sqrt(sw);
  est.method = ConstantEstimate::Method::mc_expectation;
  est.inputs_hash = hash_hex(model.describe() + ":b+k=" + std::to_string(k));
  return est;
}

double ma_b_plus_k_closed(const models::ModelSpec& model, int k) {
  auto info = model.noise.rv_info();
  if (!info) throw rv::InputError("ma_b_plus_k_closed: noise must be regularly varying");
  std::vector<double> psi{1.0};
  if (model.kind == models::Kind::MA) {
    psi.insert(psi.end(), model.theta.begin(), model.theta.end());
  } else if (model.kind == models::Kind::AR1) {
    double w = model.phi;
    while (std::pow(std::abs(w), info->alpha) > 1e-14 && psi.size() < 10000) {
      psi.push_back(w);
      w *= model.phi;
    }
  } else {
    throw rv::InputError("ma_b_plus_k_closed: linear models only");
  }
  const double alpha = info->alpha;
  const int mm = static_cast<int>(psi.size()) - 1;
  double denom = 0.0;
  for (double c : psi) denom += std::pow(std::abs(c), alpha);
  double num = 0.0;
  // S_k = sum_s C_s Z_s with C_s the window sum of psi over 1 <= s+i <= k.
  for (int s = 1 - mm; s <= k; ++s) {
    double c = 0.0;
    for (int i = std::max(0, 1 - s); i <= std::min(mm, k - s); ++i) c += psi[i];
    num += info->p * std::pow(pos(c), alpha) + info->q * std::pow(pos(-c), alpha);
  }
  return num / denom;
}

ConstantEstimate sre_b_plus(const models::ModelSpec& model, int series_cap,
                            double tol, std::size_t reps, int workers) {
  if (model.kind != models::Kind::SRE_AFFINE)
    throw rv::InputError("sre_b_plus: affine recursion only");
  const double alpha = model.tail_index();
  std::vector<double> vals(reps);
  std::vector<std::uint8_t> capped(reps, 0);
  parallel_for(reps, workers, [&](std::size_t r) {
    RngStream rng(0x5eb0c057u, r);
    double t_sum = 0.0, prod = 1.0;
    int i = 0;
    for (; i < series_cap; ++i) {
      prod *= model.a_law.sample(rng);
      if (prod < tol) break;
      t_sum += prod;
    }
    if (i == series_cap) capped[r] = 1;
    vals[r] = std::pow(1.0 + t_sum, alpha) - std::pow(t_sum, alpha);
  });
  std::size_t ncap = 0;
  for (auto c : capped) ncap += c;
  if (ncap > reps / 100)
    throw InstabilityError("sre_b_plus: series cap hit in >1% of replications");
  auto bm = stats::batch_means(vals);
  ConstantEstimate est;
  est.value = bm.value;
  est.ci_halfwidth = bm.ci_halfwidth;
  est.method = ConstantEstimate::Method::mc_expectation;
  est.inputs_hash = hash_hex(model.describe() + ":sre_b+");
  return est;
}

ConstantEstimate garch_b_plus(const models::ModelSpec& model, int series_cap,
                              double tol, std::size_t reps, int workers) {
  if (model.kind != models::Kind::GARCH11)
    throw rv::InputError("garch_b_plus: GARCH(1,1) only");
  const double alpha = model.tail_index();
  const double denom = 2.0 * model.noise.abs_moment(alpha);
  std::vector<double> vals(reps);
  std::vector<std::uint8_t> capped(reps, 0);
  parallel_for(reps, workers, [&](std::size_t r) {
    RngStream rng(0x6a2c11f3u, r);
    double t_sum = 0.0, prod = 1.0;
    int t = 0;
    for (; t < series_cap; ++t) {
      double z = model.noise.sample(rng);
      t_sum += prod * z;
      prod *= std::sqrt(model.garch_a1 * z * z + model.garch_b1);
      if (prod < tol) break;
    }
    if (t == series_cap) capped[r] = 1;
    double z0 = model.noise.sample(rng);
    double a1 = std::sqrt(model.garch_a1 * z0 * z0 + model.garch_b1);
    vals[r] = (std::pow(std::abs(z0 + a1 * t_sum), alpha) -
               std::pow(std::abs(a1 * t_sum), alpha)) /
              denom;
  });
  std::size_t ncap = 0;
  for (auto c : capped) ncap += c;
  if (ncap > reps / 100)
    throw InstabilityError("garch_b_plus: series cap hit in >1% of replications");
  auto bm = stats::batch_means(vals);
  ConstantEstimate est;
  est.value = bm.value;
  est.ci_halfwidth = bm.ci_halfwidth;
  est.method = ConstantEstimate::Method::mc_expectation;
  est.inputs_hash = hash_hex(model.describe() + ":garch_b+");
  return est;
}

ConstantEstimate goldie_c_plus(const models::ModelSpec& model, std::size_t reps,
                               bool positive_tail) {
  if (!model.is_kesten())
    throw rv::InputError("goldie_c_plus: Kesten-family models only");
  auto bm = models::goldie_c_plus_impl(model, reps, positive_tail);
  ConstantEstimate est;
  est.value = bm.value;
  est.ci_halfwidth = bm.ci_halfwidth;
  est.method = ConstantEstimate::Method::mc_expectation;
  est.inputs_hash =
      hash_hex(model.describe() + (positive_tail ? ":c+" : ":c-"));
  return est;
}

ConstantEstimate b_plus_limit(const models::ModelSpec& model, std::size_t reps,
                              int workers) {
  ConstantEstimate est;
  est.inputs_hash = hash_hex(model.describe() + ":b+");
  switch (model.kind) {
    case models::Kind::IID: {
      est.value = model.noise.rv_info()->p;
      return est;
    }
    case models::Kind::MA: {
      int m0 = static_cast<int>(model.theta.size());
      est.value = ma_b_plus_k_closed(model, m0 + 1) - ma_b_plus_k_closed(model, m0);
      return est;
    }
    case models::Kind::AR1: {
      auto rv = *model.noise.rv_info();
      double alpha = rv.alpha;
      double s = 1.0 / (1.0 - model.phi);
      est.value = (1.0 - std::pow(std::abs(model.phi), alpha)) *
                  (rv.p * std::pow(pos(s), alpha) + rv.q * std::pow(pos(-s), alpha));
      return est;
    }
    case models::Kind::SV: {
      est.value = model.noise.rv_info()->p;
      return est;
    }
    case models::Kind::SRE_AFFINE:
      return sre_b_plus(model, 10000, 1e-12, reps, workers);
    case models::Kind::GARCH11:
      return garch_b_plus(model, 10000, 1e-12, reps, workers);
    default: {
      // Differencing with k escalation until two successive differences agree
      // within their joint CI.
      std::ostringstream trace;
      ConstantEstimate prev;
      bool have_prev = false;
      for (int k : {2, 4, 8, 16, 32}) {
        auto hi = b_plus_k(model, k + 1, {}, reps, workers);
        auto lo = b_plus_k(model, k, {}, reps, workers);
        ConstantEstimate diff;
        diff.value = hi.value - lo.value;
        diff.ci_halfwidth = std::hypot(hi.ci_halfwidth, lo.ci_halfwidth);
        diff.method = ConstantEstimate::Method::tail_ratio_diff;
        diff.inputs_hash = est.inputs_hash;
        trace << "k=" << k << ": " << diff.value << " +- " << diff.ci_halfwidth
              << "; ";
        if (have_prev &&
            std::abs(diff.value - prev.value) <=
                std::hypot(diff.ci_halfwidth, prev.ci_halfwidth))
          return diff;
        prev = diff;
        have_prev = true;
      }
      throw InstabilityError("b_plus_limit: differencing failed to stabilize by k=32 [" +
                             trace.str() + "]");
    }
  }
}

}  // namespace ldplab::theory
