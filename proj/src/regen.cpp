#include "regen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "tailspec.hpp"

namespace ldplab::regen {

namespace {

using models::Kind;

bool supported(const models::ModelSpec& m) {
  return m.kind == Kind::AR1 || m.kind == Kind::SRE_AFFINE ||
         m.kind == Kind::GARCH11;
}

double garch_floor(const models::ModelSpec& m) {
  return m.garch_a0 / (1.0 - m.garch_b1);
}

// One step of the driving scalar chain from state s.  Returns the new state;
// for GARCH also the emitted observation (X_t = sigma_t Z_t uses the same Z
// that drives the volatility update).
struct StepOut {
  double state = 0.0;
  double emitted = 0.0;
};

StepOut chain_step(const models::ModelSpec& m, double s, RngStream& rng) {
  StepOut out;
  switch (m.kind) {
    case Kind::AR1:
      out.state = m.phi * s + m.noise.sample(rng);
      out.emitted = out.state;
      break;
    case Kind::SRE_AFFINE:
      out.state = m.a_law.sample(rng) * s + m.noise.sample(rng);
      out.emitted = out.state;
      break;
    case Kind::GARCH11: {
      double z = m.noise.sample(rng);
      out.emitted = std::sqrt(s) * z;
      out.state = m.garch_a0 + s * (m.garch_a1 * z * z + m.garch_b1);
      break;
    }
    default:
      throw MinorizationError("regen: unsupported model kind");
  }
  return out;
}

}  // namespace

double transition_density(const models::ModelSpec& m, double s, double y) {
  switch (m.kind) {
    case Kind::AR1:
      return m.noise.density(y - m.phi * s);
    case Kind::SRE_AFFINE: {
      // E_A[ f_B(y - A s) ] by a quantile midpoint rule.
      const int nodes = 256;
      double acc = 0.0;
      for (int i = 0; i < nodes; ++i) {
        double a = m.a_law.quantile((i + 0.5) / nodes);
        acc += m.noise.density(y - a * s);
      }
      return acc / nodes;
    }
    case Kind::GARCH11: {
      double w = (y - m.garch_a0 - s * m.garch_b1) / (s * m.garch_a1);
      if (!(w > 0.0)) return 0.0;
      double zr = std::sqrt(w);
      return (m.noise.density(zr) + m.noise.density(-zr)) /
             (2.0 * zr * s * m.garch_a1);
    }
    default:
      throw MinorizationError("regen: no one-step density for this model");
  }
}

double Minorization::sample(RngStream& rng) const {
  double u = rng.u01();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t j = std::min<std::size_t>(
      it == cdf.begin() ? 0 : (it - cdf.begin()) - 1, dens.size() - 1);
  double span = cdf[j + 1] - cdf[j];
  double frac = span > 0.0 ? (u - cdf[j]) / span : 0.5;
  return edges[j] + frac * (edges[j + 1] - edges[j]);
}

double Minorization::density(double y) const {
  if (y < edges.front() || y >= edges.back()) return 0.0;
  auto it = std::upper_bound(edges.begin(), edges.end(), y);
  std::size_t j = (it - edges.begin()) - 1;
  return dens[std::min(j, dens.size() - 1)];
}

Minorization build_minorization(const models::ModelSpec& model, double c,
                                int grid_points) {
  if (!supported(model))
    throw MinorizationError(
        "build_minorization: needs a chain with a known one-step density "
        "(ar1, sre_affine, garch11)");
  if (!(c > 0.0) || grid_points < 16)
    throw rv::InputError("build_minorization: bad small set or grid");

  Minorization mn;
  std::vector<double> edges(grid_points + 1);
  const double u_lo = 1e-8, u_hi = 1.0 - 1e-8;
  if (model.kind == Kind::GARCH11) {
    double floor = garch_floor(model);
    mn.c_lo = std::max(floor, model.garch_a0);
    mn.c_hi = c;
    if (!(mn.c_hi > mn.c_lo))
      throw rv::InputError("build_minorization: GARCH small set above the state floor required");
    // Geometric y grid over the reachable next-state range.
    double zq = std::abs(model.noise.quantile(u_hi));
    double y_lo = model.garch_a0 + mn.c_lo * model.garch_b1;
    double y_hi = model.garch_a0 + mn.c_hi * (model.garch_b1 + model.garch_a1 * zq * zq);
    for (int j = 0; j <= grid_points; ++j)
      edges[j] = y_lo * std::pow(y_hi / y_lo, static_cast<double>(j) / grid_points);
  } else {
    mn.c_lo = -c;
    mn.c_hi = c;
    double shift = model.kind == Kind::AR1
                       ? std::abs(model.phi) * c
                       : model.a_law.quantile(u_hi) * c;
    for (int j = 0; j <= grid_points; ++j) {
      double u = u_lo + (u_hi - u_lo) * static_cast<double>(j) / grid_points;
      edges[j] = model.noise.quantile(u);
    }
    edges.front() -= shift;
    edges.back() += shift;
  }

  const double probes[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto g = [&](double y) {  // pointwise infimum over the small set
    double inf = std::numeric_limits<double>::infinity();
    for (double t : probes) {
      double x = mn.c_lo + t * (mn.c_hi - mn.c_lo);
      inf = std::min(inf, transition_density(model, x, y));
    }
    return inf;
  };

  // nu is the exact law that gets sampled: piecewise constant on a fine grid
  // (sub cells per coarse cell, graded like the coarse grid itself), with
  // each cell's density set to the lower envelope of g over the cell.  This
  // keeps eps * nu <= g <= p(x, .) pointwise, so the coin branch, the
  // rejection ratio, and the epsilon integral all refer to one measure.  An
  // average (midpoint) density would smear the tiny tail-cell mass uniformly
  // over very wide cells and fatten the split-chain tails by orders of
  // magnitude.
  const int sub = 16;
  const int cells = grid_points * sub;
  std::vector<double> fine(cells + 1);
  std::vector<double> se(sub + 1);
  for (int j = 0; j < grid_points; ++j) {
    if (model.kind == Kind::GARCH11) {
      for (int s = 0; s <= sub; ++s)
        se[s] = edges[j] *
                std::pow(edges[j + 1] / edges[j], static_cast<double>(s) / sub);
    } else {
      double uj = u_lo + (u_hi - u_lo) * static_cast<double>(j) / grid_points;
      double du = (u_hi - u_lo) / grid_points / sub;
      for (int s = 0; s <= sub; ++s) se[s] = model.noise.quantile(uj + s * du);
      se[0] = edges[j];  // keep the shift-extended end cells covered
      se[sub] = edges[j + 1];
    }
    for (int s = 0; s < sub; ++s) fine[j * sub + s] = se[s];
  }
  fine[cells] = edges[grid_points];

  std::vector<double> ge(cells + 1);
  for (int i = 0; i <= cells; ++i) ge[i] = g(fine[i]);
  std::vector<double> raw(cells);
  double eps = 0.0;
  for (int i = 0; i < cells; ++i) {
    double d = std::min({ge[i], g(0.5 * (fine[i] + fine[i + 1])), ge[i + 1]});
    raw[i] = d * (fine[i + 1] - fine[i]);
    eps += raw[i];
  }
  if (eps < 1e-3) {
    std::ostringstream os;
    os << "build_minorization: epsilon=" << eps
       << " below 1e-3; shrink the small set or refine the grid";
    throw MinorizationError(os.str());
  }
  mn.epsilon = eps;
  mn.edges = fine;
  mn.dens.resize(cells);
  mn.cdf.assign(cells + 1, 0.0);
  for (int i = 0; i < cells; ++i) {
    double w = fine[i + 1] - fine[i];
    mn.dens[i] = raw[i] / eps / w;
    mn.cdf[i + 1] = mn.cdf[i] + raw[i] / eps;
  }
  mn.cdf.back() = 1.0;
  return mn;
}

namespace {

// One split-chain transition.  Returns the new state, the emitted value, and
// whether this step regenerated.
struct SplitStep {
  double state = 0.0;
  double emitted = 0.0;
  bool regen = false;
};

SplitStep split_transition(const models::ModelSpec& m, const Minorization& mn,
                           double s, RngStream& rng) {
  SplitStep out;
  if (mn.in_c(s) && rng.u01() <= mn.epsilon) {
    out.regen = true;
    out.state = mn.sample(rng);
    if (m.kind == Kind::GARCH11) {
      // Reconstruct the Z that carried the chain into the sampled state.
      double w = (out.state - m.garch_a0 - s * m.garch_b1) / (s * m.garch_a1);
      double z = std::sqrt(std::max(w, 0.0));
      if (rng.u01() < 0.5) z = -z;
      out.emitted = std::sqrt(s) * z;
    } else {
      out.emitted = out.state;
    }
    return out;
  }
  bool residual = mn.in_c(s);
  for (;;) {
    StepOut prop = chain_step(m, s, rng);
    if (!residual) {
      out.state = prop.state;
      out.emitted = prop.emitted;
      return out;
    }
    double f = transition_density(m, s, prop.state);
    double r = f > 0.0 ? mn.epsilon * mn.density(prop.state) / f : 1.0;
    if (r > 1.0) r = 1.0;
    if (rng.u01() > r) {  // accept with probability 1 - r
      out.state = prop.state;
      out.emitted = prop.emitted;
      return out;
    }
  }
}

}  // namespace

CycleSet simulate_split_chain(const models::ModelSpec& model,
                              const Minorization& minor, std::size_t n,
                              std::uint64_t seed, std::uint64_t stream_id) {
  if (!supported(model))
    throw MinorizationError("simulate_split_chain: unsupported model kind");
  CycleSet cs;
  cs.mu = model.centered() ? models::stationary_mean(model).value : 0.0;
  RngStream rng(seed, stream_id);
  models::Simulator sim(model);
  sim.init_stationary(rng);
  double s = sim.state()[0];
  cs.path.resize(n);
  for (std::size_t t = 1; t <= n; ++t) {
    SplitStep st = split_transition(model, minor, s, rng);
    s = st.state;
    cs.path[t - 1] = st.emitted;
    if (st.regen) cs.regen_times.push_back(t);
  }
  cs.n_covered = n;

  auto block_sum = [&](std::size_t lo, std::size_t hi) {  // 1-based inclusive
    double acc = 0.0;
    for (std::size_t t = lo; t <= hi; ++t) acc += cs.path[t - 1] - cs.mu;
    return acc;
  };
  if (cs.regen_times.empty()) {
    cs.first_block_len = n;
    cs.first_block_sum = block_sum(1, n);
    return cs;
  }
  std::size_t tau1 = cs.regen_times.front();
  cs.first_block_len = tau1 - 1;
  cs.first_block_sum = tau1 > 1 ? block_sum(1, tau1 - 1) : 0.0;
  for (std::size_t j = 0; j + 1 < cs.regen_times.size(); ++j) {
    std::size_t lo = cs.regen_times[j], hi = cs.regen_times[j + 1] - 1;
    cs.cycle_len.push_back(hi - lo + 1);
    cs.cycle_sum.push_back(block_sum(lo, hi));
  }
  std::size_t last = cs.regen_times.back();
  cs.residual_len = n - last + 1;
  cs.residual_sum = block_sum(last, n);
  return cs;
}

ldp::ConditionReport check_drift(const models::ModelSpec& model,
                                 const std::vector<double>& p_grid,
                                 std::size_t probe_reps, double atom_proxy) {
  if (!supported(model))
    throw MinorizationError("check_drift: unsupported model kind");
  const bool garch = model.kind == Kind::GARCH11;
  auto lyap = [&](double state, double p) {
    return garch ? std::pow(state, p / 2.0) : std::pow(std::abs(state), p);
  };

  // Probe states: stationary draws plus deterministic extremes.
  std::vector<double> probes;
  double peak = 0.0;
  for (int i = 0; i < 24; ++i) {
    RngStream rng(0xd21f7ULL, i);
    models::Simulator sim(model);
    sim.init_stationary(rng);
    double s = sim.state()[0];
    probes.push_back(s);
    peak = std::max(peak, std::abs(s));
  }
  for (double f : {2.0, 5.0, 10.0}) {
    probes.push_back(peak * f);
    if (model.kind == Kind::AR1) probes.push_back(-peak * f);
  }

  ldp::ConditionReport report;
  report.condition = "drift";
  int idx = 0;
  for (double p : p_grid) {
    std::vector<double> vx, vy;
    double b = 0.0;
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      double y = probes[pi];
      RngStream rng(0xd21f8ULL + idx, pi);
      double acc = 0.0;
      for (std::size_t r = 0; r < probe_reps; ++r)
        acc += lyap(chain_step(model, y, rng).state, p);
      double resp = acc / probe_reps;
      if (std::abs(y) <= atom_proxy || (garch && y <= atom_proxy)) {
        b = std::max(b, resp);
      } else {
        vx.push_back(lyap(y, p));
        vy.push_back(resp);
      }
    }
    auto fit = stats::linfit(vx, vy);
    ldp::ConditionEntry e;
    e.k = idx;
    e.param = p;
    e.statistic = fit.slope;
    e.se = fit.se_slope;
    e.threshold = 1.0;
    e.pass = fit.slope + 3.0 * fit.se_slope < 1.0;
    report.entries.push_back(e);
    std::ostringstream os;
    os << "p=" << p << " beta=" << fit.slope << " se=" << fit.se_slope
       << " b=" << std::max(b, fit.intercept);
    report.trace.push_back(os.str());
    ++idx;
  }
  report.pass = true;
  for (const auto& e : report.entries) report.pass = report.pass && e.pass;
  return report;
}

TauTail tau_A_tail(const models::ModelSpec& model, const Minorization& minor,
                   std::size_t n, std::size_t reps, std::uint64_t seed,
                   int workers) {
  TauTail out;
  if (n == 0) {
    out.estimate = out.ci_lo = out.ci_hi = 1.0;
    return out;
  }
  std::vector<std::uint8_t> survived(reps, 0);
  parallel_for(reps, workers, [&](std::size_t r) {
    RngStream rng(seed, r);
    models::Simulator sim(model);
    sim.init_stationary(rng);
    double s = sim.state()[0];
    bool regen = false;
    for (std::size_t t = 1; t <= n && !regen; ++t) {
      SplitStep st = split_transition(model, minor, s, rng);
      s = st.state;
      regen = st.regen;
    }
    survived[r] = regen ? 0 : 1;
  });
  std::size_t hits = 0;
  for (auto v : survived) hits += v;
  auto w = stats::wilson(hits, reps);
  out.ci_lo = w.lo;
  out.ci_hi = w.hi;
  if (hits == 0) {
    out.zero_hits = true;
    out.estimate = w.hi;
  } else {
    out.estimate = static_cast<double>(hits) / reps;
  }
  return out;
}

RegenTables verify_regeneration_ldp(const models::ModelSpec& model,
                                    const Minorization& minor,
                                    const std::vector<std::size_t>& n_grid,
                                    const std::vector<double>& x_grid,
                                    std::size_t reps, int workers) {
  if (n_grid.empty() || x_grid.empty())
    throw rv::InputError("verify_regeneration_ldp: empty grids");
  auto bp = theory::b_plus_limit(model);
  if (!(bp.value > 0.0))
    throw rv::InputError("verify_regeneration_ldp: needs b_plus > 0");

  RegenTables out;
  out.cycle_tail.region_rule = out.int_ratio.region_rule =
      out.remainder.region_rule = "markov_atom";

  for (std::size_t n : n_grid) {
    std::vector<double> sn(reps);
    std::vector<std::size_t> tau1(reps);
    std::vector<std::vector<double>> csums(reps);
    std::vector<std::vector<std::size_t>> clens(reps);
    std::vector<std::size_t> regen_count(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
      CycleSet cs = simulate_split_chain(model, minor, n, 0x7e9e2ULL, r);
      double s = 0.0;
      for (double v : cs.path) s += v - cs.mu;
      sn[r] = s;
      tau1[r] = cs.regen_times.empty() ? n + 1 : cs.regen_times.front();
      csums[r] = std::move(cs.cycle_sum);
      clens[r] = std::move(cs.cycle_len);
      regen_count[r] = cs.regen_times.size();
    });

    std::vector<double> all_sums, all_lens;
    std::size_t total_regens = 0, surv = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      all_sums.insert(all_sums.end(), csums[r].begin(), csums[r].end());
      for (auto l : clens[r]) all_lens.push_back(static_cast<double>(l));
      total_regens += regen_count[r];
      if (tau1[r] > n) ++surv;
    }
    if (all_lens.empty())
      throw ldp::PowerError("verify_regeneration_ldp: no complete cycles observed");
    auto et = stats::batch_means(all_lens);
    out.e_tau = et.value;
    out.e_tau_ci = et.ci_halfwidth;
    out.pi_a = static_cast<double>(total_regens) / (static_cast<double>(reps) * n);
    out.kac_product = out.e_tau * out.pi_a;
    out.kac_ci = out.e_tau_ci * out.pi_a;
    out.tau_gt_n = static_cast<double>(surv) / reps;

    const std::size_t n_cycles = all_sums.size();
    bool any_cycle_hit = false;
    for (double x : x_grid) {
      double tail = models::marginal_tail(model, x).value;
      std::size_t cyc_hits = 0;
      for (double sv : all_sums)
        if (sv > x) ++cyc_hits;
      any_cycle_hit = any_cycle_hit || cyc_hits > 0;
      std::size_t sn_hits = 0, rem_hits = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (sn[r] > x) {
          ++sn_hits;
          if (tau1[r] > n) ++rem_hits;
        }
      }
      double pa = static_cast<double>(cyc_hits) / n_cycles;
      auto wc = stats::wilson(cyc_hits, n_cycles);
      ldp::LdpRow row;
      row.n = n;
      row.x = x;
      row.reps = n_cycles;
      row.hits = cyc_hits;
      row.ratio_hat = pa / tail;
      row.ci_halfwidth = (wc.hi - wc.lo) / 2.0 / tail;
      row.b_plus_ref = out.e_tau * bp.value;
      row.b_plus_ref_ci =
          std::hypot(out.e_tau_ci * bp.value, out.e_tau * bp.ci_halfwidth);
      out.cycle_tail.rows.push_back(row);

      ldp::LdpRow row2;
      row2.n = n;
      row2.x = x;
      row2.reps = reps;
      row2.hits = sn_hits;
      auto ws = stats::wilson(sn_hits, reps);
      if (pa > 0.0) {
        row2.ratio_hat = (static_cast<double>(sn_hits) / reps) / (n * pa);
        double rel_num = sn_hits > 0
                             ? (ws.hi - ws.lo) / 2.0 /
                                   (static_cast<double>(sn_hits) / reps)
                             : 1.0;
        double rel_den = cyc_hits > 0 ? (wc.hi - wc.lo) / 2.0 / pa : 1.0;
        row2.ci_halfwidth = row2.ratio_hat * std::hypot(rel_num, rel_den);
      }
      row2.b_plus_ref = 1.0 / out.e_tau;
      row2.b_plus_ref_ci = out.e_tau_ci / (out.e_tau * out.e_tau);
      out.int_ratio.rows.push_back(row2);

      ldp::LdpRow row3;
      row3.n = n;
      row3.x = x;
      row3.reps = reps;
      row3.hits = rem_hits;
      row3.ratio_hat = static_cast<double>(rem_hits) / reps / (n * tail);
      auto wr = stats::wilson(rem_hits, reps);
      row3.ci_halfwidth = (wr.hi - wr.lo) / 2.0 / (n * tail);
      out.remainder.rows.push_back(row3);
      out.remainder_bound.push_back(static_cast<double>(surv) / reps / (n * tail));
    }
    if (!any_cycle_hit)
      throw ldp::PowerError("verify_regeneration_ldp: zero cycle-tail hits at every x");
  }
  return out;
}

}  // namespace ldplab::regen
