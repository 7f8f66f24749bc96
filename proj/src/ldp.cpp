#include "ldp.hpp"

#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "tailspec.hpp"

namespace ldplab::ldp {

double default_delta(int k) { return std::exp(-static_cast<double>(k)); }
double default_eps(int k) { return 1.0 / (static_cast<double>(k) * k); }

std::string default_rule(const models::ModelSpec& model) {
  switch (model.kind) {
    case models::Kind::IID: return "nagaev_iid";
    case models::Kind::MA: return "m0_dep";
    case models::Kind::SV: return "sv";
    default: return "sre";
  }
}

namespace {

// b_minus reference: b_plus of the sign-flipped series.
theory::ConstantEstimate b_minus_ref(const models::ModelSpec& model) {
  using models::Kind;
  theory::ConstantEstimate zero;
  switch (model.kind) {
    case Kind::IID:
    case Kind::MA:
    case Kind::AR1:
    case Kind::SV: {
      auto info = *model.noise.rv_info();
      if (model.noise.kind == NoiseLaw::Kind::StudentT)
        return theory::b_plus_limit(model);  // symmetric noise
      models::ModelSpec flipped = model;
      rv::TailSpec ts = model.noise.pareto;
      std::swap(ts.p, ts.q);
      flipped.noise = NoiseLaw::make_pareto(ts);
      flipped.validate();
      (void)info;
      return theory::b_plus_limit(flipped);
    }
    case Kind::GARCH11:
      return theory::b_plus_limit(model);  // Z symmetric
    default:
      return zero;  // nonnegative processes have no left tail
  }
}

}  // namespace

LdpTable estimate_ratio(const models::ModelSpec& model,
                        const std::vector<std::size_t>& n_grid, int x_per_n,
                        std::size_t reps, std::uint64_t seed,
                        const RatioOptions& opts) {
  if (n_grid.empty() || x_per_n < 1 || reps == 0)
    throw rv::InputError("estimate_ratio: empty grid or zero reps");
  LdpTable table;
  table.region_rule = opts.rule.empty() ? default_rule(model) : opts.rule;
  const double alpha = model.tail_index();
  const double mu = model.centered() ? models::stationary_mean(model).value : 0.0;

  auto bp = theory::b_plus_limit(model);
  auto bm = b_minus_ref(model);

  for (std::size_t n : n_grid) {
    auto reg = theory::region(alpha, n, table.region_rule, opts.region);

    // Power precheck: largest x with >= min_expected_hits expected numerator
    // counts, using the asymptotic marginal scale.
    double x_ref = std::max(reg.b_n, 1.02 * models::regime_threshold(model));
    double k_scale = models::marginal_tail(model, x_ref).value * std::pow(x_ref, alpha);
    double x_power = std::pow(
        static_cast<double>(reps) * n * k_scale *
            std::max(bp.value, 0.05) / opts.min_expected_hits,
        1.0 / alpha);

    std::vector<double> xs;
    if (!opts.x_factors.empty()) {
      for (double f : opts.x_factors) {
        double x = f * reg.b_n;
        if (x > reg.c_n) {
          std::ostringstream os;
          os << "n=" << n << ": x=" << x << " beyond c_n=" << reg.c_n << ", dropped";
          table.notes.push_back(os.str());
          continue;
        }
        if (x > x_power) {
          std::ostringstream os;
          os << "n=" << n << ": x=" << x << " beyond power limit " << x_power
             << " (<" << opts.min_expected_hits << " expected hits), dropped";
          table.notes.push_back(os.str());
          continue;
        }
        xs.push_back(x);
      }
    } else {
      double hi = std::min(reg.c_n, x_power);
      if (!(hi > reg.b_n)) {
        std::ostringstream os;
        os << "estimate_ratio: power precheck eliminates all x for n=" << n
           << " (b_n=" << reg.b_n << ", power limit " << x_power << ")";
        throw PowerError(os.str());
      }
      for (int i = 0; i < x_per_n; ++i)
        xs.push_back(reg.b_n *
                     std::pow(hi / reg.b_n,
                              x_per_n == 1 ? 0.0
                                           : static_cast<double>(i) / (x_per_n - 1)));
    }
    if (xs.empty()) {
      std::ostringstream os;
      os << "estimate_ratio: no usable x for n=" << n;
      throw PowerError(os.str());
    }

    const std::size_t m = xs.size();
    std::vector<std::vector<std::uint8_t>> hit_r(m, std::vector<std::uint8_t>(reps));
    std::vector<std::vector<std::uint8_t>> hit_l(m, std::vector<std::uint8_t>(reps));
    const double center = mu * static_cast<double>(n);
    parallel_for(reps, opts.workers, [&](std::size_t r) {
      RngStream rng(seed, r);
      models::Simulator sim(model);
      sim.init_stationary(rng);
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += sim.step(rng);
      s -= center;
      for (std::size_t i = 0; i < m; ++i) {
        hit_r[i][r] = s > xs[i] ? 1 : 0;
        hit_l[i][r] = s < -xs[i] ? 1 : 0;
      }
    });

    for (std::size_t i = 0; i < m; ++i) {
      auto tail = models::marginal_tail(model, xs[i]);
      double denom = static_cast<double>(n) * tail.value;
      auto emit = [&](const std::vector<std::uint8_t>& hv,
                      const theory::ConstantEstimate& ref,
                      std::vector<LdpRow>& out) {
        std::size_t hits = 0;
        for (auto h : hv) hits += h;
        LdpRow row;
        row.n = n;
        row.x = xs[i];
        row.in_region = xs[i] >= reg.b_n && xs[i] <= reg.c_n;
        row.hits = hits;
        row.reps = reps;
        row.ratio_hat = static_cast<double>(hits) / reps / denom;
        auto w = stats::wilson(hits, reps);
        row.ci_halfwidth = (w.hi - w.lo) / 2.0 / denom;
        if (tail.band > 0.0)
          row.ci_halfwidth = std::hypot(
              row.ci_halfwidth, row.ratio_hat * tail.band / tail.value);
        row.b_plus_ref = ref.value;
        row.b_plus_ref_ci = ref.ci_halfwidth;
        out.push_back(row);
      };
      emit(hit_r[i], bp, table.rows);
      emit(hit_l[i], bm, table.left_rows);
    }
  }
  return table;
}

ConditionReport check_anticlustering(const models::ModelSpec& model,
                                     const std::vector<int>& k_grid,
                                     const std::vector<double>& delta_schedule,
                                     std::size_t n,
                                     const std::vector<double>& x_grid,
                                     std::size_t reps, int workers) {
  if (k_grid.empty() || x_grid.empty())
    throw rv::InputError("check_anticlustering: empty k or x grid");
  std::vector<double> deltas = delta_schedule;
  if (deltas.empty())
    for (int k : k_grid) deltas.push_back(default_delta(k));
  if (deltas.size() != k_grid.size())
    throw rv::InputError("check_anticlustering: schedule length mismatch");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1]) || !(deltas[i] > 0.0))
      throw rv::InputError("check_anticlustering: delta schedule must be positive decreasing");

  const double alpha = model.tail_index();
  double u_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k_grid.size(); ++i)
    for (double x : x_grid) u_min = std::min(u_min, x * deltas[i]);

  // Pilot run: harvest stationary states at exceedance times of the lowest
  // threshold; conditioning resamples from this pool.
  const std::size_t pilot_len = 4'000'000;
  std::vector<std::vector<double>> pool_states;
  std::vector<double> pool_values;
  {
    RngStream rng(0xac0ac0aULL, 1);
    models::Simulator sim(model);
    sim.init_stationary(rng);
    for (std::size_t t = 0; t < pilot_len; ++t) {
      double v = sim.step(rng);
      if (std::abs(v) > u_min) {
        pool_states.push_back(sim.state());
        pool_values.push_back(v);
      }
    }
  }

  ConditionReport report;
  report.condition = "AC_alpha";
  double prev_stat = std::numeric_limits<double>::infinity();
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    const int k = k_grid[ki];
    const double dk = deltas[ki];
    double stat = 0.0;
    for (double x : x_grid) {
      const double u = x * dk;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < pool_values.size(); ++i)
        if (std::abs(pool_values[i]) > u) idx.push_back(i);
      double acc_rate = static_cast<double>(idx.size()) / pilot_len;
      if (acc_rate < 1e-5) {
        std::ostringstream os;
        os << "check_anticlustering: conditioning acceptance rate " << acc_rate
           << " < 1e-5 at x*delta_k=" << u
           << "; use smaller x or an importance-seeded start";
        throw ConditioningError(os.str());
      }
      std::vector<double> counts(reps);
      parallel_for(reps, workers, [&](std::size_t r) {
        RngStream rng(0xac0ac0bULL + k, r);
        std::size_t pick = static_cast<std::size_t>(rng.u01() * idx.size());
        if (pick >= idx.size()) pick = idx.size() - 1;
        models::Simulator sim(model);
        sim.set_state(pool_states[idx[pick]]);
        double c = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
          double v = sim.step(rng);
          if (j >= static_cast<std::size_t>(k) && std::abs(v) > u) c += 1.0;
        }
        counts[r] = c;
      });
      double sum_probs = stats::mean(counts);
      stat = std::max(stat, std::pow(dk, -alpha) * sum_probs);
    }
    ConditionEntry e;
    e.k = k;
    e.statistic = stat;
    e.threshold = prev_stat;
    e.pass = stat < prev_stat;
    report.entries.push_back(e);
    std::ostringstream os;
    os << "k=" << k << " delta_k=" << dk << " statistic=" << stat;
    report.trace.push_back(os.str());
    prev_stat = stat;
  }
  report.pass = true;
  for (const auto& e : report.entries) report.pass = report.pass && e.pass;
  return report;
}

ConditionReport check_truncated_sum(const models::ModelSpec& model,
                                    std::size_t n,
                                    const std::vector<double>& x_grid,
                                    const std::vector<int>& k_grid,
                                    std::size_t reps, int workers) {
  if (k_grid.empty() || x_grid.empty())
    throw rv::InputError("check_truncated_sum: empty k or x grid");
  // The schedule constraint (k+1) delta_k <= eps_k is asymptotic; the default
  // schedules satisfy it from k = 8 on, so small probe k are not rejected.

  ConditionReport report;
  report.condition = "trunc_sum";
  double prev_stat = std::numeric_limits<double>::infinity();
  for (int k : k_grid) {
    const double dk = default_delta(k), ek = default_eps(k);
    double stat = 0.0;
    for (double x : x_grid) {
      std::vector<double> tsum(reps);
      parallel_for(reps, workers, [&](std::size_t r) {
        RngStream rng(0x7271c5ULL + k, r);
        models::Simulator sim(model);
        sim.init_stationary(rng);
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
          double v = sim.step(rng);
          if (std::abs(v) <= dk * x) s += v;
        }
        tsum[r] = s;
      });
      // Self-centering: the condition concerns fluctuation above the mean of
      // the truncated sum.
      double mu = stats::mean(tsum);
      std::size_t hits = 0;
      for (double s : tsum)
        if (s - mu > ek * x) ++hits;
      double denom = static_cast<double>(n) * models::marginal_tail(model, x).value;
      stat = std::max(stat, static_cast<double>(hits) / reps / denom);
    }
    ConditionEntry e;
    e.k = k;
    e.statistic = stat;
    e.threshold = prev_stat;
    e.pass = stat < prev_stat;
    report.entries.push_back(e);
    std::ostringstream os;
    os << "k=" << k << " delta_k=" << dk << " eps_k=" << ek
       << " statistic=" << stat;
    report.trace.push_back(os.str());
    prev_stat = stat;
  }
  report.pass = true;
  for (const auto& e : report.entries) report.pass = report.pass && e.pass;
  return report;
}

}  // namespace ldplab::ldp
