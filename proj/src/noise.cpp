#include "noise.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_randist.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ldplab {

NoiseLaw NoiseLaw::make_pareto(const rv::TailSpec& spec) {
  NoiseLaw law;
  law.kind = Kind::Pareto;
  law.pareto = spec;
  law.validate();
  return law;
}

NoiseLaw NoiseLaw::make_gaussian(double sd) {
  NoiseLaw law;
  law.kind = Kind::Gaussian;
  law.sd = sd;
  law.validate();
  return law;
}

NoiseLaw NoiseLaw::make_student_t(double nu, double scale) {
  NoiseLaw law;
  law.kind = Kind::StudentT;
  law.nu = nu;
  law.t_scale = scale;
  law.validate();
  return law;
}

NoiseLaw NoiseLaw::unit_variance_t(double nu) {
  if (nu <= 2.0)
    throw rv::InputError("unit_variance_t: requires nu > 2");
  return make_student_t(nu, std::sqrt((nu - 2.0) / nu));
}

NoiseLaw NoiseLaw::make_lognormal(double mu, double sigma) {
  NoiseLaw law;
  law.kind = Kind::LogNormal;
  law.ln_mu = mu;
  law.ln_sigma = sigma;
  law.validate();
  return law;
}

NoiseLaw NoiseLaw::make_discrete3(std::vector<double> values, std::vector<double> probs) {
  NoiseLaw law;
  law.kind = Kind::Discrete3;
  law.values = std::move(values);
  law.probs = std::move(probs);
  law.validate();
  return law;
}

void NoiseLaw::validate() const {
  switch (kind) {
    case Kind::Pareto:
      pareto.validate();
      break;
    case Kind::Gaussian:
      if (!(sd > 0.0)) throw rv::InputError("NoiseLaw: Gaussian sd must be positive");
      break;
    case Kind::StudentT:
      if (!(nu > 0.0) || !(t_scale > 0.0))
        throw rv::InputError("NoiseLaw: StudentT needs nu > 0, scale > 0");
      break;
    case Kind::LogNormal:
      if (!(ln_sigma > 0.0)) throw rv::InputError("NoiseLaw: LogNormal sigma must be positive");
      break;
    case Kind::Discrete3: {
      if (values.size() != 3 || probs.size() != 3)
        throw rv::InputError("NoiseLaw: Discrete3 needs exactly 3 values and probabilities");
      double s = std::accumulate(probs.begin(), probs.end(), 0.0);
      if (std::abs(s - 1.0) > 1e-12)
        throw rv::InputError("NoiseLaw: Discrete3 probabilities must sum to 1");
      for (double pr : probs)
        if (pr < 0.0) throw rv::InputError("NoiseLaw: Discrete3 probabilities must be >= 0");
      break;
    }
  }
}

double NoiseLaw::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::Pareto:
      return rv::sample(pareto, rng);
    case Kind::Gaussian:
      return sd * rng.gauss();
    case Kind::StudentT:
      return t_scale * rng.student_t(nu);
    case Kind::LogNormal:
      return std::exp(ln_mu + ln_sigma * rng.gauss());
    case Kind::Discrete3: {
      double u = rng.u01();
      if (u <= probs[0]) return values[0];
      if (u <= probs[0] + probs[1]) return values[1];
      return values[2];
    }
  }
  return 0.0;
}

double NoiseLaw::density(double y) const {
  switch (kind) {
    case Kind::Pareto: {
      double mag = std::abs(y);
      if (mag < pareto.x_m) return 0.0;
      double fmag = pareto.alpha * std::pow(pareto.x_m, pareto.alpha) *
                    std::pow(mag, -pareto.alpha - 1.0);
      return (y > 0.0 ? pareto.p : pareto.q) * fmag;
    }
    case Kind::Gaussian:
      return gsl_ran_gaussian_pdf(y, sd);
    case Kind::StudentT:
      return gsl_ran_tdist_pdf(y / t_scale, nu) / t_scale;
    case Kind::LogNormal:
      if (y <= 0.0) return 0.0;
      return gsl_ran_lognormal_pdf(y, ln_mu, ln_sigma);
    case Kind::Discrete3:
      throw rv::InputError("NoiseLaw: Discrete3 has no Lebesgue density");
  }
  return 0.0;
}

double NoiseLaw::abs_tail(double x) const {
  switch (kind) {
    case Kind::Pareto:
      return rv::tail_prob(pareto, x);
    case Kind::Gaussian:
      return 2.0 * gsl_cdf_gaussian_Q(x, sd);
    case Kind::StudentT:
      return 2.0 * gsl_cdf_tdist_Q(x / t_scale, nu);
    case Kind::LogNormal:
      if (x <= 0.0) return 1.0;
      return gsl_cdf_lognormal_Q(x, ln_mu, ln_sigma);
    case Kind::Discrete3: {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        if (std::abs(values[i]) > x) s += probs[i];
      return s;
    }
  }
  return 0.0;
}

double NoiseLaw::quantile(double u) const {
  switch (kind) {
    case Kind::Pareto: {
      // Signed quantile of the two-sided law.
      if (u < pareto.q) {
        double tail_level = u / pareto.q;  // P(X <= -x)/q = tail level
        return -pareto.x_m * std::pow(tail_level, -1.0 / pareto.alpha);
      }
      double upper = 1.0 - u;
      if (upper < pareto.p * 1e-300) upper = pareto.p * 1e-300;
      return pareto.x_m * std::pow(upper / pareto.p, -1.0 / pareto.alpha);
    }
    case Kind::Gaussian:
      return gsl_cdf_gaussian_Pinv(u, sd);
    case Kind::StudentT:
      return t_scale * gsl_cdf_tdist_Pinv(u, nu);
    case Kind::LogNormal:
      return gsl_cdf_lognormal_Pinv(u, ln_mu, ln_sigma);
    case Kind::Discrete3:
      throw rv::InputError("NoiseLaw: Discrete3 quantile not supported");
  }
  return 0.0;
}

double NoiseLaw::mean() const {
  switch (kind) {
    case Kind::Pareto:
      return rv::mean(pareto);
    case Kind::Gaussian:
      return 0.0;
    case Kind::StudentT:
      if (nu <= 1.0) throw rv::InputError("NoiseLaw: StudentT mean undefined for nu <= 1");
      return 0.0;
    case Kind::LogNormal:
      return std::exp(ln_mu + 0.5 * ln_sigma * ln_sigma);
    case Kind::Discrete3:
      return values[0] * probs[0] + values[1] * probs[1] + values[2] * probs[2];
  }
  return 0.0;
}

namespace {
struct MomentParams {
  const NoiseLaw* law;
  double r;
};
double abs_moment_integrand(double y, void* p) {
  auto* mp = static_cast<MomentParams*>(p);
  return std::pow(std::abs(y), mp->r) * mp->law->density(y);
}
}  // namespace

double NoiseLaw::abs_moment(double r) const {
  switch (kind) {
    case Kind::Pareto: {
      if (r >= pareto.alpha)
        throw rv::InputError("NoiseLaw: Pareto abs moment infinite for r >= alpha");
      // E|X|^r = alpha/(alpha-r) x_m^r for exact Pareto magnitude.
      return pareto.alpha / (pareto.alpha - r) * std::pow(pareto.x_m, r);
    }
    case Kind::Discrete3: {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += std::pow(std::abs(values[i]), r) * probs[i];
      return s;
    }
    default: {
      if (kind == Kind::StudentT && r >= nu)
        throw rv::InputError("NoiseLaw: StudentT abs moment infinite for r >= nu");
      MomentParams mp{this, r};
      gsl_function f{&abs_moment_integrand, &mp};
      gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
      double lo = 0.0, err = 0.0;
      gsl_error_handler_t* old = gsl_set_error_handler_off();
      int rc = gsl_integration_qagiu(&f, 0.0, 1e-12, 1e-10, 4096, ws, &lo, &err);
      double neg = 0.0;
      if (rc == GSL_SUCCESS) {
        gsl_function fneg{&abs_moment_integrand, &mp};
        double err2 = 0.0;
        // integrate (-inf, 0] via symmetry-free QAGIL
        rc = gsl_integration_qagil(&fneg, 0.0, 1e-12, 1e-10, 4096, ws, &neg, &err2);
      }
      gsl_set_error_handler(old);
      gsl_integration_workspace_free(ws);
      if (rc != GSL_SUCCESS)
        throw std::runtime_error("NoiseLaw: abs_moment quadrature failed");
      return lo + neg;
    }
  }
}

std::optional<NoiseLaw::RvInfo> NoiseLaw::rv_info() const {
  switch (kind) {
    case Kind::Pareto:
      return RvInfo{pareto.alpha, pareto.p, pareto.q};
    case Kind::StudentT:
      return RvInfo{nu, 0.5, 0.5};
    default:
      return std::nullopt;
  }
}

std::string NoiseLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Pareto:
      os << "pareto(alpha=" << pareto.alpha << ", p=" << pareto.p
         << ", x_m=" << pareto.x_m << ")";
      break;
    case Kind::Gaussian:
      os << "gaussian(sd=" << sd << ")";
      break;
    case Kind::StudentT:
      os << "student_t(nu=" << nu << ", scale=" << t_scale << ")";
      break;
    case Kind::LogNormal:
      os << "lognormal(mu=" << ln_mu << ", sigma=" << ln_sigma << ")";
      break;
    case Kind::Discrete3:
      os << "discrete3";
      break;
  }
  return os.str();
}

}  // namespace ldplab
