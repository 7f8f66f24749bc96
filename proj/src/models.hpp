#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noise.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace ldplab::models {

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { IID, MA, AR1, SRE_AFFINE, SRE_MAX, LETAC, SV, GARCH11 };

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& name);

// Tagged union over the model zoo.  `noise` is the innovation law (B for
// recursions, Z for volatility models); A/C/D laws apply to the SRE family.
struct ModelSpec {
  Kind kind = Kind::IID;
  NoiseLaw noise;

  std::vector<double> theta;  // MA: theta_1..theta_m0 (theta_0 = 1 implicit)
  double phi = 0.0;           // AR1

  NoiseLaw a_law;             // SRE_AFFINE / SRE_MAX / LETAC: law of A >= 0
  NoiseLaw c_law;             // LETAC: law of C
  NoiseLaw d_law;             // LETAC: law of D

  double sv_a = 0.0;          // SV log-volatility AR(1) coefficient
  double sv_eta_sd = 1.0;     // SV log-volatility innovation sd

  double garch_a0 = 1e-5;     // GARCH(1,1) alpha_0
  double garch_a1 = 0.1;      // alpha_1
  double garch_b1 = 0.8;      // beta_1

  // Tail index of X.  For the Kesten family it must solve the moment
  // equation (certified at validate() to 1e-6); elsewhere it is derived
  // from the noise law.
  double declared_alpha = 0.0;

  // Checks invariants, certifies Kesten roots, fills declared_alpha.
  void validate();

  double tail_index() const { return declared_alpha; }
  bool centered() const { return declared_alpha > 1.0; }
  bool is_kesten() const {
    return kind == Kind::SRE_AFFINE || kind == Kind::SRE_MAX ||
           kind == Kind::LETAC || kind == Kind::GARCH11;
  }
  std::string describe() const;
};

// One simulated stationary trajectory plus its RNG provenance.
struct SamplePath {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  int burn_in_used = 0;
};

// Stateful stepper: initialize from the stationary law, then advance one
// observation at a time.  Values are uncentered.
class Simulator {
 public:
  explicit Simulator(const ModelSpec& spec);
  // Draws the initial state from the stationary law; returns the number of
  // backward/burn-in terms consumed.
  int init_stationary(RngStream& rng);
  double step(RngStream& rng);
  std::vector<double> state() const;
  void set_state(const std::vector<double>& s);

 private:
  ModelSpec spec_;
  double x_ = 0.0;                // scalar state (AR1/SRE/LETAC x, SV log-vol,
                                  // GARCH sigma^2)
  std::vector<double> ma_ring_;   // MA: last m0 innovations, most recent first
};

SamplePath simulate(const ModelSpec& model, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream_id);

struct TailValue {
  double value = 0.0;
  double band = 0.0;  // error band (asymptotic slack or MC CI)
};

// P(|X| > x): exact for IID, closed asymptotic form for MA/AR1/SV,
// Goldie-constant Monte Carlo form for the Kesten family.  Refuses x below
// the calibrated regime threshold.
TailValue marginal_tail(const ModelSpec& model, double x);
double regime_threshold(const ModelSpec& model);

// Stationary mean of X with provenance (closed form or long-run average).
struct MeanInfo {
  double value = 0.0;
  double ci_halfwidth = 0.0;
  bool closed_form = true;
};
MeanInfo stationary_mean(const ModelSpec& model);

// Right/left split of the marginal tail: limits of P(X>x)/P(|X|>x) and
// P(X<=-x)/P(|X|>x).
struct TailBalance {
  double p = 0.5, q = 0.5;
};
TailBalance marginal_balance(const ModelSpec& model);

// Goldie constant c_inf+ for a generic affine-dominated recursion, via MC of
// Goldie's formula with stationary initial draws (also used by theory).
stats::Estimate goldie_c_plus_impl(const ModelSpec& model, std::size_t reps,
                                   bool positive_tail);

// Solves E A^kappa = 1 for the declared alpha of an SRE model (closed form
// for lognormal A) and E(a1 Z^2 + b1)^{alpha/2} = 1 for GARCH.
double kesten_root_sre(const NoiseLaw& a_law);
double kesten_root_garch(double a1, double b1, const NoiseLaw& z_law);

// E A^kappa for the A-law of an SRE model (closed form or quadrature).
double a_moment(const NoiseLaw& a_law, double kappa);

}  // namespace ldplab::models
