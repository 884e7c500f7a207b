#ifndef LEVYCB_LEVY_HPP
#define LEVYCB_LEVY_HPP

#include <complex>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "levycb/errors.hpp"
#include "levycb/numerics.hpp"

namespace levycb {

// --------------------------------------------------------------------------
// Jump specifications: parametric Levy measures with all the integrals the
// exponent machinery needs in closed form.
// --------------------------------------------------------------------------

struct JumpAtom {
  double size = 0.0;         // nonzero
  double probability = 0.0;  // weights sum to 1
};

struct JumpSpec {
  enum class Kind { None, CompoundPoissonExp, CompoundPoissonDiscrete, Gamma };

  Kind kind = Kind::None;
  double rate = 0.0;   // cp families: jump intensity; gamma: inverse scale
  double theta = 0.0;  // cp-exp: inverse jump scale
  double shape = 0.0;  // gamma: shape per unit time
  std::vector<JumpAtom> atoms;

  static JumpSpec none();
  static JumpSpec compound_poisson_exp(double rate, double theta);
  static JumpSpec compound_poisson_discrete(double rate, std::vector<JumpAtom> atoms);
  static JumpSpec gamma_process(double shape, double rate);

  void validate() const;
  bool has_jumps() const;
  bool is_subordinator() const;  // all jumps positive

  // int (e^{izx} - 1) K(dx) and its z-derivative int i x e^{izx} K(dx).
  Complex exp_integral(Complex z) const;
  Complex exp_integral_derivative(Complex z) const;

  double mean_jump() const;        // int x K(dx)
  double truncated_mean() const;   // int x 1_{|x|<=1} K(dx)
  double exp_compensator() const;  // int (e^x - 1) K(dx); throws if infinite

  // Lower bound for Im z such that exp_integral is finite (exclusive).
  double strip_lower() const;
};

// --------------------------------------------------------------------------
// Triplets and characteristic exponents
// --------------------------------------------------------------------------

// Truncation convention: drift is stated relative to h(x) = x 1_{|x|<=1}.
struct LevyTriplet {
  double drift = 0.0;
  double diffusion = 0.0;  // c >= 0
  JumpSpec jumps;
  void validate() const;
};

struct StripDomain {
  double im_lo = -std::numeric_limits<double>::infinity();  // exclusive
  double im_hi = std::numeric_limits<double>::infinity();
  bool real_only = false;
  bool contains(Complex z) const {
    if (real_only) return z.imag() == 0.0;
    return z.imag() > im_lo && z.imag() < im_hi;
  }
};

// psi(z) = i z b - z^2 c / 2 + int (e^{izx} - 1 - i z h(x)) K(dx),
// evaluable on the declared strip. Immutable after construction.
class CharExponent {
 public:
  CharExponent() = default;

  static CharExponent from_triplet(LevyTriplet t);
  // Normalized form of the martingale class: compensator e^x - 1, psi(-i) = 0.
  static CharExponent pi_form(double diffusion, JumpSpec jumps);
  // h = 0 convention for increasing processes: psi(z) = i z d + int (e^{izx}-1) K.
  static CharExponent subordinator(JumpSpec jumps, double drift_rate = 0.0);

  Complex operator()(Complex z) const;  // eval_exponent
  Complex derivative(Complex z) const;

  const StripDomain& domain() const { return domain_; }
  bool pi_member() const { return pi_member_; }
  bool is_subordinator() const { return subordinator_; }
  double subordinator_drift() const { return sub_drift_; }
  const LevyTriplet& triplet() const { return triplet_; }

  // Declares a restricted domain (testing hook for the real-only error path).
  CharExponent with_domain(StripDomain d) const;

 private:
  LevyTriplet triplet_;
  StripDomain domain_;
  bool pi_member_ = false;
  bool subordinator_ = false;
  double sub_drift_ = 0.0;
};

Complex eval_exponent(const CharExponent& exp, Complex z);

// pi_exponent: the section-Pi normalization; requires int_{x>1} e^x K < inf.
CharExponent pi_exponent(double diffusion, const JumpSpec& jumps);

// |psi(-i)|: zero iff exp(X) is a (local) martingale.
double martingale_defect(const CharExponent& exp);

// --------------------------------------------------------------------------
// Joint exponents gamma(u, v) of (X_parallel, M) on R x (R + i R_+)
// --------------------------------------------------------------------------

struct ZeroGamma {};

// gamma(u,v) = eta(delta u + v) - i u eta(-delta i), eta a pure-jump
// subordinator exponent with finite second moment, delta <= 0.
struct BnsGamma {
  CharExponent eta;
  double delta = 0.0;
  Complex eta_at_minus_delta_i{};  // cached eta(-delta i)
};

// Sanity mode: M Brownian, gamma(u,v) = -v^2/2 (drift condition cross-check).
struct BrownianGamma {};

using JointExponent = std::variant<ZeroGamma, BnsGamma, BrownianGamma>;

BnsGamma bns_gamma(const CharExponent& eta, double delta);

Complex gamma_eval(const JointExponent& g, Complex u, Complex v);
Complex gamma_d2(const JointExponent& g, Complex u, Complex v);
bool gamma_is_zero(const JointExponent& g);

}  // namespace levycb

#endif
