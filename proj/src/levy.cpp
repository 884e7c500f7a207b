#include "levycb/levy.hpp"

#include <cmath>
#include <sstream>

#include "levycb/errors.hpp"

namespace levycb {

namespace {
const Complex kI(0.0, 1.0);

std::string fmt_im(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

// ---------------------------------------------------------------------------
// JumpSpec
// ---------------------------------------------------------------------------

JumpSpec JumpSpec::none() { return JumpSpec{}; }

JumpSpec JumpSpec::compound_poisson_exp(double rate, double theta) {
  JumpSpec s;
  s.kind = Kind::CompoundPoissonExp;
  s.rate = rate;
  s.theta = theta;
  s.validate();
  return s;
}

JumpSpec JumpSpec::compound_poisson_discrete(double rate, std::vector<JumpAtom> atoms) {
  JumpSpec s;
  s.kind = Kind::CompoundPoissonDiscrete;
  s.rate = rate;
  s.atoms = std::move(atoms);
  s.validate();
  return s;
}

JumpSpec JumpSpec::gamma_process(double shape, double rate) {
  JumpSpec s;
  s.kind = Kind::Gamma;
  s.shape = shape;
  s.rate = rate;
  s.validate();
  return s;
}

void JumpSpec::validate() const {
  switch (kind) {
    case Kind::None:
      return;
    case Kind::CompoundPoissonExp:
      if (rate < 0.0) throw SpecError("compound-poisson-exp: rate must be >= 0");
      if (theta <= 0.0) throw SpecError("compound-poisson-exp: theta must be > 0");
      return;
    case Kind::CompoundPoissonDiscrete: {
      if (rate < 0.0) throw SpecError("compound-poisson-discrete: rate must be >= 0");
      if (atoms.empty()) throw SpecError("compound-poisson-discrete: needs atoms");
      double psum = 0.0;
      for (const auto& a : atoms) {
        if (a.size == 0.0) throw SpecError("compound-poisson-discrete: atom size 0");
        if (a.probability <= 0.0) throw SpecError("compound-poisson-discrete: atom probability <= 0");
        psum += a.probability;
      }
      if (std::fabs(psum - 1.0) > 1e-12)
        throw SpecError("compound-poisson-discrete: probabilities must sum to 1");
      return;
    }
    case Kind::Gamma:
      if (shape <= 0.0) throw SpecError("gamma: shape must be > 0");
      if (rate <= 0.0) throw SpecError("gamma: rate must be > 0");
      return;
  }
}

bool JumpSpec::has_jumps() const {
  switch (kind) {
    case Kind::None: return false;
    case Kind::CompoundPoissonExp: return rate > 0.0;
    case Kind::CompoundPoissonDiscrete: return rate > 0.0;
    case Kind::Gamma: return true;
  }
  return false;
}

bool JumpSpec::is_subordinator() const {
  switch (kind) {
    case Kind::None: return true;
    case Kind::CompoundPoissonExp: return true;
    case Kind::CompoundPoissonDiscrete:
      for (const auto& a : atoms)
        if (a.size <= 0.0) return false;
      return true;
    case Kind::Gamma: return true;
  }
  return false;
}

Complex JumpSpec::exp_integral(Complex z) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::CompoundPoissonExp:
      // rate * i z / (theta - i z)
      return rate * (kI * z) / (theta - kI * z);
    case Kind::CompoundPoissonDiscrete: {
      Complex s = 0.0;
      for (const auto& a : atoms) s += a.probability * (std::exp(kI * z * a.size) - 1.0);
      return rate * s;
    }
    case Kind::Gamma:
      // -shape * Log(1 - i z / rate); strip keeps the argument in Re > 0
      return -shape * std::log(1.0 - kI * z / rate);
  }
  return 0.0;
}

Complex JumpSpec::exp_integral_derivative(Complex z) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::CompoundPoissonExp: {
      Complex d = theta - kI * z;
      return rate * kI * theta / (d * d);
    }
    case Kind::CompoundPoissonDiscrete: {
      Complex s = 0.0;
      for (const auto& a : atoms) s += a.probability * kI * a.size * std::exp(kI * z * a.size);
      return rate * s;
    }
    case Kind::Gamma:
      return shape * kI / (rate - kI * z);
  }
  return 0.0;
}

double JumpSpec::mean_jump() const {
  switch (kind) {
    case Kind::None: return 0.0;
    case Kind::CompoundPoissonExp: return rate / theta;
    case Kind::CompoundPoissonDiscrete: {
      double m = 0.0;
      for (const auto& a : atoms) m += a.probability * a.size;
      return rate * m;
    }
    case Kind::Gamma: return shape / rate;
  }
  return 0.0;
}

double JumpSpec::truncated_mean() const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::CompoundPoissonExp:
      // rate * theta * int_0^1 x e^{-theta x} dx
      return rate * (1.0 - (1.0 + theta) * std::exp(-theta)) / theta;
    case Kind::CompoundPoissonDiscrete: {
      double m = 0.0;
      for (const auto& a : atoms)
        if (std::fabs(a.size) <= 1.0) m += a.probability * a.size;
      return rate * m;
    }
    case Kind::Gamma:
      return shape * (1.0 - std::exp(-rate)) / rate;
  }
  return 0.0;
}

double JumpSpec::exp_compensator() const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::CompoundPoissonExp:
      if (theta <= 1.0)
        throw SpecError("compound-poisson-exp: int e^x K(dx) infinite, needs theta > 1");
      return rate / (theta - 1.0);
    case Kind::CompoundPoissonDiscrete: {
      double m = 0.0;
      for (const auto& a : atoms) m += a.probability * (std::exp(a.size) - 1.0);
      return rate * m;
    }
    case Kind::Gamma:
      if (rate <= 1.0)
        throw SpecError("gamma: int e^x K(dx) infinite, needs rate > 1");
      return shape * std::log(rate / (rate - 1.0));
  }
  return 0.0;
}

double JumpSpec::strip_lower() const {
  switch (kind) {
    case Kind::None: return -std::numeric_limits<double>::infinity();
    case Kind::CompoundPoissonExp: return -theta;
    case Kind::CompoundPoissonDiscrete: return -std::numeric_limits<double>::infinity();
    case Kind::Gamma: return -rate;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// LevyTriplet / CharExponent
// ---------------------------------------------------------------------------

void LevyTriplet::validate() const {
  if (diffusion < 0.0) throw SpecError("triplet: diffusion must be >= 0");
  jumps.validate();
}

CharExponent CharExponent::from_triplet(LevyTriplet t) {
  t.validate();
  CharExponent e;
  e.triplet_ = std::move(t);
  e.domain_.im_lo = e.triplet_.jumps.strip_lower();
  return e;
}

CharExponent CharExponent::pi_form(double diffusion, JumpSpec jumps) {
  jumps.validate();
  if (diffusion < 0.0) throw SpecError("pi_form: diffusion must be >= 0");
  double comp = jumps.exp_compensator();  // throws on integrability violation
  LevyTriplet t;
  t.diffusion = diffusion;
  t.drift = -diffusion / 2.0 - comp + jumps.truncated_mean();
  t.jumps = std::move(jumps);
  CharExponent e = from_triplet(std::move(t));
  e.pi_member_ = true;
  return e;
}

CharExponent CharExponent::subordinator(JumpSpec jumps, double drift_rate) {
  jumps.validate();
  if (!jumps.is_subordinator()) throw SpecError("subordinator: jumps must be positive");
  if (drift_rate < 0.0) throw SpecError("subordinator: drift_rate must be >= 0");
  LevyTriplet t;
  t.diffusion = 0.0;
  t.drift = drift_rate + jumps.truncated_mean();
  t.jumps = std::move(jumps);
  CharExponent e = from_triplet(std::move(t));
  e.subordinator_ = true;
  e.sub_drift_ = drift_rate;
  return e;
}

CharExponent CharExponent::with_domain(StripDomain d) const {
  CharExponent e = *this;
  e.domain_ = d;
  return e;
}

Complex CharExponent::operator()(Complex z) const {
  if (!domain_.contains(z)) {
    throw DomainError("eval_exponent: Im(z) = " + fmt_im(z.imag()) +
                      " outside the declared strip");
  }
  const LevyTriplet& t = triplet_;
  Complex v = kI * z * t.drift - 0.5 * z * z * t.diffusion;
  if (t.jumps.has_jumps())
    v += t.jumps.exp_integral(z) - kI * z * t.jumps.truncated_mean();
  return v;
}

Complex CharExponent::derivative(Complex z) const {
  if (!domain_.contains(z))
    throw DomainError("derivative: Im(z) = " + fmt_im(z.imag()) +
                      " outside the declared strip");
  const LevyTriplet& t = triplet_;
  Complex v = kI * t.drift - z * t.diffusion;
  if (t.jumps.has_jumps())
    v += t.jumps.exp_integral_derivative(z) - kI * t.jumps.truncated_mean();
  return v;
}

Complex eval_exponent(const CharExponent& exp, Complex z) { return exp(z); }

CharExponent pi_exponent(double diffusion, const JumpSpec& jumps) {
  return CharExponent::pi_form(diffusion, jumps);
}

double martingale_defect(const CharExponent& exp) {
  if (exp.domain().real_only)
    throw DomainError("martingale_defect: exponent declared real-only, -i not evaluable");
  if (!exp.domain().contains(Complex(0.0, -1.0)))
    throw DomainError("martingale_defect: -i outside the declared strip");
  return std::abs(exp(Complex(0.0, -1.0)));
}

// ---------------------------------------------------------------------------
// Joint exponents
// ---------------------------------------------------------------------------

BnsGamma bns_gamma(const CharExponent& eta, double delta) {
  if (delta > 0.0) throw SpecError("bns_gamma: delta must be <= 0");
  if (!eta.is_subordinator() || eta.triplet().diffusion != 0.0)
    throw SpecError("bns_gamma: eta must be a subordinator exponent");
  if (eta.subordinator_drift() != 0.0)
    throw SpecError("bns_gamma: eta must be pure-jump (no drift)");
  BnsGamma g;
  g.eta = eta;
  g.delta = delta;
  g.eta_at_minus_delta_i = eta(Complex(0.0, -delta));  // -delta i, Im >= 0
  return g;
}

Complex gamma_eval(const JointExponent& g, Complex u, Complex v) {
  return std::visit(
      [&](const auto& m) -> Complex {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ZeroGamma>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, BnsGamma>) {
          return m.eta(m.delta * u + v) - kI * u * m.eta_at_minus_delta_i;
        } else {
          return -0.5 * v * v;
        }
      },
      g);
}

Complex gamma_d2(const JointExponent& g, Complex u, Complex v) {
  return std::visit(
      [&](const auto& m) -> Complex {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ZeroGamma>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, BnsGamma>) {
          return m.eta.derivative(m.delta * u + v);
        } else {
          return -v;
        }
      },
      g);
}

bool gamma_is_zero(const JointExponent& g) {
  return std::holds_alternative<ZeroGamma>(g);
}

}  // namespace levycb
