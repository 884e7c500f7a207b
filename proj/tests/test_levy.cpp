#include <doctest.h>

#include <vector>

#include "levycb/levy.hpp"
#include "oracles.hpp"

using namespace levycb;

namespace {

std::vector<CharExponent> pi_family_samples() {
  return {
      CharExponent::pi_form(1.0, JumpSpec::none()),
      CharExponent::pi_form(0.04, JumpSpec::none()),
      CharExponent::pi_form(0.0, JumpSpec::compound_poisson_exp(1.0, 2.0)),
      CharExponent::pi_form(0.3, JumpSpec::compound_poisson_exp(0.5, 3.0)),
      CharExponent::pi_form(0.1, JumpSpec::compound_poisson_discrete(
                                     2.0, {{-0.3, 0.25}, {0.1, 0.5}, {0.8, 0.25}})),
      CharExponent::pi_form(0.0, JumpSpec::gamma_process(0.7, 2.5)),
  };
}

}  // namespace

TEST_CASE("eval_exponent: increment of zero") {
  for (const auto& e : pi_family_samples()) CHECK(std::abs(e(Complex(0, 0))) == 0.0);
}

TEST_CASE("eval_exponent: Brownian closed form") {
  // b = -sigma^2/2, c = sigma^2, sigma = 0.2 at z = 1: psi = -0.02 - 0.02i.
  CharExponent e = CharExponent::from_triplet({-0.02, 0.04, JumpSpec::none()});
  Complex v = eval_exponent(e, Complex(1.0, 0.0));
  CHECK(v.real() == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("eval_exponent: compound-poisson-exp on the strip") {
  CharExponent eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  Complex v = eta(Complex(0.0, 0.5));
  CHECK(v.real() == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(std::abs(v.imag()) < 1e-15);
  // Same value from the independent closed form.
  Complex w = oracle::cp_exp_exponent(1.0, 2.0, Complex(0.0, 0.5));
  CHECK(std::abs(v - w) < 1e-15);
}

TEST_CASE("eval_exponent: strip violation names the offending imaginary part") {
  CharExponent eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  CHECK_THROWS_AS((void)eta(Complex(0.0, -3.0)), DomainError);
  try {
    (void)eta(Complex(0.0, -3.0));
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("-3") != std::string::npos);
  }
}

TEST_CASE("pi_exponent: BS form") {
  CharExponent e = pi_exponent(1.0, JumpSpec::none());
  for (double u : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    Complex expect = -0.5 * Complex(u * u, u);
    CHECK(std::abs(e(Complex(u, 0.0)) - expect) < 1e-14);
  }
}

TEST_CASE("pi_exponent: single discrete atom by hand") {
  // c=0, atom (x=1, p=1, rate=1) at u=1: e^{i} - 1 - i(e - 1).
  CharExponent e = pi_exponent(0.0, JumpSpec::compound_poisson_discrete(1.0, {{1.0, 1.0}}));
  Complex expect(std::cos(1.0) - 1.0, std::sin(1.0) - (std::exp(1.0) - 1.0));
  CHECK(std::abs(e(Complex(1.0, 0.0)) - expect) < 1e-14);
}

TEST_CASE("pi_exponent: normalization forces psi(-i) = 0") {
  for (const auto& e : pi_family_samples())
    CHECK(std::abs(e(Complex(0.0, -1.0))) < 1e-14);
}

TEST_CASE("pi_exponent: integrability violation rejected") {
  CHECK_THROWS_AS(pi_exponent(0.0, JumpSpec::compound_poisson_exp(1.0, 0.8)), SpecError);
  CHECK_THROWS_AS(pi_exponent(0.0, JumpSpec::gamma_process(1.0, 0.9)), SpecError);
}

TEST_CASE("pi family: necessary conditions on a real grid") {
  for (const auto& e : pi_family_samples()) {
    for (int k = -40; k <= 40; ++k) {
      double u = 0.25 * k;
      Complex v = e(Complex(u, 0.0));
      CHECK(v.real() <= 1e-12);
    }
    CHECK(martingale_defect(e) < 1e-13);
  }
}

TEST_CASE("martingale_defect: Brownian with and without drift correction") {
  CharExponent no_drift = CharExponent::from_triplet({0.0, 0.04, JumpSpec::none()});
  CHECK(martingale_defect(no_drift) == doctest::Approx(0.02).epsilon(1e-12));
  CharExponent bs = CharExponent::from_triplet({-0.02, 0.04, JumpSpec::none()});
  CHECK(martingale_defect(bs) < 1e-15);
}

TEST_CASE("martingale_defect: real-only domain is unsupported") {
  StripDomain d;
  d.real_only = true;
  CharExponent e = CharExponent::pi_form(1.0, JumpSpec::none()).with_domain(d);
  CHECK_THROWS_AS(martingale_defect(e), DomainError);
}

TEST_CASE("exponent additivity under triplet composition") {
  // Brownian + Brownian.
  CharExponent b1 = CharExponent::from_triplet({-0.02, 0.04, JumpSpec::none()});
  CharExponent b2 = CharExponent::from_triplet({0.01, 0.09, JumpSpec::none()});
  CharExponent bsum = CharExponent::from_triplet({-0.01, 0.13, JumpSpec::none()});
  // cp-exp + cp-exp with common theta composes rates.
  CharExponent j1 = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  CharExponent j2 = CharExponent::subordinator(JumpSpec::compound_poisson_exp(0.5, 2.0));
  CharExponent jsum = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.5, 2.0));
  for (int k = -20; k <= 20; ++k) {
    Complex u(0.5 * k, 0.0);
    CHECK(std::abs(b1(u) + b2(u) - bsum(u)) < 1e-12);
    CHECK(std::abs(j1(u) + j2(u) - jsum(u)) < 1e-12);
  }
}

TEST_CASE("bns_gamma: collapses correctly at u = 0 and delta = 0") {
  CharExponent eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  JointExponent g = bns_gamma(eta, -0.5);
  JointExponent g0 = bns_gamma(eta, 0.0);
  for (double v : {0.0, 0.7, 2.0}) {
    CHECK(std::abs(gamma_eval(g, Complex(0, 0), Complex(v, 0)) - eta(Complex(v, 0))) < 1e-14);
    for (double u : {-1.0, 0.3, 2.0})
      CHECK(std::abs(gamma_eval(g0, Complex(u, 0), Complex(v, 0)) - eta(Complex(v, 0))) <
            1e-14);
  }
}

TEST_CASE("bns_gamma: composed closed forms") {
  // delta = -0.5, eta = cp-exp(1,2): gamma(1,0) = eta(-0.5) - i eta(0.5 i).
  CharExponent eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  JointExponent g = bns_gamma(eta, -0.5);
  Complex expect = oracle::cp_exp_exponent(1.0, 2.0, Complex(-0.5, 0.0)) -
                   Complex(0, 1) * oracle::cp_exp_exponent(1.0, 2.0, Complex(0.0, 0.5));
  CHECK(std::abs(gamma_eval(g, Complex(1, 0), Complex(0, 0)) - expect) < 1e-14);
  CHECK(expect.real() == doctest::Approx(-1.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("bns_gamma: rejects positive delta and non-subordinators") {
  CharExponent eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  CHECK_THROWS_AS(bns_gamma(eta, 0.1), SpecError);
  CharExponent drifted =
      CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0), 0.3);
  CHECK_THROWS_AS(bns_gamma(drifted, -0.5), SpecError);
}

TEST_CASE("bns_gamma: d2 matches a finite difference in v") {
  for (const JumpSpec& spec :
       {JumpSpec::compound_poisson_exp(1.0, 2.0), JumpSpec::gamma_process(0.7, 2.5)}) {
    CharExponent eta = CharExponent::subordinator(spec);
    JointExponent g = bns_gamma(eta, -0.5);
    double h = 1e-5;
    for (double u : {-2.0, 0.0, 1.0, 3.0}) {
      for (Complex v : {Complex(0.0, 0.1), Complex(0.5, 0.2), Complex(-1.0, 1.0)}) {
        Complex fd = (gamma_eval(g, u, v + h) - gamma_eval(g, u, v - h)) / (2.0 * h);
        Complex an = gamma_d2(g, u, v);
        CHECK(std::abs(fd - an) / std::max(1e-12, std::abs(an)) < 1e-6);
      }
    }
  }
}

TEST_CASE("jump spec validation") {
  CHECK_THROWS_AS(JumpSpec::compound_poisson_exp(-1.0, 2.0), SpecError);
  CHECK_THROWS_AS(JumpSpec::compound_poisson_exp(1.0, 0.0), SpecError);
  CHECK_THROWS_AS(JumpSpec::compound_poisson_discrete(1.0, {{0.5, 0.7}}), SpecError);
  CHECK_THROWS_AS(JumpSpec::compound_poisson_discrete(1.0, {{0.0, 1.0}}), SpecError);
  CHECK_THROWS_AS(JumpSpec::gamma_process(0.0, 1.0), SpecError);
  CHECK(JumpSpec::compound_poisson_discrete(1.0, {{-0.5, 0.5}, {0.5, 0.5}}).is_subordinator() ==
        false);
}
