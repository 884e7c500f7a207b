#include <doctest.h>

#include "levycb/models.hpp"
#include "levycb/validation.hpp"
#include "oracles.hpp"

using namespace levycb;

namespace {

GridSpec coarse_grid() {
  GridSpec g;
  g.dT = 0.05;
  g.n_mat = 21;
  g.du = 0.25;
  g.n_half = 40;
  return g;
}

BnsParams preset_bns() {
  BnsParams p;
  p.lambda = 1.0;
  p.delta = -0.5;
  p.eta = CharExponent::subordinator(JumpSpec::compound_poisson_exp(1.0, 2.0));
  p.psiL = CharExponent::pi_form(0.01, JumpSpec::none());
  p.x0 = 0.0;
  return p;
}

}  // namespace

TEST_CASE("black_scholes_codebook: values and normalization") {
  GridSpec g = coarse_grid();
  CodebookSurface s = black_scholes_codebook(0.2, g);
  int k1 = g.freq_index(1.0);
  for (int j = 0; j < g.n_mat; ++j) {
    CHECK(std::abs(s.at(j, k1) - Complex(-0.02, -0.02)) < 1e-15);
    CHECK(s.at(j, g.n_half) == Complex(0.0, 0.0));
  }
  CHECK(martingale_defect(CharExponent::pi_form(0.04, JumpSpec::none())) < 1e-15);
  CHECK_THROWS_AS(black_scholes_codebook(0.0, g), SpecError);
}

TEST_CASE("min_compatible_codebook: degenerate cases") {
  GridSpec g = coarse_grid();
  // gamma = 0: the minimal codebook vanishes.
  CodebookSurface mu0 = min_compatible_codebook(ExpKernel{bns_phi(), 1.0}, ZeroGamma{}, g);
  for (const Complex& v : mu0.values()) CHECK(v == Complex(0.0, 0.0));

  // zero kernel: mu(T, u) = gamma(u, 0).
  BnsParams p = preset_bns();
  JointExponent gm = bns_gamma(p.eta, p.delta);
  CodebookSurface muz = min_compatible_codebook(ZeroKernel{}, gm, g);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k) {
      if (k == g.n_half) continue;
      Complex expect = gamma_eval(gm, Complex(g.freq(k), 0.0), Complex(0.0, 0.0));
      CHECK(std::abs(muz.at(j, k) - expect) < 1e-14);
    }

  CHECK_THROWS_AS(
      min_compatible_codebook(StateKernel{[](double, const CodebookSurface&, double, double) {
                                return Complex(0, 0);
                              }},
                              gm, g),
      SpecError);
}

TEST_CASE("min_compatible_codebook: affine kernel closed form and membership") {
  GridSpec g = coarse_grid();
  BnsParams p = preset_bns();
  JointExponent gm = bns_gamma(p.eta, p.delta);
  CodebookSurface mu = min_compatible_codebook(ExpKernel{bns_phi(), p.lambda}, gm, g);
  // mu(T, u) = eta(delta u - i phi(u)(1 - e^{-lambda T})/lambda) - i u eta(-delta i).
  Complex eta_di = p.eta(Complex(0.0, 0.5));
  for (int j = 0; j < g.n_mat; j += 5)
    for (int k = 0; k < g.n_freq(); k += 7) {
      if (k == g.n_half) continue;
      double T = g.maturity(j), u = g.freq(k);
      Complex phi = -0.5 * Complex(u * u, u);
      Complex expect =
          p.eta(p.delta * u - Complex(0, 1) * phi * (1.0 - std::exp(-p.lambda * T)) / p.lambda) -
          Complex(0, 1) * u * eta_di;
      CHECK(std::abs(mu.at(j, k) - expect) < 1e-13);
      // Same thing as the initial-codebook formula with the psiL part removed.
      CHECK(std::abs(mu.at(j, k) -
                     (bns_psi0(p, T, Complex(u, 0.0)) - p.psiL(Complex(u, 0.0)))) < 1e-13);
    }
  // The minimal codebook is itself admissible in the necessary sense.
  CHECK(pi_necessary_check(mu, 0.0).pass());
}

TEST_CASE("bns_blocks: degenerate and limiting behaviour") {
  GridSpec g = coarse_grid();

  // delta = 0 and no jumps reduce to the plain initial exponent.
  BnsParams p0 = preset_bns();
  p0.delta = 0.0;
  p0.eta = CharExponent::subordinator(JumpSpec::none());
  BuildingBlocks b0 = bns_blocks(p0, g);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k) {
      if (k == g.n_half) continue;
      CHECK(std::abs(b0.psi0.at(j, k) - p0.psiL(Complex(g.freq(k), 0.0))) < 1e-14);
    }

  // Large mean reversion: psi0 -> psiL + eta(delta u) - i u eta(-delta i).
  BnsParams pl = preset_bns();
  pl.lambda = 1e4;
  BuildingBlocks bl = bns_blocks(pl, g);
  Complex eta_di = pl.eta(Complex(0.0, 0.5));
  for (int k = 0; k < g.n_freq(); k += 5) {
    if (k == g.n_half) continue;
    double u = g.freq(k);
    int j = g.n_mat / 2;  // T bounded away from 0
    Complex limit = pl.psiL(Complex(u, 0.0)) + pl.eta(Complex(pl.delta * u, 0.0)) -
                    Complex(0, 1) * u * eta_di;
    CHECK(std::abs(bl.psi0.at(j, k) - limit) < 1e-3);
  }

  // u = 0 column of the initial codebook vanishes.
  BuildingBlocks b = bns_blocks(preset_bns(), g);
  for (int j = 0; j < g.n_mat; ++j) CHECK(b.psi0.at(j, g.n_half) == Complex(0.0, 0.0));
}

TEST_CASE("bns_closed_codebook: base cases") {
  GridSpec g = coarse_grid();
  BnsParams p = preset_bns();
  BuildingBlocks b = bns_blocks(p, g);
  CodebookSurface s0 = bns_closed_codebook(p, g, 0.0, 0.0);
  for (std::size_t i = 0; i < s0.values().size(); ++i)
    CHECK(std::abs(s0.values()[i] - b.psi0.values()[i]) < 1e-13);
  CHECK_THROWS_AS(bns_closed_codebook(p, g, 0.0, -1.0), SpecError);
  CodebookSurface st = bns_closed_codebook(p, g, 0.4, 0.7);
  for (int j = 0; j < g.n_mat; ++j) CHECK(st.at(j, g.n_half) == Complex(0.0, 0.0));
}

TEST_CASE("bns consistency: the diagonal equals the analytic local exponent") {
  GridSpec g = coarse_grid();
  BnsParams p = preset_bns();
  SubordinatorPath path = simulate_subordinator(p.eta.triplet().jumps, 1.0, 3);
  Complex eta_di = p.eta(Complex(0.0, 0.5));
  for (double t : {0.25, 0.5, 0.9}) {
    double z = bns_variance_factor(path, p.lambda, t);
    for (double u : {-5.0, -1.0, 0.5, 3.0}) {
      Complex diag = bns_closed_value(p, t, z, t, Complex(u, 0.0));
      Complex phi = -0.5 * Complex(u * u, u);
      Complex local = p.psiL(Complex(u, 0.0)) + phi * z +
                      p.eta(Complex(p.delta * u, 0.0)) - Complex(0, 1) * u * eta_di;
      CHECK(std::abs(diag - local) < 1e-10);
    }
  }
}

TEST_CASE("drift identity: d/dT of -gamma(u, -i int b) matches the drift field") {
  GridSpec g = coarse_grid();
  BnsParams p = preset_bns();
  BuildingBlocks b = bns_blocks(p, g);
  JointExponent gm = b.gamma;
  double t = 0.3;
  CodebookSurface a = drift_a(b, t, b.psi0);
  double h = 1e-5;
  for (int j = 8; j < g.n_mat; j += 3) {
    double T = g.maturity(j);
    for (int k = 0; k < g.n_freq(); k += 6) {
      if (k == g.n_half) continue;
      double u = g.freq(k);
      auto gofT = [&](double TT) {
        Complex B = kernel_integral(b.vol, t, TT, u, nullptr);
        return gamma_eval(gm, Complex(u, 0.0), Complex(0, -1) * B);
      };
      Complex fd = -(gofT(T + h) - gofT(T - h)) / (2.0 * h);
      CHECK(std::abs(fd - a.at(j, k)) / std::max(1e-12, std::abs(a.at(j, k))) < 1e-6);
    }
  }
}

TEST_CASE("musiela transport identity along the drift flow") {
  // On a jump-free path the codebook moves by pure drift; in time-to-maturity
  // coordinates d/dt Psi-check = a-check + d/dx Psi-check.
  GridSpec g;
  g.dT = 0.005;
  g.n_mat = 201;
  g.du = 0.25;
  g.n_half = 20;
  BnsParams p = preset_bns();
  BuildingBlocks b = bns_blocks(p, g);
  double t = 0.2;  // grid-aligned
  CodebookSurface now = bns_closed_codebook(p, g, t, 0.0);
  CodebookSurface fwd = bns_closed_codebook(p, g, t + g.dT, 0.0);
  CodebookSurface bwd = bns_closed_codebook(p, g, t - g.dT, 0.0);
  now.set_time(t);
  fwd.set_time(t + g.dT);
  bwd.set_time(t - g.dT);
  CodebookSurface mnow = to_musiela(now), mfwd = to_musiela(fwd), mbwd = to_musiela(bwd);
  CodebookSurface a = drift_a(b, t, now);
  for (int j = 2; j < g.n_mat - 4; j += 5) {
    double x = g.maturity(j);
    for (int k = 0; k < g.n_freq(); k += 4) {
      if (k == g.n_half) continue;
      Complex dt = (mfwd.at(j, k) - mbwd.at(j, k)) / (2.0 * g.dT);
      Complex dx = (mnow.at(j + 1, k) - mnow.at(j - 1, k)) / (2.0 * g.dT);
      // a-check(x, u) = a(t)(t + x, u).
      int ja = g.maturity_floor(t + x);
      Complex expect = a.at(ja, k) + dx;
      CHECK(std::abs(dt - expect) < 2e-3 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("affine blocks: admissible initial codebook and matching driver") {
  GridSpec g = coarse_grid();
  BnsParams p = preset_bns();
  BuildingBlocks b =
      affine_blocks(ExpKernel{bns_phi(), p.lambda}, p.eta, p.delta, p.psiL, 0.0, g);
  CHECK(pi_necessary_check(b.psi0, 0.0).pass());
  BuildingBlocks bref = bns_blocks(p, g);
  for (std::size_t i = 0; i < b.psi0.values().size(); ++i)
    CHECK(std::abs(b.psi0.values()[i] - bref.psi0.values()[i]) < 1e-12);
}
