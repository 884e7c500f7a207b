#include <doctest.h>

#include "levycb/models.hpp"
#include "levycb/pricing.hpp"
#include "oracles.hpp"

using namespace levycb;

namespace {

Cumulant bs_cumulant(double sigma, double tau) {
  double s2 = sigma * sigma;
  return [s2, tau](Complex z) { return -0.5 * (z * z + Complex(0, 1) * z) * s2 * tau; };
}

GridSpec pricing_grid() {
  GridSpec g;
  g.dT = 0.05;
  g.n_mat = 21;  // T up to 1
  g.du = 0.05;
  g.n_half = 800;  // |u| <= 40
  return g;
}

std::vector<double> log_spaced_strikes(double lo, double hi, int n, double spot) {
  std::vector<double> ks;
  for (int i = 0; i < n; ++i)
    ks.push_back(spot * std::exp(std::log(lo) + i * (std::log(hi) - std::log(lo)) / (n - 1)));
  return ks;
}

}  // namespace

TEST_CASE("price_from_cumulant: zero cumulant gives intrinsic prices") {
  Cumulant cum = [](Complex) { return Complex(0.0, 0.0); };
  std::vector<double> ks = {0.5, 0.9, 1.0, 1.3, 2.0};
  std::vector<double> calls = price_from_cumulant(cum, 1.0, ks, 0.0);
  for (std::size_t i = 0; i < ks.size(); ++i)
    CHECK(calls[i] == doctest::Approx(std::max(1.0 - ks[i], 0.0)).epsilon(1e-14));
}

TEST_CASE("price_from_cumulant: Black-Scholes oracle across strikes and maturities") {
  for (double tau : {0.25, 1.0, 2.0}) {
    std::vector<double> ks = log_spaced_strikes(0.5, 2.0, 21, 1.0);
    std::vector<double> calls = price_from_cumulant(bs_cumulant(0.2, tau), 1.0, ks, tau);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double ref = oracle::bs_call(1.0, ks[i], 0.2, tau);
      CHECK(std::fabs(calls[i] - ref) <= std::max(1e-6 * ref, 1e-9));
    }
  }
}

TEST_CASE("price_from_cumulant: ATM modified value") {
  // sigma = 0.2, tau = 1, x = 0: O = 2 Phi(0.1) - 1.
  std::vector<double> calls = price_from_cumulant(bs_cumulant(0.2, 1.0), 1.0, {1.0}, 1.0);
  double expect = 2.0 * oracle::norm_cdf(0.1) - 1.0;
  CHECK(calls[0] == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("price_from_cumulant: parity by construction") {
  std::vector<double> ks = log_spaced_strikes(0.5, 2.0, 15, 1.0);
  std::vector<double> calls = price_from_cumulant(bs_cumulant(0.3, 0.7), 1.0, ks, 0.7);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double put = calls[i] - 1.0 + ks[i];
    CHECK(put >= -1e-12);
    CHECK(put <= ks[i] + 1e-12);
  }
}

TEST_CASE("price_from_cumulant: resolution convergence") {
  std::vector<double> ks = log_spaced_strikes(0.5, 2.0, 9, 1.0);
  PricingConfig fine;
  fine.damped_du = 0.0125;
  fine.damped_u0 = 80.0;
  std::vector<double> base = price_from_cumulant(bs_cumulant(0.2, 1.0), 1.0, ks, 1.0);
  std::vector<double> ref = price_from_cumulant(bs_cumulant(0.2, 1.0), 1.0, ks, 1.0, fine);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(std::fabs(base[i] - ref[i]) < 1e-7);
}

TEST_CASE("modified slice: tail decays at the x-edges for a wide BS grid") {
  std::vector<double> xs;
  for (int i = -250; i <= 250; ++i) xs.push_back(0.01 * i);
  ModifiedPriceSlice o = modified_from_cumulant(bs_cumulant(0.2, 1.0), 0.0, 1.0, xs);
  CHECK(std::fabs(o.value.front()) < 1e-4);
  CHECK(std::fabs(o.value.back()) < 1e-4);
  // Pointwise agreement with the oracle.
  for (std::size_t i = 0; i < xs.size(); i += 25)
    CHECK(std::fabs(o.value[i] - oracle::bs_modified(xs[i], 0.2, 1.0)) < 1e-9);
}

TEST_CASE("codebook_to_modified: grid route matches the BS oracle") {
  GridSpec g = pricing_grid();
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  for (double T : {0.05, 0.25, 1.0}) {
    ModifiedPriceSlice o = codebook_to_modified(bs, 0.0, T);
    for (std::size_t i = 0; i < o.x.size(); i += 10) {
      double ref = oracle::bs_modified(o.x[i], 0.2, T);
      CHECK(std::fabs(o.value[i] - ref) < 2e-7);
    }
  }
}

TEST_CASE("codebook_to_modified: T = t gives the zero slice") {
  GridSpec g = pricing_grid();
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  ModifiedPriceSlice o = codebook_to_modified(bs, 0.0, 0.0);
  for (double v : o.value) CHECK(v == 0.0);
}

TEST_CASE("codebook_to_modified: refuses surfaces failing the necessary check") {
  GridSpec g = pricing_grid();
  CodebookSurface bad(g);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k)
      if (k != g.n_half) bad.at(j, k) = Complex(0.5, 0.0);
  CHECK_THROWS_AS(codebook_to_modified(bad, 0.0, 1.0), SpecError);
}

TEST_CASE("transform consistency: forward transform reproduces the damped cumulant data") {
  GridSpec g = pricing_grid();
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  double T = 0.5;
  ModifiedPriceSlice o = codebook_to_modified(bs, 0.0, T);
  for (double u : {0.5, 2.0, 5.0, 10.0, 20.0}) {
    Complex F = modified_forward_transform(o, u);
    Complex cum = integrate_maturity(bs, 0.0, T, u);
    Complex expect = (1.0 - std::exp(cum)) / Complex(u * u, u);
    CHECK(std::abs(F - expect) < 1e-6);
  }
}

TEST_CASE("modified_to_calls: zero slice gives intrinsic and K->0 limit recovers S") {
  ModifiedPriceSlice o;
  o.maturity = 1.0;
  for (int i = -200; i <= 200; ++i) {
    o.x.push_back(0.01 * i);
    o.value.push_back(0.0);
  }
  std::vector<double> ks = {0.14, 0.5, 1.0, 1.5, 7.0};
  std::vector<double> calls = modified_to_calls(o, 1.0, ks);
  for (std::size_t i = 0; i < ks.size(); ++i)
    CHECK(calls[i] == doctest::Approx(std::max(1.0 - ks[i], 0.0)).epsilon(1e-14));
  CHECK(calls[0] == doctest::Approx(1.0 - 0.14));  // K -> 0: C -> S

  CHECK_THROWS_AS(modified_to_calls(o, 1.0, {10.0}), SpecError);  // outside range
}

TEST_CASE("modified_to_calls: BS oracle through interpolation") {
  std::vector<double> xs;
  for (int i = -220; i <= 220; ++i) xs.push_back(0.01 * i);
  ModifiedPriceSlice o = modified_from_cumulant(bs_cumulant(0.2, 1.0), 0.0, 1.0, xs);
  std::vector<double> ks = log_spaced_strikes(0.53, 1.93, 17, 1.0);  // off-node strikes
  std::vector<double> calls = modified_to_calls(o, 1.0, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double ref = oracle::bs_call(1.0, ks[i], 0.2, 1.0);
    // Monotone-cubic interpolation limits the order near the peak.
    CHECK(std::fabs(calls[i] - ref) < 1e-6);
    // Parity bounds by construction: 0 <= C - S + K <= K.
    CHECK(calls[i] - 1.0 + ks[i] >= -1e-12);
    CHECK(calls[i] - 1.0 + ks[i] <= ks[i] + 1e-12);
  }
}

TEST_CASE("surface_to_codebook: flat zero-vol surface recovers the zero codebook") {
  PriceSurface p;
  p.spot = 1.0;
  for (int i = -150; i <= 150; ++i) p.strikes.push_back(std::exp(0.01 * i));
  p.maturities = {0.0, 0.1, 0.2, 0.3};
  p.call.resize(p.strikes.size() * p.maturities.size());
  for (std::size_t jt = 0; jt < p.maturities.size(); ++jt)
    for (std::size_t jk = 0; jk < p.strikes.size(); ++jk)
      p.at(jt, jk) = std::max(1.0 - p.strikes[jk], 0.0);
  CodebookRecovery rec = surface_to_codebook_detailed(p, 100, 0.1);
  CHECK(rec.n_recovered > 0);
  for (int j = 0; j < rec.psi.grid().n_mat; ++j)
    for (int k = 0; k < rec.psi.grid().n_freq(); ++k)
      if (rec.cell_ok(j, k)) CHECK(std::abs(rec.psi.at(j, k)) < 1e-10);
}

TEST_CASE("surface_to_codebook: single maturity rejected") {
  PriceSurface p;
  p.spot = 1.0;
  p.strikes = {0.9, 1.0, 1.1};
  p.maturities = {1.0};
  p.call = {0.15, 0.08, 0.04};
  CHECK_THROWS_AS(surface_to_codebook(p), SpecError);
}

TEST_CASE("surface_to_codebook: negative time value is a data error") {
  PriceSurface p;
  p.spot = 1.0;
  for (int i = -10; i <= 10; ++i) p.strikes.push_back(std::exp(0.05 * i));
  p.maturities = {0.1, 0.2, 0.3};
  p.call.resize(p.strikes.size() * p.maturities.size());
  for (std::size_t jt = 0; jt < p.maturities.size(); ++jt)
    for (std::size_t jk = 0; jk < p.strikes.size(); ++jk) {
      double intrinsic = std::max(1.0 - p.strikes[jk], 0.0);
      p.at(jt, jk) = intrinsic;
    }
  // One call strictly below intrinsic-plus-zero time value.
  p.at(1, 4) -= 1e-5;
  CHECK_THROWS_AS(surface_to_codebook(p), SpecError);
}

TEST_CASE("round trip: BS codebook to prices and back on the default-density grid") {
  GridSpec g = pricing_grid();
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  PricingConfig pc;
  pc.skip_pi_check = true;

  double spot = 1.0;
  std::vector<double> strikes;
  for (int i = -200; i <= 200; ++i) strikes.push_back(spot * std::exp(0.01 * i));
  PriceSurface p;
  p.spot = spot;
  p.strikes = strikes;
  for (int j = 0; j < g.n_mat; ++j) p.maturities.push_back(g.maturity(j));
  p.call.resize(strikes.size() * p.maturities.size());
  for (int j = 0; j < g.n_mat; ++j) {
    if (j == 0) {
      for (std::size_t jk = 0; jk < strikes.size(); ++jk)
        p.at(j, jk) = std::max(spot - strikes[jk], 0.0);
      continue;
    }
    ModifiedPriceSlice o = codebook_to_modified(bs, 0.0, g.maturity(j), pc);
    std::vector<double> row = modified_to_calls(o, spot, strikes, pc);
    for (std::size_t jk = 0; jk < strikes.size(); ++jk) p.at(j, jk) = row[jk];
  }

  CodebookRecovery rec = surface_to_codebook_detailed(p, g.n_half, g.du, pc);
  double max_err = 0.0;
  std::size_t n = 0;
  for (int j = 1; j < g.n_mat - 1; ++j)
    for (int k = 0; k < g.n_freq(); ++k) {
      if (!rec.cell_ok(j, k)) continue;
      max_err = std::max(max_err, std::abs(rec.psi.at(j, k) - bs.at(j, k)));
      ++n;
    }
  CHECK(n > 1000);
  CHECK(max_err < 1e-3);
}

TEST_CASE("modified_from_cumulant: evaluation failure on the damped line") {
  Cumulant bad = [](Complex) { return Complex(std::nan(""), 0.0); };
  std::vector<double> xs = {-0.5, 0.0, 0.5};
  CHECK_THROWS_AS(modified_from_cumulant(bad, 0.0, 1.0, xs), NumericalError);
}

TEST_CASE("modified_from_cumulant: unresolved tail is refused with a bound") {
  // Pure oscillation never decays on the damped line.
  Cumulant osc = [](Complex z) { return Complex(0.0, 1.0) * z * 0.3; };
  std::vector<double> xs = {-0.5, 0.0, 0.5};
  PricingConfig pc;
  pc.damped_u_max = 200.0;
  CHECK_THROWS_AS(modified_from_cumulant(osc, 0.0, 1.0, xs, pc), NumericalError);
}

TEST_CASE("price surface bounds validation") {
  PriceSurface p;
  p.spot = 1.0;
  p.strikes = {0.9, 1.0};
  p.maturities = {0.5};
  p.call = {0.2, 1.2};  // above spot
  CHECK_THROWS_AS(p.validate(), SpecError);
}
