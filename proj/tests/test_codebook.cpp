#include <doctest.h>

#include "levycb/codebook.hpp"
#include "levycb/models.hpp"
#include "levycb/rng.hpp"

using namespace levycb;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.dT = 0.05;
  g.n_mat = 21;  // T up to 1
  g.du = 0.1;
  g.n_half = 40;  // |u| <= 4
  return g;
}

CodebookSurface random_surface(const GridSpec& g, std::uint64_t seed) {
  CodebookSurface s(g);
  RandomStream rng(seed, 0);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k)
      if (k != g.n_half) s.at(j, k) = Complex(rng.normal(), rng.normal());
  return s;
}

}  // namespace

TEST_CASE("integrate_maturity: zero and constant surfaces") {
  GridSpec g = small_grid();
  CodebookSurface zero(g);
  CHECK(std::abs(integrate_maturity(zero, 0.0, 1.0, 1.0)) == 0.0);

  CodebookSurface bs = black_scholes_codebook(0.2, g);
  // Constant in T: integral over [t, T] is (T - t) * psi(u).
  Complex v = integrate_maturity(bs, 0.0, 1.0, 1.0);
  CHECK(v.real() == doctest::Approx(-0.02).epsilon(1e-13));
  CHECK(v.imag() == doctest::Approx(-0.02).epsilon(1e-13));
  Complex w = integrate_maturity(bs, 0.3, 0.8, 2.0);
  CHECK(std::abs(w - 0.5 * bs.at(0, g.freq_index(2.0))) < 1e-13);
}

TEST_CASE("integrate_maturity: range and grid errors") {
  GridSpec g = small_grid();
  CodebookSurface s(g);
  CHECK_THROWS_AS((void)integrate_maturity(s, 0.0, 2.0, 1.0), SpecError);   // beyond grid
  CHECK_THROWS_AS((void)integrate_maturity(s, 0.5, 0.2, 1.0), SpecError);   // T < t
  CHECK_THROWS_AS((void)integrate_maturity(s, 0.0, 1.0, 0.33), SpecError);  // off-grid u
}

TEST_CASE("integrate_maturity: additive in the upper limit") {
  GridSpec g = small_grid();
  CodebookSurface s = random_surface(g, 7);
  for (double u : {-2.0, 0.5, 3.0}) {
    Complex whole = integrate_maturity(s, 0.1, 0.9, u);
    Complex split = integrate_maturity(s, 0.1, 0.45, u) + integrate_maturity(s, 0.45, 0.9, u);
    CHECK(std::abs(whole - split) < 1e-12);
  }
}

TEST_CASE("seminorm: examples and properties") {
  GridSpec g = small_grid();
  CodebookSurface zero(g);
  CHECK(seminorm(zero, 1.0, 4.0) == 0.0);

  CodebookSurface c(g);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k)
      if (k != g.n_half) c.at(j, k) = Complex(3.0, 4.0);
  CHECK(seminorm(c, 0.8, 4.0) == doctest::Approx(0.8 * 5.0).epsilon(1e-12));

  // BS sigma=0.2, T=1, m=1: sup at |u|=1 of |-(u^2+iu)| sigma^2/2 = 0.02 sqrt(2).
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  CHECK(seminorm(bs, 1.0, 1.0) == doctest::Approx(0.02 * std::sqrt(2.0)).epsilon(1e-12));

  // Monotone in T and m.
  CodebookSurface r = random_surface(g, 3);
  CHECK(seminorm(r, 0.5, 2.0) <= seminorm(r, 1.0, 2.0));
  CHECK(seminorm(r, 1.0, 1.0) <= seminorm(r, 1.0, 3.0));
}

TEST_CASE("seminorm: triangle inequality on random surface pairs") {
  GridSpec g = small_grid();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    CodebookSurface a = random_surface(g, 2 * seed);
    CodebookSurface b = random_surface(g, 2 * seed + 1);
    CodebookSurface sum = a;
    for (std::size_t i = 0; i < sum.values().size(); ++i) sum.values()[i] += b.values()[i];
    CHECK(seminorm(sum, 1.0, 4.0) <=
          seminorm(a, 1.0, 4.0) + seminorm(b, 1.0, 4.0) + 1e-12);
  }
}

TEST_CASE("musiela transform: identity at t = 0 and round trip") {
  GridSpec g = small_grid();
  CodebookSurface s = random_surface(g, 11);

  CodebookSurface m0 = to_musiela(s);
  for (std::size_t i = 0; i < s.values().size(); ++i)
    CHECK(m0.values()[i] == s.values()[i]);

  s.set_time(3 * g.dT);
  CodebookSurface shifted = to_musiela(s);
  CodebookSurface back = from_musiela(shifted);
  for (int j = 3; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k) CHECK(back.at(j, k) == s.at(j, k));

  // Constant-in-T surfaces are unchanged.
  CodebookSurface bs = black_scholes_codebook(0.2, g);
  bs.set_time(2 * g.dT);
  CodebookSurface bsm = to_musiela(bs);
  for (std::size_t i = 0; i < bs.values().size(); ++i)
    CHECK(std::abs(bsm.values()[i] - bs.values()[i]) < 1e-15);
}

TEST_CASE("musiela transform: alignment and mode errors") {
  GridSpec g = small_grid();
  CodebookSurface s(g);
  s.set_time(0.5 * g.dT);
  CHECK_THROWS_AS(to_musiela(s), SpecError);
  s.set_time(g.dT);
  CHECK_THROWS_AS(from_musiela(s), SpecError);  // not in musiela mode
}

TEST_CASE("pi_necessary_check: BS passes, positive real part flagged") {
  GridSpec g = small_grid();
  CHECK(pi_necessary_check(black_scholes_codebook(0.2, g), 0.0).pass());
  CHECK(pi_necessary_check(CodebookSurface(g), 0.0).pass());

  CodebookSurface bad(g);
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k)
      if (k != g.n_half) bad.at(j, k) = Complex(1.0, 0.0);
  PiCheckReport rep = pi_necessary_check(bad, 0.0);
  CHECK(!rep.pass());
  // Every pair and every nonzero frequency is flagged.
  std::size_t pairs = static_cast<std::size_t>(g.n_mat) * (g.n_mat - 1) / 2;
  CHECK(rep.total == pairs * (g.n_freq() - 1));
  CHECK(rep.worst > 0.0);
}

TEST_CASE("pi_necessary_check: nonzero u = 0 column flagged") {
  GridSpec g = small_grid();
  CodebookSurface s(g);
  for (int j = 0; j < g.n_mat; ++j) s.at(j, g.n_half) = Complex(0.5, 0.0);
  PiCheckReport rep = pi_necessary_check(s, 0.0);
  CHECK(!rep.pass());
  CHECK(rep.violations.front().kind == PiViolation::Kind::NonzeroAtZero);
}

TEST_CASE("pi_necessary_check: lower time bound restricts the pairs") {
  GridSpec g = small_grid();
  CodebookSurface s(g);
  // Violation only on early rows.
  for (int j = 0; j < 4; ++j) s.at(j, 2) = Complex(1.0, 0.0);
  CHECK(!pi_necessary_check(s, 0.0).pass());
  CHECK(pi_necessary_check(s, 4 * g.dT).pass());
}
