#include "levycb/codebook.hpp"

#include <algorithm>
#include <cmath>

namespace levycb {

namespace {

// Linear interpolation of row values in T.
Complex row_value(const CodebookSurface& s, double r, int k) {
  const GridSpec& g = s.grid();
  int j = g.maturity_floor(r);
  if (j >= g.n_mat - 1) return s.at(g.n_mat - 1, k);
  double w = (r - g.maturity(j)) / g.dT;
  return (1.0 - w) * s.at(j, k) + w * s.at(j + 1, k);
}

int aligned_shift(const CodebookSurface& s) {
  double r = s.time() / s.grid().dT;
  int shift = static_cast<int>(std::lround(r));
  if (std::fabs(r - shift) > 1e-9)
    throw SpecError("musiela: surface time is not aligned to the maturity grid");
  return shift;
}

}  // namespace

Complex integrate_maturity(const CodebookSurface& s, double t, double T, double u) {
  const GridSpec& g = s.grid();
  int k = g.freq_index(u);
  if (k < 0) throw SpecError("integrate_maturity: u is not a grid frequency");
  if (t < -1e-12 || T < t - 1e-12)
    throw SpecError("integrate_maturity: need 0 <= t <= T");
  if (T > g.max_maturity() + 1e-12)
    throw SpecError("integrate_maturity: T beyond the maturity grid");
  t = std::max(t, 0.0);
  T = std::min(T, g.max_maturity());
  if (T - t <= 1e-15) return Complex(0.0, 0.0);

  Complex acc(0.0, 0.0);
  double a = t;
  Complex va = row_value(s, a, k);
  while (a < T - 1e-15) {
    int j = g.maturity_floor(a + 1e-12);
    double b = std::min(T, g.maturity(j + 1));
    Complex vb = row_value(s, b, k);
    acc += 0.5 * (b - a) * (va + vb);
    a = b;
    va = vb;
  }
  return acc;
}

double seminorm(const CodebookSurface& s, double T, double m) {
  const GridSpec& g = s.grid();
  if (T < 0.0 || T > g.max_maturity() + 1e-12)
    throw SpecError("seminorm: T outside the maturity grid");
  if (m < 0.0 || m > g.max_freq() + 1e-12)
    throw SpecError("seminorm: m outside the frequency grid");
  T = std::min(T, g.max_maturity());
  if (T <= 0.0) return 0.0;

  int km = static_cast<int>(std::floor(m / g.du + 1e-9));
  std::vector<double> rowsup(g.n_mat, 0.0);
  for (int j = 0; j < g.n_mat; ++j) {
    double v = 0.0;
    for (int k = g.n_half - km; k <= g.n_half + km; ++k)
      v = std::max(v, std::abs(s.at(j, k)));
    rowsup[j] = v;
  }
  double acc = 0.0, a = 0.0;
  double va = rowsup[0];
  while (a < T - 1e-15) {
    int j = g.maturity_floor(a + 1e-12);
    double b = std::min(T, g.maturity(j + 1));
    double wb = (b - g.maturity(j)) / g.dT;
    double vb = (j >= g.n_mat - 1) ? rowsup[g.n_mat - 1]
                                   : (1.0 - wb) * rowsup[j] + wb * rowsup[j + 1];
    acc += 0.5 * (b - a) * (va + vb);
    a = b;
    va = vb;
  }
  return acc;
}

CodebookSurface to_musiela(const CodebookSurface& s) {
  if (s.mode() != SurfaceMode::Maturity)
    throw SpecError("to_musiela: surface already in musiela mode");
  int shift = aligned_shift(s);
  const GridSpec& g = s.grid();
  CodebookSurface out(g, s.time(), SurfaceMode::Musiela);
  for (int j = 0; j < g.n_mat; ++j) {
    int src = std::min(j + shift, g.n_mat - 1);
    for (int k = 0; k < g.n_freq(); ++k) out.at(j, k) = s.at(src, k);
  }
  return out;
}

CodebookSurface from_musiela(const CodebookSurface& s) {
  if (s.mode() != SurfaceMode::Musiela)
    throw SpecError("from_musiela: surface is not in musiela mode");
  int shift = aligned_shift(s);
  const GridSpec& g = s.grid();
  CodebookSurface out(g, s.time(), SurfaceMode::Maturity);
  for (int j = 0; j < g.n_mat; ++j) {
    int src = std::max(j - shift, 0);
    for (int k = 0; k < g.n_freq(); ++k) out.at(j, k) = s.at(src, k);
  }
  return out;
}

PiCheckReport pi_necessary_check(const CodebookSurface& s, double t, double tol,
                                 std::size_t max_entries) {
  const GridSpec& g = s.grid();
  PiCheckReport rep;

  // Cumulative integrals from T_0 per frequency; pairs are then differences.
  const int nk = g.n_freq();
  std::vector<Complex> cum(static_cast<std::size_t>(g.n_mat) * nk, Complex(0.0, 0.0));
  for (int j = 1; j < g.n_mat; ++j)
    for (int k = 0; k < nk; ++k)
      cum[static_cast<std::size_t>(j) * nk + k] =
          cum[static_cast<std::size_t>(j - 1) * nk + k] +
          0.5 * g.dT * (s.at(j - 1, k) + s.at(j, k));

  int jt = 0;
  while (jt < g.n_mat && g.maturity(jt) < t - 1e-12) ++jt;

  auto push = [&](PiViolation v, double excess) {
    ++rep.total;
    rep.worst = std::max(rep.worst, excess);
    if (rep.violations.size() < max_entries) rep.violations.push_back(v);
  };

  for (int j1 = jt; j1 < g.n_mat; ++j1) {
    for (int j2 = j1 + 1; j2 < g.n_mat; ++j2) {
      for (int k = 0; k < nk; ++k) {
        Complex v = cum[static_cast<std::size_t>(j2) * nk + k] -
                    cum[static_cast<std::size_t>(j1) * nk + k];
        if (k == g.n_half) {
          if (std::abs(v) > tol)
            push({g.maturity(j1), g.maturity(j2), 0.0, std::abs(v),
                  PiViolation::Kind::NonzeroAtZero},
                 std::abs(v) - tol);
        } else if (v.real() > tol) {
          push({g.maturity(j1), g.maturity(j2), g.freq(k), v.real(),
                PiViolation::Kind::PositiveReal},
               v.real() - tol);
        }
      }
    }
  }
  return rep;
}

}  // namespace levycb
