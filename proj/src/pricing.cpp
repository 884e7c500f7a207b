#include "levycb/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levycb/threads.hpp"

namespace levycb {

namespace {

const Complex kI(0.0, 1.0);

std::string loc(double T, double u) {
  std::ostringstream os;
  os << "(T=" << T << ", u=" << u << ")";
  return os.str();
}

// e^{alpha x} 1_{x<0} + e^{-(1-alpha) x} 1_{x>0}; the closed-form transform of
// -1/((alpha+iu)^2 - (alpha+iu)). Continuous, value 1 at x = 0.
double damped_const_term(double x, double alpha) {
  return x < 0.0 ? std::exp(alpha * x) : std::exp(-(1.0 - alpha) * x);
}

// f0(x) = inverse transform of 1/(u^2+iu): e^{-x} - 1/2 for x > 0, 1/2 else.
double f0_term(double x) { return x > 0.0 ? std::exp(-x) - 0.5 : 0.5; }

struct XGrid {
  std::vector<double> xs;
  int zero_index = 0;
};

XGrid make_x_grid(double half_width, double dx) {
  int n = static_cast<int>(std::ceil(half_width / dx));
  XGrid g;
  g.xs.resize(2 * n + 1);
  for (int i = 0; i <= 2 * n; ++i) g.xs[i] = (i - n) * dx;
  g.zero_index = n;
  return g;
}

void clip_slice(ModifiedPriceSlice& o, const PricingConfig& cfg) {
  double pos = 0.0;
  for (double& v : o.value) {
    if (v < 0.0) {
      o.clipped_mass += -v;
      ++o.clipped_count;
      v = 0.0;
    } else {
      pos += v;
    }
  }
  if (o.clipped_mass > cfg.clip_fail_fraction * std::max(pos, 1e-300))
    throw NumericalError("modified prices: clipped negative mass exceeds " +
                         std::to_string(cfg.clip_fail_fraction) + " of the slice");
}

void check_edge_decay(const ModifiedPriceSlice& o, const PricingConfig& cfg) {
  if (o.value.empty()) return;
  double edge = std::max(std::fabs(o.value.front()), std::fabs(o.value.back()));
  if (edge > cfg.o_decay_tol)
    throw NumericalError("modified prices: value " + std::to_string(edge) +
                         " at the x-edge exceeds the decay tolerance");
}

// Quadratic tail model fitted to the last grid cells of a cumulant ray:
// c(u) ~ -(a u^2 + dr) - i (b u + di). Least squares on {u^2, 1} and {u, 1}.
struct TailFit {
  double a = 0.0, dr = 0.0, b = 0.0, di = 0.0;
  bool valid = false;
  Complex operator()(double u) const {
    return Complex(-(a * u * u + dr), -(b * u + di));
  }
};

TailFit fit_tail(const std::vector<double>& us, const std::vector<Complex>& cs) {
  TailFit f;
  std::size_t n = us.size();
  if (n < 3) return f;
  double s0 = 0, s2 = 0, s4 = 0, sr = 0, sr2 = 0;
  double s1 = 0, si = 0, si1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double u2 = us[i] * us[i];
    s0 += 1.0; s2 += u2; s4 += u2 * u2;
    sr += -cs[i].real(); sr2 += -cs[i].real() * u2;
    s1 += us[i]; si += -cs[i].imag(); si1 += -cs[i].imag() * us[i];
  }
  double det_re = s4 * s0 - s2 * s2;
  double det_im = s2 * s0 - s1 * s1;
  if (std::fabs(det_re) < 1e-30 || std::fabs(det_im) < 1e-30) return f;
  f.a = (sr2 * s0 - sr * s2) / det_re;
  f.dr = (sr * s4 - sr2 * s2) / det_re;
  f.b = (si1 * s0 - si * s1) / det_im;
  f.di = (si * s2 - si1 * s1) / det_im;
  f.valid = true;
  return f;
}

}  // namespace

void PriceSurface::validate() const {
  if (spot <= 0.0) throw SpecError("price surface: spot must be > 0");
  if (strikes.empty() || maturities.empty())
    throw SpecError("price surface: empty grids");
  if (call.size() != strikes.size() * maturities.size())
    throw SpecError("price surface: value count mismatch");
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    if (strikes[i] <= 0.0) throw SpecError("price surface: strikes must be > 0");
    if (i > 0 && strikes[i] <= strikes[i - 1])
      throw SpecError("price surface: strikes must be increasing");
  }
  double tol = 1e-6 * spot;
  for (std::size_t jt = 0; jt < maturities.size(); ++jt)
    for (std::size_t jk = 0; jk < strikes.size(); ++jk) {
      double c = at(jt, jk);
      double intrinsic = std::max(spot - strikes[jk], 0.0);
      if (c < intrinsic - tol || c > spot + tol)
        throw SpecError("price surface: call outside [ (S-K)^+, S ] at " +
                        loc(maturities[jt], strikes[jk]));
    }
}

// ---------------------------------------------------------------------------
// Damped inversion, cumulant evaluable on Im z = -alpha
// ---------------------------------------------------------------------------

ModifiedPriceSlice modified_from_cumulant(const Cumulant& cum, double t, double T,
                                          const std::vector<double>& xs,
                                          const PricingConfig& cfg) {
  ModifiedPriceSlice out;
  out.maturity = T;
  out.t = t;
  out.x = xs;
  out.value.assign(xs.size(), 0.0);
  if (T < t) throw SpecError("modified_from_cumulant: T < t");
  if (T == t) return out;  // 1 - e^0 = 0, intrinsic prices

  const double alpha = cfg.alpha;
  if (alpha <= 0.0 || alpha >= 1.0)
    throw SpecError("pricing: damping constant must lie in (0,1)");

  auto damped = [&](double u) -> Complex {
    Complex z(u, -alpha);
    Complex c = cum(z);
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalError("cumulant evaluation failed on the damped line at u=" +
                           std::to_string(u));
    return std::exp(c);
  };
  auto denom = [&](double u) -> Complex {
    Complex w(alpha, u);
    return w * w - w;
  };

  // Grow the truncation until the integrand has decayed (or the cap is hit).
  double U = cfg.damped_u0;
  auto edge_mag = [&](double u) {
    return std::max(std::abs(damped(u)), std::abs(damped(-u))) / std::abs(denom(u));
  };
  while (U < cfg.damped_u_max && edge_mag(U) > cfg.tail_eps) U *= 1.6;
  U = std::min(U, cfg.damped_u_max);

  double edge_sup = std::max(std::abs(damped(U)), std::abs(damped(-U)));
  out.tail_bound = edge_sup / (kPi * U);
  if (out.tail_bound > cfg.tail_bound_tol)
    throw NumericalError(
        "damped inversion: integrand tail not resolved by u = " + std::to_string(U) +
        " (bound " + std::to_string(out.tail_bound) + ")");

  int n = static_cast<int>(std::ceil(U / cfg.damped_du));
  double du = U / n;
  int nodes = 2 * n + 1;
  std::vector<Complex> g(nodes);
  for (int k = 0; k < nodes; ++k) {
    double u = (k - n) * du;
    g[k] = damped(u) / denom(u) * trapezoid_weight(k, nodes);
  }

  parallel_for(xs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double x = xs[i];
      Complex step = std::polar(1.0, -du * x);
      Complex ph = std::polar(1.0, n * du * x);  // e^{-i u_0 x}, u_0 = -U
      Complex acc(0.0, 0.0);
      for (int k = 0; k < nodes; ++k) {
        acc += g[k] * ph;
        ph *= step;
      }
      double J = (acc * du / (2.0 * kPi)).real();
      out.value[i] = std::exp(-alpha * x) * (damped_const_term(x, alpha) + J);
    }
  });

  clip_slice(out, cfg);
  return out;
}

std::vector<double> price_from_cumulant(const Cumulant& cum, double spot,
                                        const std::vector<double>& strikes, double T,
                                        const PricingConfig& cfg) {
  if (spot <= 0.0) throw SpecError("price_from_cumulant: spot must be > 0");
  std::vector<double> xs(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    if (strikes[i] <= 0.0) throw SpecError("price_from_cumulant: strikes must be > 0");
    xs[i] = std::log(strikes[i] / spot);
  }
  ModifiedPriceSlice o = modified_from_cumulant(cum, 0.0, T, xs, cfg);
  std::vector<double> calls(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i)
    calls[i] = std::max(spot - strikes[i], 0.0) + strikes[i] * o.value[i];
  return calls;
}

// ---------------------------------------------------------------------------
// Grid route
// ---------------------------------------------------------------------------

ModifiedPriceSlice codebook_to_modified(const CodebookSurface& s, double t, double T,
                                        const PricingConfig& cfg) {
  const GridSpec& grid = s.grid();
  if (T < t) throw SpecError("codebook_to_modified: T < t");

  // Necessary-membership precondition on [t, T] pairs.
  if (!cfg.skip_pi_check) {
    PiCheckReport rep = pi_necessary_check(s, t);
    for (const auto& v : rep.violations) {
      if (v.T <= T + 1e-12)
        throw SpecError("codebook_to_modified: necessary membership check fails at " +
                        loc(v.T, v.u) + "; refusing to price");
    }
  }

  // Cumulant on the real grid.
  const int nk = grid.n_freq();
  std::vector<Complex> c(nk);
  for (int k = 0; k < nk; ++k) c[k] = integrate_maturity(s, t, T, grid.freq(k));

  // Implied scale for the x-range.
  int kstar = grid.freq_index(std::min(1.0, grid.max_freq()));
  if (kstar < 0) kstar = nk - 1;
  double ustar = grid.freq(kstar);
  double impl_var = ustar != 0.0 ? std::max(0.0, -2.0 * c[kstar].real() / (ustar * ustar)) : 0.0;
  XGrid xg = make_x_grid(std::max(cfg.x_pad, 6.0 * std::sqrt(impl_var)), cfg.dx);

  ModifiedPriceSlice out;
  out.maturity = T;
  out.t = t;
  out.x = xg.xs;
  out.value.assign(xg.xs.size(), 0.0);
  if (T == t) return out;

  // Tail handling: extend e^{cum} by a quadratic fit per side where the edge
  // has not decayed; beyond the extension the exact 1/(u^2+iu) tail is added
  // in closed form below.
  const double du = grid.du;
  const double U = grid.max_freq();
  double log_decay = -std::log(cfg.decay_tol);

  auto make_side = [&](bool positive) {
    std::vector<double> us;
    std::vector<Complex> cs;
    int m = std::min(6, grid.n_half);
    for (int i = m; i >= 1; --i) {
      int k = positive ? nk - 1 - (i - 1) : (i - 1);
      us.push_back(grid.freq(k));
      cs.push_back(c[k]);
    }
    return fit_tail(us, cs);
  };
  TailFit fit_pos = make_side(true);
  TailFit fit_neg = make_side(false);

  double need_pos = -c[nk - 1].real(), need_neg = -c[0].real();
  int ext = 0;
  if (need_pos < log_decay || need_neg < log_decay) {
    // Edge not decayed: extend until the fitted real part passes ~27 e-folds.
    auto ext_for = [&](const TailFit& f, double need) -> int {
      if (need >= log_decay) return 0;
      if (!f.valid || f.a <= 1e-12)
        throw NumericalError(
            "codebook_to_modified: cumulant has not decayed at the grid edge and no "
            "quadratic tail could be fitted (resolution error)");
      double target = std::sqrt(std::max(0.0, (27.6 - f.dr) / f.a));
      return static_cast<int>(std::ceil(std::max(0.0, target - U) / du));
    };
    int ep = ext_for(fit_pos, need_pos);
    int en = ext_for(fit_neg, need_neg);
    ext = std::max(ep, en);
    int cap = static_cast<int>((cfg.extend_cap - 1.0) * U / du);
    if (ext > cap) {
      TailFit& f = (ep > en) ? fit_pos : fit_neg;
      double Ue = U + cap * du;
      if (std::exp(f(Ue).real()) > cfg.decay_tol)
        throw NumericalError("codebook_to_modified: cumulant tail needs extension past "
                             "the configured cap (resolution error)");
      ext = cap;
    }
  }

  // Node layout: the grid spacing outside |u| <= fine_zone, a 4x finer
  // spacing inside it. The integrand is analytic but varies on the unit scale
  // near u = 0 (the 1/(u^2+iu) content), where the raw grid spacing leaves an
  // O(du^4) trapezoid remainder; the cumulant is filled in on the fine nodes
  // by cubic interpolation.
  const int refine = 4;
  const double fine_zone = du * std::max(1.0, std::round(std::min(4.0, U) / du));
  const int half = grid.n_half + ext;
  const double Ue = half * du;

  auto cum_at = [&](double u) -> Complex {
    // Grid value, cubic interpolation between nodes, or the fitted tail.
    double r = u / du + grid.n_half;
    if (r < 0.0 || r > nk - 1) {
      const TailFit& f = (u > 0.0) ? fit_pos : fit_neg;
      return f.valid ? f(u) : Complex(-1e308, 0.0);
    }
    int k = static_cast<int>(std::floor(r));
    double w = r - k;
    if (w < 1e-12) return c[k];
    if (k + 1 >= nk) return c[nk - 1];
    if (k == 0 || k + 2 >= nk)  // linear at the very edge cells
      return (1.0 - w) * c[k] + w * c[k + 1];
    // Catmull-Rom through c[k-1..k+2].
    Complex a0 = c[k - 1], a1 = c[k], a2 = c[k + 1], a3 = c[k + 2];
    return a1 + 0.5 * w * (a2 - a0 +
                           w * (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3 +
                                w * (3.0 * (a1 - a2) + a3 - a0)));
  };

  std::vector<double> us;
  us.reserve(2 * (half + 1) + 2 * refine * static_cast<int>(fine_zone / du));
  for (double u = -Ue; u < -fine_zone - 0.5 * du; u += du) us.push_back(u);
  {
    int fine_n = static_cast<int>(std::lround(2.0 * fine_zone / du)) * refine;
    double fine_du = du / refine;
    for (int q = 0; q <= fine_n; ++q) us.push_back(-fine_zone + q * fine_du);
  }
  for (double u = fine_zone + du; u < Ue + 0.5 * du; u += du) us.push_back(u);

  const std::size_t nq = us.size();
  Complex cprime0 = (c[grid.n_half + 1] - c[grid.n_half - 1]) / (2.0 * du);
  std::vector<Complex> g(nq), tail1(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    double u = us[q];
    double w = 0.5 * ((q + 1 < nq ? us[q + 1] : us[q]) - (q > 0 ? us[q - 1] : us[q]));
    if (std::fabs(u) < 1e-12) {
      g[q] = kI * cprime0 * w;
      tail1[q] = Complex(1.0, 0.0) * w;  // regular part i/(u+i) at u = 0
    } else {
      Complex cv = cum_at(u);
      Complex ec = (cv.real() < -700.0) ? Complex(0.0, 0.0) : std::exp(cv);
      g[q] = (1.0 - ec) / Complex(u * u, u) * w;
      tail1[q] = kI / (u + kI) * w;
    }
  }

  // Combined integrand G(u) = (1-e^c)/(u^2+iu) - i/(u+i) and its derivative
  // at the refinement junctions, for the composite-trapezoid corrections.
  auto G_and_dG = [&](double u) -> std::pair<Complex, Complex> {
    int k = grid.freq_index(u);
    Complex cv = (k >= 0) ? c[k] : cum_at(u);
    Complex cp = (k > 0 && k + 1 < nk) ? (c[k + 1] - c[k - 1]) / (2.0 * du)
                                       : Complex(0.0, 0.0);
    Complex den(u * u, u);
    Complex ec = std::exp(cv);
    Complex G = (1.0 - ec) / den - kI / (u + kI);
    Complex dG = (-cp * ec * den - (1.0 - ec) * Complex(2.0 * u, 1.0)) / (den * den) +
                 kI / ((u + kI) * (u + kI));
    return {G, dG};
  };
  auto [Gp, dGp] = G_and_dG(fine_zone);
  auto [Gm, dGm] = G_and_dG(-fine_zone);
  const double junction_h2 = (du * du - (du / refine) * (du / refine)) / 12.0;

  parallel_for(xg.xs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double x = xg.xs[i];
      Complex step_coarse = std::polar(1.0, -du * x);
      Complex step_fine = std::polar(1.0, -du / refine * x);
      Complex ph = std::polar(1.0, -us[0] * x);
      Complex main(0.0, 0.0), smooth(0.0, 0.0);
      for (std::size_t q = 0; q < nq; ++q) {
        main += g[q] * ph;
        smooth += tail1[q] * ph;
        if (q + 1 < nq)
          ph *= (us[q + 1] - us[q] < 0.75 * du) ? step_fine : step_coarse;
      }
      double v = (main / (2.0 * kPi)).real();
      v += f0_term(x) + sine_integral(Ue * x) / kPi - (smooth / (2.0 * kPi)).real();
      // Composite-trapezoid corrections: the outer edges (where the combined
      // integrand has collapsed to 1/(iu), closed form) and the two spacing
      // junctions (grid data).
      v -= du * du / (12.0 * kPi) *
           (std::sin(Ue * x) / (Ue * Ue) - x * std::cos(Ue * x) / Ue);
      Complex jp = std::polar(1.0, -fine_zone * x) * (dGp - kI * x * Gp);
      Complex jm = std::polar(1.0, fine_zone * x) * (dGm - kI * x * Gm);
      v += junction_h2 / (2.0 * kPi) * (jp - jm).real();
      out.value[i] = v;
    }
  });

  out.tail_bound = std::exp(std::max(fit_pos.valid ? fit_pos(Ue).real() : -1e308,
                                     fit_neg.valid ? fit_neg(-Ue).real() : -1e308)) /
                   (kPi * Ue);
  clip_slice(out, cfg);
  check_edge_decay(out, cfg);
  return out;
}

std::vector<double> modified_to_calls(const ModifiedPriceSlice& o, double spot,
                                      const std::vector<double>& strikes,
                                      const PricingConfig& cfg) {
  if (spot <= 0.0) throw SpecError("modified_to_calls: spot must be > 0");
  if (o.x.size() < 2) throw SpecError("modified_to_calls: slice too small");
  PchipInterpolator interp(o.x, o.value);
  std::vector<double> calls(strikes.size());
  double clipped = 0.0, pos = 0.0;
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    double x = std::log(strikes[i] / spot);
    if (x < o.x.front() - 1e-12 || x > o.x.back() + 1e-12)
      throw SpecError("modified_to_calls: strike " + std::to_string(strikes[i]) +
                      " outside the log-moneyness range; extrapolation refused");
    double v = interp(std::clamp(x, o.x.front(), o.x.back()));
    if (v < 0.0) {
      clipped += -v;
      v = 0.0;
    } else {
      pos += v;
    }
    calls[i] = std::max(spot - strikes[i], 0.0) + strikes[i] * v;
  }
  if (clipped > cfg.clip_fail_fraction * std::max(pos, 1e-300))
    throw NumericalError("modified_to_calls: clipped negative mass exceeds tolerance");
  return calls;
}

// ---------------------------------------------------------------------------
// Reverse direction: prices -> codebook
// ---------------------------------------------------------------------------

namespace {

// The modified price carries a model-independent kink at x = 0: its n-th
// derivative jumps by (-1)^n (the subtracted intrinsic leg). The carrier
// below reproduces the first three jumps, has a closed-form transform, and
// decays fast enough that the remaining trapezoid integrand is C^3 with
// negligible aliasing.
struct KinkCarrier {
  double p = 6.0;
  double a1 = 1.0, a2 = 0.0, a3 = 0.0;

  KinkCarrier() {
    a2 = 1.0 - 2.0 * p;
    a3 = 1.0 - 3.0 * p + 3.0 * p * p;
  }
  double value(double x) const {
    if (x < 0.0) return 0.0;
    return std::exp(-p * x) * (-a1 * x + 0.5 * a2 * x * x - a3 * x * x * x / 6.0);
  }
  double deriv(double x) const {
    if (x < 0.0) return 0.0;
    double g = -a1 * x + 0.5 * a2 * x * x - a3 * x * x * x / 6.0;
    double gp = -a1 + a2 * x - 0.5 * a3 * x * x;
    return std::exp(-p * x) * (gp - p * g);
  }
  Complex transform(double u) const {  // int_0^inf c(x) e^{iux} dx
    Complex s(p, -u);
    Complex s2 = s * s;
    return -a1 / s2 + a2 / (s2 * s) - a3 / (s2 * s2);
  }
  Complex window_tail(double u, double b) const {  // int_b^inf c(x) e^{iux} dx
    Complex s(p, -u);
    auto In = [&](int n) {  // int_b^inf x^n e^{-sx} dx
      Complex acc(0.0, 0.0);
      double fact = 1.0;  // n!/k!
      for (int k = n; k >= 0; --k) {
        acc += fact * std::pow(b, k) / std::pow(s, n + 1 - k);
        fact *= k;
      }
      return acc * std::exp(-s * b);
    };
    return -a1 * In(1) + 0.5 * a2 * In(2) - a3 / 6.0 * In(3);
  }
};

// Forward transform of modified values on a uniform x-grid with x = 0 a node.
Complex forward_transform_row(const std::vector<double>& xs, const std::vector<double>& vals,
                              double u) {
  static const KinkCarrier carrier;
  const std::size_t nx = xs.size();
  const double dx = xs[1] - xs[0];
  Complex ph = std::polar(1.0, u * xs[0]);
  Complex step = std::polar(1.0, u * dx);
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    double r = vals[i] - carrier.value(xs[i]);
    acc += trapezoid_weight(static_cast<int>(i), static_cast<int>(nx)) * r * ph;
    ph *= step;
  }
  Complex F = acc * dx;
  // Boundary corrections for the residual (left edge decayed, right edge
  // still carries -c and a small O remainder).
  double rb = vals[nx - 1] - carrier.value(xs[nx - 1]);
  double rbp = (vals[nx - 1] - vals[nx - 2]) / dx - carrier.deriv(xs[nx - 1]);
  double ra = vals[0];
  double rap = (vals[1] - vals[0]) / dx;
  Complex gb = (Complex(rbp, 0.0) + Complex(0.0, u) * rb) * std::polar(1.0, u * xs[nx - 1]);
  Complex ga = (Complex(rap, 0.0) + Complex(0.0, u) * ra) * std::polar(1.0, u * xs[0]);
  F -= dx * dx / 12.0 * (gb - ga);
  F += carrier.transform(u) - carrier.window_tail(u, xs[nx - 1]);
  return F;
}

}  // namespace

Complex modified_forward_transform(const ModifiedPriceSlice& o, double u) {
  if (o.x.size() < 3) throw SpecError("modified_forward_transform: slice too small");
  double dx = o.x[1] - o.x[0];
  for (std::size_t i = 1; i < o.x.size(); ++i)
    if (std::fabs(o.x[i] - o.x[i - 1] - dx) > 1e-9)
      throw SpecError("modified_forward_transform: x-grid must be uniform");
  return forward_transform_row(o.x, o.value, u);
}

CodebookRecovery surface_to_codebook_detailed(const PriceSurface& p, int n_half, double du,
                                              const PricingConfig& cfg) {
  p.validate();
  const std::size_t nT = p.maturities.size();
  if (nT < 3)
    throw SpecError("surface_to_codebook: need at least 3 maturities for d/dT");

  // Uniform maturity grid, anchored at multiples of dT.
  double dT = p.maturities[1] - p.maturities[0];
  for (std::size_t j = 2; j < nT; ++j)
    if (std::fabs(p.maturities[j] - p.maturities[j - 1] - dT) > 1e-9 * std::max(1.0, dT))
      throw SpecError("surface_to_codebook: maturities must be uniformly spaced");
  if (dT <= 0.0) throw SpecError("surface_to_codebook: maturities must increase");
  int j0 = static_cast<int>(std::lround(p.maturities[0] / dT));
  if (std::fabs(p.maturities[0] - j0 * dT) > 1e-9 * std::max(1.0, dT))
    throw SpecError("surface_to_codebook: maturities must align with multiples of their step");

  // Log-moneyness grid; must be uniform and contain x = 0.
  const std::size_t nx = p.strikes.size();
  std::vector<double> xs(nx);
  for (std::size_t i = 0; i < nx; ++i) xs[i] = std::log(p.strikes[i] / p.spot);
  double dx = xs[1] - xs[0];
  int zero_idx = -1;
  for (std::size_t i = 1; i < nx; ++i) {
    if (std::fabs(xs[i] - xs[i - 1] - dx) > 1e-7 * std::max(1.0, std::fabs(dx)))
      throw SpecError("surface_to_codebook: strikes must be uniform in log-moneyness");
  }
  for (std::size_t i = 0; i < nx; ++i)
    if (std::fabs(xs[i]) < 1e-9) zero_idx = static_cast<int>(i);
  if (zero_idx < 0)
    throw SpecError("surface_to_codebook: strike grid must contain the spot (x = 0)");

  // Modified prices per maturity.
  std::vector<std::vector<double>> O(nT, std::vector<double>(nx));
  for (std::size_t jt = 0; jt < nT; ++jt) {
    for (std::size_t i = 0; i < nx; ++i) {
      double k = p.strikes[i];
      double v = p.at(jt, i) / k - std::max(p.spot / k - 1.0, 0.0);
      if (v < -cfg.neg_value_tol)
        throw SpecError("surface_to_codebook: negative time value at " +
                        loc(p.maturities[jt], k));
      O[jt][i] = v;
    }
  }

  // Rows of cumulative exponents: logA(T_j, u) with anchor logA = 0 at T = 0.
  // Row indices run over j0..j0+nT-1 plus a synthetic j = 0 row when j0 == 1.
  bool synthesize_zero = (j0 == 1);
  int first_row = synthesize_zero ? 0 : j0;
  int n_rows = static_cast<int>(nT) + (synthesize_zero ? 1 : 0);
  int n_mat = j0 + static_cast<int>(nT);

  GridSpec out_grid;
  out_grid.dT = dT;
  out_grid.n_mat = n_mat;
  out_grid.du = du;
  out_grid.n_half = n_half;
  out_grid.validate();

  const int nu = n_half + 1;  // u >= 0; negative side by conjugation
  std::vector<Complex> logA(static_cast<std::size_t>(n_rows) * nu, Complex(0, 0));
  std::vector<std::uint8_t> row_ok(static_cast<std::size_t>(n_rows) * nu, 0);

  // Cells keep their log only while the argument stays comfortably above the
  // forward-transform noise amplified by (u^2 + u); beyond that the price
  // data no longer determines the exponent. The window-truncation part of
  // the noise is calibrated from the slice edge values (the neglected tail
  // integral is bounded by the edge magnitude over the oscillation rate).
  double edge_mag = 0.0;
  for (const auto& row : O)
    edge_mag = std::max(edge_mag, std::max(std::fabs(row.front()), std::fabs(row.back())));
  auto cond_floor = [&](double u) {
    double noise = std::max(cfg.recovery_noise, edge_mag / std::max(1.0, std::fabs(u)));
    return std::max(cfg.cond_floor,
                    (u * u + std::fabs(u)) * noise / std::max(cfg.recovery_dlog, 1e-300));
  };

  parallel_for(static_cast<std::size_t>(n_rows), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      // The T = 0 row is an exact anchor (empty maturity integral, A = 1);
      // it is never transformed, whether synthesized or quoted as intrinsic.
      // Rows with identically zero time value are anchored the same way: the
      // kink carrier only applies to nondegenerate return distributions.
      bool anchor = (first_row + static_cast<int>(r)) == 0;
      if (!anchor && !(synthesize_zero && r == 0)) {
        const std::vector<double>& row = O[r - (synthesize_zero ? 1 : 0)];
        double peak = 0.0;
        for (double v : row) peak = std::max(peak, std::fabs(v));
        if (peak < 1e-13) anchor = true;
      }
      double prev_phase = 0.0;
      bool alive = true;
      for (int k = 0; k < nu; ++k) {
        double u = k * du;
        std::size_t idx = r * nu + k;
        if (anchor || k == 0) {
          logA[idx] = Complex(0.0, 0.0);
          row_ok[idx] = 1;
          continue;
        }
        if (!alive) continue;
        const std::vector<double>& row = O[r - (synthesize_zero ? 1 : 0)];
        Complex F = forward_transform_row(xs, row, u);
        Complex A = 1.0 - Complex(u * u, u) * F;
        if (std::abs(A) < cond_floor(u)) {
          alive = false;  // information exhausted along this ray
          continue;
        }
        Complex lg = std::log(A);
        double dphase = lg.imag() - prev_phase;
        dphase -= 2.0 * kPi * std::round(dphase / (2.0 * kPi));
        if (std::fabs(dphase) > 0.5 * kPi)
          throw NumericalError("surface_to_codebook: branch failure at " +
                               loc((first_row + static_cast<int>(r)) * dT, u));
        prev_phase += dphase;
        logA[idx] = Complex(lg.real(), prev_phase);
        row_ok[idx] = 1;
      }
    }
  });

  CodebookRecovery rec;
  rec.psi = CodebookSurface(out_grid, 0.0, SurfaceMode::Maturity);
  rec.ok.assign(rec.psi.values().size(), 0);
  rec.n_total = rec.ok.size();

  auto row_of = [&](int j) { return j - first_row; };  // output row -> logA row
  auto have = [&](int j) { return j >= first_row && j < first_row + n_rows; };

  // A-posteriori resolution mask: the d/dT stencil error is ~ |d3|/(6 dT)
  // with d3 the third difference of logA; cells where the maturity grid does
  // not resolve the exponent are not meaningfully recovered.
  std::vector<std::uint8_t> resolved(static_cast<std::size_t>(n_rows) * nu, 1);
  if (n_rows >= 4) {
    for (int r = 0; r < n_rows; ++r) {
      for (int k = 0; k < nu; ++k) {
        int r0 = std::clamp(r - 1, 0, n_rows - 4);
        bool okrow = true;
        for (int q = r0; q < r0 + 4; ++q) okrow = okrow && row_ok[static_cast<std::size_t>(q) * nu + k];
        if (!okrow) continue;  // handled by the ok mask
        Complex d3 = logA[static_cast<std::size_t>(r0 + 3) * nu + k] -
                     3.0 * logA[static_cast<std::size_t>(r0 + 2) * nu + k] +
                     3.0 * logA[static_cast<std::size_t>(r0 + 1) * nu + k] -
                     logA[static_cast<std::size_t>(r0) * nu + k];
        if (std::abs(d3) / (6.0 * dT) > cfg.recovery_resolution)
          resolved[static_cast<std::size_t>(r) * nu + k] = 0;
      }
    }
  }

  for (int j = 0; j < n_mat; ++j) {
    for (int k = 0; k < nu; ++k) {
      // Stencil in T: central inside, one-sided second order at the ends.
      int ja, jb, jc;
      double wa, wb, wc;
      if (have(j - 1) && have(j + 1)) {
        ja = j - 1; jb = j; jc = j + 1;
        wa = -1.0 / (2.0 * dT); wb = 0.0; wc = 1.0 / (2.0 * dT);
      } else if (have(j + 1) && have(j + 2)) {
        ja = j; jb = j + 1; jc = j + 2;
        wa = -3.0 / (2.0 * dT); wb = 4.0 / (2.0 * dT); wc = -1.0 / (2.0 * dT);
      } else if (have(j - 1) && have(j - 2)) {
        ja = j; jb = j - 1; jc = j - 2;
        wa = 3.0 / (2.0 * dT); wb = -4.0 / (2.0 * dT); wc = 1.0 / (2.0 * dT);
      } else {
        continue;
      }
      if (!have(ja) || !have(jb) || !have(jc)) continue;
      std::size_t ia = static_cast<std::size_t>(row_of(ja)) * nu + k;
      std::size_t ib = static_cast<std::size_t>(row_of(jb)) * nu + k;
      std::size_t ic = static_cast<std::size_t>(row_of(jc)) * nu + k;
      if (!row_ok[ia] || !row_ok[ib] || !row_ok[ic]) continue;
      if (have(j) && !resolved[static_cast<std::size_t>(row_of(j)) * nu + k]) continue;
      Complex psi = wa * logA[ia] + wb * logA[ib] + wc * logA[ic];
      int kp = out_grid.n_half + k;
      int km = out_grid.n_half - k;
      if (k == 0) psi = Complex(0.0, 0.0);  // pinned column
      rec.psi.at(j, kp) = psi;
      rec.ok[static_cast<std::size_t>(j) * out_grid.n_freq() + kp] = 1;
      rec.psi.at(j, km) = std::conj(psi);
      rec.ok[static_cast<std::size_t>(j) * out_grid.n_freq() + km] = 1;
    }
  }
  for (std::uint8_t f : rec.ok) rec.n_recovered += f;
  return rec;
}

CodebookSurface surface_to_codebook(const PriceSurface& p, int n_half, double du,
                                    const PricingConfig& cfg) {
  return surface_to_codebook_detailed(p, n_half, du, cfg).psi;
}

}  // namespace levycb
