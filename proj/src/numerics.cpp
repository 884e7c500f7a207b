#include "levycb/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "levycb/errors.hpp"

namespace levycb {

namespace {

// Si and Ci by series for small arguments, complex continued fraction for
// large ones (the classic cisi scheme).
void cisi(double x, double& ci, double& si) {
  constexpr double eps = 1e-16;
  constexpr int maxit = 200;
  constexpr double tmin = 2.0;
  constexpr double euler = 0.57721566490153286060;

  double t = std::fabs(x);
  if (t == 0.0) {
    si = 0.0;
    ci = -1e308;
    return;
  }
  if (t > tmin) {
    // Lentz continued fraction for E1(it), t > 0.
    Complex b(1.0, t);
    Complex c(1e308, 0.0);
    Complex d = 1.0 / b;
    Complex h = d;
    int i;
    for (i = 1; i < maxit; ++i) {
      double a = -static_cast<double>(i) * i;
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      Complex del = c * d;
      h *= del;
      if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < eps) break;
    }
    if (i >= maxit) throw NumericalError("cisi: continued fraction failed");
    h *= Complex(std::cos(t), -std::sin(t));
    ci = -h.real();
    si = kPi / 2.0 + h.imag();
  } else {
    // Power series.
    double sum, sums = 0.0, sumc = 0.0;
    if (t < std::sqrt(1e-30)) {
      sums = 0.0;
      sumc = 0.0;
    } else {
      sum = 0.0;
      double sign = 1.0, fact = 1.0;
      bool odd = true;
      for (int k = 1; k <= maxit; ++k) {
        fact *= t / k;
        double term = fact / k;
        sum += sign * term;
        double err = term / std::fabs(sum);
        if (odd) {
          sign = -sign;
          sums = sum;
          sum = sumc;
        } else {
          sumc = sum;
          sum = sums;
        }
        if (err < eps) break;
        odd = !odd;
      }
    }
    si = sums;
    ci = sumc + std::log(t) + euler;
  }
  if (x < 0.0) si = -si;
}

}  // namespace

double sine_integral(double x) {
  double ci, si;
  cisi(x, ci, si);
  return si;
}

double expint_e1(double x) {
  if (x <= 0.0) throw DomainError("expint_e1: requires x > 0");
  constexpr double euler = 0.57721566490153286060;
  if (x <= 1.0) {
    // Series: E1(x) = -gamma - ln x + sum (-1)^{k+1} x^k / (k k!)
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
      term *= -x / k;
      double add = -term / k;
      sum += add;
      if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return -euler - std::log(x) + sum;
  }
  // Lentz continued fraction.
  double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
  for (int i = 1; i <= 200; ++i) {
    double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

GaussLegendre::GaussLegendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n >= 1");
  nodes.resize(n);
  weights.resize(n);
  int m = (n + 1) / 2;
  double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    nodes[i] = xm - xl * z;
    nodes[n - 1 - i] = xm + xl * z;
    weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

PchipInterpolator::PchipInterpolator(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("pchip: need >= 2 nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("pchip: x not increasing");
  d_.resize(n);
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::fabs(d) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double PchipInterpolator::operator()(double xq) const {
  if (xq < x_.front() || xq > x_.back())
    throw DomainError("pchip: query outside node range");
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (x_[mid] <= xq) lo = mid; else hi = mid;
  }
  double h = x_[lo + 1] - x_[lo];
  double t = (xq - x_[lo]) / h;
  double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  double h10 = t * (1.0 - t) * (1.0 - t);
  double h01 = t * t * (3.0 - 2.0 * t);
  double h11 = t * t * (t - 1.0);
  return h00 * y_[lo] + h10 * h * d_[lo] + h01 * y_[lo + 1] + h11 * h * d_[lo + 1];
}

}  // namespace levycb
