#ifndef LEVYCB_NUMERICS_HPP
#define LEVYCB_NUMERICS_HPP

#include <complex>
#include <vector>

namespace levycb {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Sine integral Si(x) = int_0^x sin(t)/t dt, odd in x.
double sine_integral(double x);

// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double expint_e1(double x);

// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// Gauss-Legendre nodes/weights on [a,b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  GaussLegendre(int n, double a, double b);
};

// Monotonicity-preserving cubic interpolant (Fritsch-Carlson slopes).
class PchipInterpolator {
 public:
  PchipInterpolator() = default;
  PchipInterpolator(std::vector<double> x, std::vector<double> y);
  double operator()(double xq) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;  // nodes, values, node slopes
};

// Trapezoid weight for node i of a uniform n-point grid (h absorbed by caller).
inline double trapezoid_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace levycb

#endif
