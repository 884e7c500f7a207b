#ifndef LEVYCB_GRID_HPP
#define LEVYCB_GRID_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "levycb/errors.hpp"
#include "levycb/numerics.hpp"

namespace levycb {

// Uniform maturity grid T_j = j * dT (j = 0..n_mat-1) and symmetric frequency
// grid u_k = (k - n_half) * du (k = 0..2*n_half), always containing u = 0.
struct GridSpec {
  double dT = 0.05;
  int n_mat = 41;
  double du = 0.05;
  int n_half = 800;

  void validate() const {
    if (dT <= 0.0) throw SpecError("grid: dT must be > 0");
    if (du <= 0.0) throw SpecError("grid: du must be > 0");
    if (n_mat < 2) throw SpecError("grid: need at least 2 maturities");
    if (n_half < 1) throw SpecError("grid: need at least 1 positive frequency");
  }

  int n_freq() const { return 2 * n_half + 1; }
  double maturity(int j) const { return j * dT; }
  double freq(int k) const { return (k - n_half) * du; }
  double max_maturity() const { return dT * (n_mat - 1); }
  double max_freq() const { return du * n_half; }

  // Index of a grid frequency, -1 if u is not a node.
  int freq_index(double u) const {
    double r = u / du + n_half;
    int k = static_cast<int>(std::lround(r));
    if (k < 0 || k >= n_freq() || std::fabs(r - k) > 1e-9) return -1;
    return k;
  }

  int maturity_floor(double t) const {  // largest j with T_j <= t (clamped)
    int j = static_cast<int>(std::floor(t / dT + 1e-12));
    if (j < 0) j = 0;
    if (j > n_mat - 1) j = n_mat - 1;
    return j;
  }

  bool operator==(const GridSpec& o) const {
    return dT == o.dT && n_mat == o.n_mat && du == o.du && n_half == o.n_half;
  }
};

enum class SurfaceMode { Maturity, Musiela };

// Complex grid function Psi(T_j, u_k). Value type: copy freely, mutate copies.
class CodebookSurface {
 public:
  CodebookSurface() = default;

  CodebookSurface(GridSpec grid, double time = 0.0, SurfaceMode mode = SurfaceMode::Maturity)
      : grid_(grid), time_(time), mode_(mode),
        values_(static_cast<std::size_t>(grid.n_mat) * grid.n_freq(), Complex(0.0, 0.0)) {
    grid_.validate();
    if (time < 0.0) throw SpecError("surface: time must be >= 0");
  }

  // Samples f(T, u) on the grid; the u = 0 column is pinned to 0.
  static CodebookSurface from_exponent(const GridSpec& grid,
                                       const std::function<Complex(double, double)>& f,
                                       double time = 0.0) {
    CodebookSurface s(grid, time);
    for (int j = 0; j < grid.n_mat; ++j)
      for (int k = 0; k < grid.n_freq(); ++k)
        s.at(j, k) = (k == grid.n_half) ? Complex(0.0, 0.0) : f(grid.maturity(j), grid.freq(k));
    return s;
  }

  const GridSpec& grid() const { return grid_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  SurfaceMode mode() const { return mode_; }
  void set_mode(SurfaceMode m) { mode_ = m; }

  Complex& at(int j, int k) { return values_[static_cast<std::size_t>(j) * grid_.n_freq() + k]; }
  Complex at(int j, int k) const { return values_[static_cast<std::size_t>(j) * grid_.n_freq() + k]; }

  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

 private:
  GridSpec grid_;
  double time_ = 0.0;
  SurfaceMode mode_ = SurfaceMode::Maturity;
  std::vector<Complex> values_;
};

}  // namespace levycb

#endif
