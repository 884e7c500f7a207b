#ifndef LEVYCB_CODEBOOK_HPP
#define LEVYCB_CODEBOOK_HPP

#include <vector>

#include "levycb/grid.hpp"

namespace levycb {

// int_t^T Psi(r, u) dr, trapezoid on the maturity grid (exact integral of the
// piecewise-linear interpolant, so off-grid t and T are fine). u must be a
// grid frequency.
Complex integrate_maturity(const CodebookSurface& s, double t, double T, double u);

// ||Psi||_{T,m} = int_0^T sup_{|u|<=m} |Psi(r,u)| dr.
double seminorm(const CodebookSurface& s, double T, double m);

// Index shift between maturity and time-to-maturity parametrisations.
// Requires s.time() to be a multiple of dT. Cells shifted in from beyond the
// grid take the last available row; cells shifted back into T < t take the
// x = 0 row (frozen region, never read by pricing).
CodebookSurface to_musiela(const CodebookSurface& s);
CodebookSurface from_musiela(const CodebookSurface& s);

struct PiViolation {
  double t = 0.0;   // lower maturity of the pair
  double T = 0.0;   // upper maturity
  double u = 0.0;
  double value = 0.0;  // Re integral, or |integral| for the u = 0 check
  enum class Kind { PositiveReal, NonzeroAtZero } kind = Kind::PositiveReal;
};

struct PiCheckReport {
  std::vector<PiViolation> violations;  // capped at max_entries
  std::size_t total = 0;                // full violation count
  double worst = 0.0;                   // largest excess over tol
  bool pass() const { return total == 0; }
};

// Necessary membership conditions for the martingale class on every grid pair
// t <= t1 <= T2: Re int_{t1}^{T2} Psi(r,u) dr <= tol and the u = 0 integral
// vanishes. Passing is necessary, not sufficient.
PiCheckReport pi_necessary_check(const CodebookSurface& s, double t, double tol = 1e-8,
                                 std::size_t max_entries = 64);

}  // namespace levycb

#endif
