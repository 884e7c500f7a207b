#ifndef LEVYCB_PRICING_HPP
#define LEVYCB_PRICING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "levycb/codebook.hpp"
#include "levycb/grid.hpp"

namespace levycb {

struct PricingConfig {
  // Damped inversion (closed-form cumulants).
  double alpha = 0.5;           // damping constant from the transform identity
  double damped_du = 0.025;     // quadrature step on the damped line
  double damped_u0 = 40.0;      // initial half-width
  double damped_u_max = 4000.0; // hard cap
  double tail_eps = 1e-14;      // integrand magnitude target at the edge
  double tail_bound_tol = 1e-7; // acceptable neglected-tail bound

  // Grid-route inversion (surface cumulants known on the real u-grid).
  double decay_tol = 1e-4;      // e^{Re cum} at the (possibly extended) edge
  double extend_cap = 12.0;     // extension limit as a multiple of the grid edge

  // Modified-slice x-grid.
  double x_pad = 2.0;           // half-width = max(x_pad, 6 sigma_impl sqrt(tau))
  double dx = 0.01;
  double o_decay_tol = 1e-4;    // |O| at the x-edges

  // Clipping and recovery.
  double clip_fail_fraction = 1e-3;   // fail if clipped mass exceeds this share
  double cond_floor = 1e-6;           // absolute |1-(u^2+iu)F| floor
  double recovery_noise = 1e-9;       // estimated forward-transform noise
  double recovery_dlog = 2e-5;        // acceptable log-argument perturbation
  double recovery_resolution = 1e-4;  // d/dT stencil truncation ceiling
  double neg_value_tol = 1e-8;        // negative time value tolerance (x spot)
  bool skip_pi_check = false;         // callers that already ran the precondition
};

// Modified option prices O(T, x), x = log(K / S_t).
struct ModifiedPriceSlice {
  double maturity = 0.0;
  double t = 0.0;  // valuation time
  std::vector<double> x;
  std::vector<double> value;
  double clipped_mass = 0.0;  // total negative mass clipped to 0
  int clipped_count = 0;
  double tail_bound = 0.0;    // bound on the neglected quadrature tail
};

// Call prices on a strike x maturity grid.
struct PriceSurface {
  double spot = 1.0;
  std::vector<double> strikes;
  std::vector<double> maturities;
  std::vector<double> call;  // row-major [maturity][strike]

  double& at(std::size_t jt, std::size_t jk) { return call[jt * strikes.size() + jk]; }
  double at(std::size_t jt, std::size_t jk) const { return call[jt * strikes.size() + jk]; }
  void validate() const;
};

using Cumulant = std::function<Complex(Complex)>;  // z -> int_t^T psi(r, z) dr

// Inverse transform of (1 - e^{cum}) / (u^2 + iu) via the alpha-damped
// identity; cum must be evaluable on the line Im z = -alpha.
ModifiedPriceSlice modified_from_cumulant(const Cumulant& cum, double t, double T,
                                          const std::vector<double>& xs,
                                          const PricingConfig& cfg = {});

// Grid route: cumulant known only at real grid frequencies. The u-tail is
// completed analytically (exact 1/(u^2+iu) tail plus a quadratically
// extrapolated e^{cum} extension); fails with a resolution error when the
// surface has not decayed by the extended edge.
ModifiedPriceSlice codebook_to_modified(const CodebookSurface& s, double t, double T,
                                        const PricingConfig& cfg = {});

// C(T,K) = (S-K)^+ + K O(T, log(K/S)); monotone-cubic interpolation in x.
std::vector<double> modified_to_calls(const ModifiedPriceSlice& o, double spot,
                                      const std::vector<double>& strikes,
                                      const PricingConfig& cfg = {});

// One-call pricer for closed-form cumulants.
std::vector<double> price_from_cumulant(const Cumulant& cum, double spot,
                                        const std::vector<double>& strikes, double T,
                                        const PricingConfig& cfg = {});

// Improper forward transform of a modified slice (uniform x-grid containing
// x = 0). The universal kink at x = 0 is split off through an analytic
// carrier so the quadrature only sees a C^3 integrand.
Complex modified_forward_transform(const ModifiedPriceSlice& o, double u);

struct CodebookRecovery {
  CodebookSurface psi;
  std::vector<std::uint8_t> ok;  // per cell, same layout as psi.values()
  std::size_t n_recovered = 0;
  std::size_t n_total = 0;
  bool cell_ok(int j, int k) const {
    return ok[static_cast<std::size_t>(j) * psi.grid().n_freq() + k] != 0;
  }
};

// Inverts the pricing pipeline: prices -> modified prices -> forward
// transform in x -> branch-tracked log -> d/dT. Cells where the log argument
// falls below cond_floor (or branch tracking fails) are flagged unrecovered.
CodebookRecovery surface_to_codebook_detailed(const PriceSurface& p, int n_half, double du,
                                              const PricingConfig& cfg = {});
CodebookSurface surface_to_codebook(const PriceSurface& p, int n_half = 800, double du = 0.05,
                                    const PricingConfig& cfg = {});

}  // namespace levycb

#endif
