#ifndef LEVYCB_MODELS_HPP
#define LEVYCB_MODELS_HPP

#include "levycb/dynamics.hpp"

namespace levycb {

// psi0(T, u) = -(u^2 + iu) sigma^2 / 2, constant in T.
CodebookSurface black_scholes_codebook(double sigma, const GridSpec& grid);
BuildingBlocks black_scholes_blocks(double sigma, double x0, const GridSpec& grid);

// Vanishing-beta blocks around an arbitrary normalized exponent.
BuildingBlocks pii_blocks(const CharExponent& psi0, double x0, const GridSpec& grid);

// mu(T, u) = gamma(u, -i int_0^T bcheck(r, u) dr) for a deterministic
// Musiela-stationary kernel; adding any admissible surface to it yields an
// admissible initial codebook.
CodebookSurface min_compatible_codebook(const VolKernel& vol, const JointExponent& gamma,
                                        const GridSpec& grid);

struct BnsParams {
  double lambda = 1.0;    // mean reversion > 0
  double delta = 0.0;     // leverage <= 0
  CharExponent eta;       // pure-jump subordinator exponent
  CharExponent psiL;      // normalized exponent of the independent part
  double x0 = 0.0;

  void validate() const;
};

// phi(u) = -(u^2 + iu)/2 as a normalized exponent (diffusion 1, no jumps).
CharExponent bns_phi();

// Closed forms from the affine family: initial codebook, its maturity
// integral, and the full codebook state given the variance factor Z_t.
Complex bns_psi0(const BnsParams& p, double T, Complex u);
Complex bns_cumulant0(const BnsParams& p, double T, Complex u);
Complex bns_closed_value(const BnsParams& p, double t, double Z_t, double T, Complex u);

BuildingBlocks bns_blocks(const BnsParams& p, const GridSpec& grid);

// Exact codebook state given the current variance factor. Rows with T < t
// are frozen at their time-T values, which depend on Z_T rather than Z_t;
// the scalar version fills them with Z_t and is exact only on T >= t, the
// path-aware overload is exact everywhere.
CodebookSurface bns_closed_codebook(const BnsParams& p, const GridSpec& grid,
                                    double t, double Z_t);
CodebookSurface bns_closed_codebook(const BnsParams& p, const GridSpec& grid,
                                    double t, const SubordinatorPath& path);

// Deterministic-kernel blocks with psi0 = min-compatible codebook + psiL.
BuildingBlocks affine_blocks(const VolKernel& vol, const CharExponent& eta, double delta,
                             const CharExponent& psiL, double x0, const GridSpec& grid);

}  // namespace levycb

#endif
