#ifndef LEVYCB_DYNAMICS_HPP
#define LEVYCB_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "levycb/codebook.hpp"
#include "levycb/levy.hpp"

namespace levycb {

// One realized increasing pure-jump path plus an optional drift part (used by
// the gamma-family truncation compensation).
struct SubordinatorPath {
  double horizon = 0.0;
  double drift_rate = 0.0;
  std::vector<std::pair<double, double>> jumps;  // (time, size), times increasing

  void validate() const;
  double value(double t) const;  // M_t = drift_rate * t + sum of jumps up to t
};

// Exact compound-Poisson sampling; gamma subordinators drop jumps below
// eps and compensate their mean as drift.
struct SubordinatorSimConfig {
  double small_jump_eps = 1e-6;
};
SubordinatorPath simulate_subordinator(const JumpSpec& jumps, double horizon,
                                       std::uint64_t seed, std::uint64_t stream = 0,
                                       const SubordinatorSimConfig& cfg = {});

// Quantile of the eps-truncated gamma-family jump density e^{-rate x}/x on
// [eps, inf), solved on the E1 scale.
double gamma_jump_quantile(double rate, double eps, double u);

// Re <= 0 truncation: (Re b) ^ 0 + i Im b. Identity on admissible values.
inline Complex truncate_b(Complex v) {
  return Complex(std::min(v.real(), 0.0), v.imag());
}

// --------------------------------------------------------------------------
// Volatility kernels b(t, psi)(T, u)
// --------------------------------------------------------------------------

struct ZeroKernel {};

// b(t)(T,u) = phi(u) e^{-lambda (T-t)} 1_{t<=T}, phi a normalized exponent.
struct ExpKernel {
  CharExponent phi;
  double lambda = 1.0;
};

// Musiela-stationary table b_check(x_j, u_k) on its own grid, interpolated
// linearly in x.
struct TableKernel {
  GridSpec grid;
  std::vector<Complex> values;  // [x][u]
  Complex at(int j, int k) const { return values[static_cast<std::size_t>(j) * grid.n_freq() + k]; }
};

// State-dependent hook b(t, psi)(T, u).
struct StateKernel {
  std::function<Complex(double t, const CodebookSurface& psi, double T, double u)> fn;
};

using VolKernel = std::variant<ZeroKernel, ExpKernel, TableKernel, StateKernel>;

bool kernel_is_zero(const VolKernel& k);
bool kernel_deterministic(const VolKernel& k);

// Pointwise kernel value; psi may be null for deterministic kernels.
Complex kernel_eval(const VolKernel& k, double t, const CodebookSurface* psi,
                    double T, double u);

// B(t,T,u) = int_t^T btilde(t,.)(r,u) dr. Closed form for the exponential
// kernel, exact piecewise-linear integral for tables, trapezoid on the
// maturity grid for state-dependent kernels.
Complex kernel_integral(const VolKernel& k, double t, double T, double u,
                        const CodebookSurface* psi);

// --------------------------------------------------------------------------
// Building blocks and the codebook SDE
// --------------------------------------------------------------------------

struct BuildingBlocks {
  double x0 = 0.0;
  CodebookSurface psi0;
  VolKernel vol = ZeroKernel{};
  JointExponent gamma = ZeroGamma{};
  // Optional closed forms (set by model constructors): initial codebook and
  // its strip evaluation, used by pricing.
  std::function<Complex(double T, Complex u)> psi0_closed;

  void validate() const;
};

// a(t,psi)(T,u) = i d2gamma(u, -i B(t,T,u)) btilde(t,psi)(T,u) 1_{T>=t}.
CodebookSurface drift_a(const BuildingBlocks& blocks, double t, const CodebookSurface& psi);

struct EvolveConfig {
  double step = 0.01;    // uniform time-grid spacing (jump times are inserted)
  double tol = 1e-12;    // Picard stopping distance in ||.||_{T_N, u_M}
  int max_iter = 50;
};

struct Trajectory {
  std::vector<double> times;            // checkpoint times
  std::vector<CodebookSurface> states;  // post-jump states at the checkpoints
  int iterations = 0;                   // Picard sweeps used (1 = direct)
  double residual = 0.0;                // last Picard distance
};

// Fixed point of Phi(V)_t = psi0 + int_0^t a(s,V_{s-}) ds + sum b(s,V_{s-}) dM_s
// on the union of the uniform grid and the exact jump times. Deterministic
// kernels accumulate drift through exact gamma-increments; state-dependent
// kernels iterate with trapezoid drift until the seminorm distance drops
// below tol.
Trajectory evolve_picard(const BuildingBlocks& blocks, const SubordinatorPath& path,
                         double t_end, const std::vector<double>& checkpoints,
                         const EvolveConfig& cfg = {});

// Cross-check integrator: classical 4-stage steps between jumps, state jump
// b(t, psi_-) dM at each jump time.
Trajectory evolve_event_driven(const BuildingBlocks& blocks, const SubordinatorPath& path,
                               double t_end, const std::vector<double>& checkpoints,
                               const EvolveConfig& cfg = {});

}  // namespace levycb

#endif
