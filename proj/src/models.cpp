#include "levycb/models.hpp"

#include <cmath>

namespace levycb {

namespace {
const Complex kI(0.0, 1.0);

Complex phi_of(Complex u) { return -0.5 * (u * u + kI * u); }
}  // namespace

CodebookSurface black_scholes_codebook(double sigma, const GridSpec& grid) {
  if (sigma <= 0.0) throw SpecError("black_scholes_codebook: sigma must be > 0");
  double s2 = sigma * sigma;
  return CodebookSurface::from_exponent(
      grid, [s2](double, double u) { return phi_of(Complex(u, 0.0)) * s2; });
}

BuildingBlocks black_scholes_blocks(double sigma, double x0, const GridSpec& grid) {
  BuildingBlocks b;
  b.x0 = x0;
  b.psi0 = black_scholes_codebook(sigma, grid);
  b.vol = ZeroKernel{};
  b.gamma = ZeroGamma{};
  double s2 = sigma * sigma;
  b.psi0_closed = [s2](double, Complex u) { return phi_of(u) * s2; };
  return b;
}

BuildingBlocks pii_blocks(const CharExponent& psi0, double x0, const GridSpec& grid) {
  if (!psi0.pi_member())
    throw SpecError("pii_blocks: initial exponent must be in normalized form");
  BuildingBlocks b;
  b.x0 = x0;
  CharExponent e = psi0;
  b.psi0 = CodebookSurface::from_exponent(
      grid, [e](double, double u) { return e(Complex(u, 0.0)); });
  b.vol = ZeroKernel{};
  b.gamma = ZeroGamma{};
  b.psi0_closed = [e](double, Complex u) { return e(u); };
  return b;
}

CodebookSurface min_compatible_codebook(const VolKernel& vol, const JointExponent& gamma,
                                        const GridSpec& grid) {
  if (!kernel_deterministic(vol))
    throw SpecError("min_compatible_codebook: kernel must be deterministic");
  CodebookSurface mu(grid, 0.0, SurfaceMode::Maturity);
  for (int j = 0; j < grid.n_mat; ++j) {
    double T = grid.maturity(j);
    for (int k = 0; k < grid.n_freq(); ++k) {
      if (k == grid.n_half) continue;
      double u = grid.freq(k);
      Complex B = kernel_integral(vol, 0.0, T, u, nullptr);
      mu.at(j, k) = gamma_eval(gamma, Complex(u, 0.0), -kI * B);
    }
  }
  return mu;
}

void BnsParams::validate() const {
  if (lambda <= 0.0) throw SpecError("bns: lambda must be > 0");
  if (delta > 0.0) throw SpecError("bns: delta must be <= 0");
  if (!eta.is_subordinator() || eta.subordinator_drift() != 0.0)
    throw SpecError("bns: eta must be a pure-jump subordinator exponent");
  if (!psiL.pi_member()) throw SpecError("bns: psiL must be in normalized form");
}

CharExponent bns_phi() { return CharExponent::pi_form(1.0, JumpSpec::none()); }

Complex bns_psi0(const BnsParams& p, double T, Complex u) {
  Complex w = phi_of(u) * (1.0 - std::exp(-p.lambda * T)) / p.lambda;
  Complex eta_di = p.eta(Complex(0.0, -p.delta));
  return p.psiL(u) + p.eta(p.delta * u - kI * w) - kI * u * eta_di;
}

Complex bns_cumulant0(const BnsParams& p, double T, Complex u) {
  // int_0^T psi0(r, u) dr; the eta term is integrated by fixed-order
  // Gauss-Legendre (the integrand is smooth in r).
  Complex eta_di = p.eta(Complex(0.0, -p.delta));
  Complex acc = (p.psiL(u) - kI * u * eta_di) * T;
  static const GaussLegendre gl(48, 0.0, 1.0);
  Complex phi = phi_of(u);
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    double r = gl.nodes[q] * T;
    Complex w = phi * (1.0 - std::exp(-p.lambda * r)) / p.lambda;
    acc += gl.weights[q] * T * p.eta(p.delta * u - kI * w);
  }
  return acc;
}

Complex bns_closed_value(const BnsParams& p, double t, double Z_t, double T, Complex u) {
  // psi0 + int_0^t a(s)(T,u) ds + phi(u) e^{-lambda (T - t^T)} Z_{t^T}; the
  // drift integral collapses to a gamma difference for t <= T and freezes at
  // T afterwards.
  double tc = std::min(t, T);
  Complex phi = phi_of(u);
  Complex wT = phi * (1.0 - std::exp(-p.lambda * T)) / p.lambda;
  Complex wTt = phi * (1.0 - std::exp(-p.lambda * (T - tc))) / p.lambda;
  Complex drift_int = p.eta(p.delta * u - kI * wTt) - p.eta(p.delta * u - kI * wT);
  return bns_psi0(p, T, u) + drift_int + phi * std::exp(-p.lambda * (T - tc)) * Z_t;
}

BuildingBlocks bns_blocks(const BnsParams& p, const GridSpec& grid) {
  p.validate();
  BuildingBlocks b;
  b.x0 = p.x0;
  b.vol = ExpKernel{bns_phi(), p.lambda};
  b.gamma = bns_gamma(p.eta, p.delta);
  BnsParams cp = p;
  b.psi0 = CodebookSurface::from_exponent(
      grid, [cp](double T, double u) { return bns_psi0(cp, T, Complex(u, 0.0)); });
  b.psi0_closed = [cp](double T, Complex u) { return bns_psi0(cp, T, u); };
  b.validate();
  return b;
}

CodebookSurface bns_closed_codebook(const BnsParams& p, const GridSpec& grid,
                                    double t, double Z_t) {
  p.validate();
  if (Z_t < 0.0) throw SpecError("bns_closed_codebook: Z_t must be >= 0");
  CodebookSurface s = CodebookSurface::from_exponent(
      grid,
      [&](double T, double u) { return bns_closed_value(p, t, Z_t, T, Complex(u, 0.0)); },
      t);
  return s;
}

CodebookSurface bns_closed_codebook(const BnsParams& p, const GridSpec& grid,
                                    double t, const SubordinatorPath& path) {
  p.validate();
  CodebookSurface s = CodebookSurface::from_exponent(
      grid,
      [&](double T, double u) {
        double tc = std::min(t, T);
        double z = 0.0;
        for (const auto& [tau, sz] : path.jumps) {
          if (tau > tc) break;
          z += sz * std::exp(-p.lambda * (tc - tau));
        }
        return bns_closed_value(p, t, z, T, Complex(u, 0.0));
      },
      t);
  return s;
}

BuildingBlocks affine_blocks(const VolKernel& vol, const CharExponent& eta, double delta,
                             const CharExponent& psiL, double x0, const GridSpec& grid) {
  if (!kernel_deterministic(vol))
    throw SpecError("affine_blocks: kernel must be deterministic");
  if (!psiL.pi_member()) throw SpecError("affine_blocks: psiL must be in normalized form");
  BuildingBlocks b;
  b.x0 = x0;
  b.vol = vol;
  b.gamma = bns_gamma(eta, delta);
  b.psi0 = min_compatible_codebook(vol, b.gamma, grid);
  CharExponent pl = psiL;
  for (int j = 0; j < grid.n_mat; ++j)
    for (int k = 0; k < grid.n_freq(); ++k)
      if (k != grid.n_half) b.psi0.at(j, k) += pl(Complex(grid.freq(k), 0.0));
  b.validate();
  return b;
}

}  // namespace levycb
