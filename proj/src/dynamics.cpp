#include "levycb/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "levycb/rng.hpp"

namespace levycb {

namespace {

const Complex kI(0.0, 1.0);

void add_scaled(CodebookSurface& dst, const CodebookSurface& src, Complex factor) {
  auto& d = dst.values();
  const auto& s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * s[i];
}

double max_abs_diff_seminorm(const CodebookSurface& a, const CodebookSurface& b) {
  CodebookSurface d = a;
  auto& dv = d.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= bv[i];
  return seminorm(d, d.grid().max_maturity(), d.grid().max_freq());
}

}  // namespace

double gamma_jump_quantile(double rate, double eps, double u) {
  double e1_eps = expint_e1(rate * eps);
  double target = e1_eps * (1.0 - u);
  double lo = eps, hi = eps;
  while (expint_e1(rate * hi) > target && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (expint_e1(rate * mid) > target) lo = mid; else hi = mid;
    if (hi - lo < 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Subordinator paths
// ---------------------------------------------------------------------------

void SubordinatorPath::validate() const {
  if (horizon < 0.0) throw SpecError("subordinator path: horizon must be >= 0");
  if (drift_rate < 0.0) throw SpecError("subordinator path: drift_rate must be >= 0");
  double prev = 0.0;
  for (const auto& [t, s] : jumps) {
    if (t <= prev || t > horizon + 1e-12)
      throw SpecError("subordinator path: jump times must be strictly increasing in (0, horizon]");
    if (s <= 0.0) throw SpecError("subordinator path: jump sizes must be > 0");
    prev = t;
  }
}

double SubordinatorPath::value(double t) const {
  double v = drift_rate * std::max(0.0, std::min(t, horizon));
  for (const auto& [tau, s] : jumps) {
    if (tau > t) break;
    v += s;
  }
  return v;
}

SubordinatorPath simulate_subordinator(const JumpSpec& jumps, double horizon,
                                       std::uint64_t seed, std::uint64_t stream,
                                       const SubordinatorSimConfig& cfg) {
  jumps.validate();
  if (!jumps.is_subordinator())
    throw SpecError("simulate_subordinator: spec has non-positive jumps");
  if (horizon < 0.0) throw SpecError("simulate_subordinator: horizon must be >= 0");

  SubordinatorPath path;
  path.horizon = horizon;
  RandomStream rng(seed, stream);

  auto place_poisson = [&](double intensity, auto draw_size) {
    std::uint64_t n = rng.poisson(intensity * horizon);
    std::vector<double> times(n);
    for (auto& t : times) t = rng.uniform() * horizon;
    std::sort(times.begin(), times.end());
    for (double t : times) path.jumps.emplace_back(t, draw_size());
  };

  switch (jumps.kind) {
    case JumpSpec::Kind::None:
      break;
    case JumpSpec::Kind::CompoundPoissonExp:
      if (jumps.rate > 0.0)
        place_poisson(jumps.rate, [&] { return rng.exponential(jumps.theta); });
      break;
    case JumpSpec::Kind::CompoundPoissonDiscrete:
      if (jumps.rate > 0.0)
        place_poisson(jumps.rate, [&] {
          double u = rng.uniform(), acc = 0.0;
          for (const auto& a : jumps.atoms) {
            acc += a.probability;
            if (u <= acc) return a.size;
          }
          return jumps.atoms.back().size;
        });
      break;
    case JumpSpec::Kind::Gamma: {
      double eps = cfg.small_jump_eps;
      double intensity = jumps.shape * expint_e1(jumps.rate * eps);
      path.drift_rate = jumps.shape * (1.0 - std::exp(-jumps.rate * eps)) / jumps.rate;
      place_poisson(intensity,
                    [&] { return gamma_jump_quantile(jumps.rate, eps, rng.uniform()); });
      break;
    }
  }

  // Nudge any coincident times apart to keep them strictly increasing.
  for (std::size_t i = 1; i < path.jumps.size(); ++i)
    if (path.jumps[i].first <= path.jumps[i - 1].first)
      path.jumps[i].first = std::nextafter(path.jumps[i - 1].first, horizon + 1.0);
  path.validate();
  return path;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

bool kernel_is_zero(const VolKernel& k) { return std::holds_alternative<ZeroKernel>(k); }

bool kernel_deterministic(const VolKernel& k) {
  return !std::holds_alternative<StateKernel>(k);
}

Complex kernel_eval(const VolKernel& k, double t, const CodebookSurface* psi,
                    double T, double u) {
  if (T < t) return Complex(0.0, 0.0);
  return std::visit(
      [&](const auto& m) -> Complex {
        using V = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<V, ZeroKernel>) {
          return Complex(0.0, 0.0);
        } else if constexpr (std::is_same_v<V, ExpKernel>) {
          return m.phi(Complex(u, 0.0)) * std::exp(-m.lambda * (T - t));
        } else if constexpr (std::is_same_v<V, TableKernel>) {
          int ku = m.grid.freq_index(u);
          if (ku < 0) throw SpecError("table kernel: u is not on the kernel grid");
          double x = T - t;
          int j = m.grid.maturity_floor(x);
          if (j >= m.grid.n_mat - 1) return m.at(m.grid.n_mat - 1, ku);
          double w = (x - m.grid.maturity(j)) / m.grid.dT;
          return (1.0 - w) * m.at(j, ku) + w * m.at(j + 1, ku);
        } else {
          if (!psi) throw SpecError("state kernel: needs the current codebook state");
          return m.fn(t, *psi, T, u);
        }
      },
      k);
}

Complex kernel_integral(const VolKernel& k, double t, double T, double u,
                        const CodebookSurface* psi) {
  if (T <= t) return Complex(0.0, 0.0);
  return std::visit(
      [&](const auto& m) -> Complex {
        using V = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<V, ZeroKernel>) {
          return Complex(0.0, 0.0);
        } else if constexpr (std::is_same_v<V, ExpKernel>) {
          Complex phi = truncate_b(m.phi(Complex(u, 0.0)));
          return phi * (1.0 - std::exp(-m.lambda * (T - t))) / m.lambda;
        } else if constexpr (std::is_same_v<V, TableKernel>) {
          // Exact integral of the (truncated) piecewise-linear table over
          // x in [0, T - t].
          int ku = m.grid.freq_index(u);
          if (ku < 0) throw SpecError("table kernel: u is not on the kernel grid");
          double len = T - t;
          Complex acc(0.0, 0.0);
          double a = 0.0;
          Complex va = truncate_b(m.at(0, ku));
          while (a < len - 1e-15) {
            int j = m.grid.maturity_floor(a + 1e-12);
            double b = std::min(len, m.grid.maturity(j + 1));
            double wb = (b - m.grid.maturity(j)) / m.grid.dT;
            Complex vb = (j >= m.grid.n_mat - 1)
                             ? truncate_b(m.at(m.grid.n_mat - 1, ku))
                             : truncate_b((1.0 - wb) * m.at(j, ku) + wb * m.at(j + 1, ku));
            acc += 0.5 * (b - a) * (va + vb);
            a = b;
            va = vb;
          }
          return acc;
        } else {
          if (!psi) throw SpecError("state kernel: needs the current codebook state");
          const GridSpec& g = psi->grid();
          Complex acc(0.0, 0.0);
          double a = std::max(t, 0.0);
          Complex va = truncate_b(m.fn(t, *psi, a, u));
          while (a < T - 1e-15) {
            int j = g.maturity_floor(a + 1e-12);
            double b = std::min(T, g.maturity(j + 1));
            Complex vb = truncate_b(m.fn(t, *psi, b, u));
            acc += 0.5 * (b - a) * (va + vb);
            a = b;
            va = vb;
          }
          return acc;
        }
      },
      k);
}

// ---------------------------------------------------------------------------
// Drift field
// ---------------------------------------------------------------------------

void BuildingBlocks::validate() const {
  psi0.grid().validate();
  PiCheckReport rep = pi_necessary_check(psi0, 0.0);
  if (!rep.pass())
    throw SpecError("building blocks: psi0 fails the necessary membership check (worst excess " +
                    std::to_string(rep.worst) + ")");
}

namespace {

// Drift field with cells T_j < active_min zeroed; active_min = t reproduces
// the public drift_a contract.
CodebookSurface drift_field(const BuildingBlocks& blocks, double t,
                            const CodebookSurface& psi, double active_min) {
  const GridSpec& g = psi.grid();
  CodebookSurface a(g, t, psi.mode());
  for (int j = 0; j < g.n_mat; ++j) {
    double T = g.maturity(j);
    if (T < active_min - 1e-12) continue;
    for (int k = 0; k < g.n_freq(); ++k) {
      if (k == g.n_half) continue;  // pinned u = 0 column
      double u = g.freq(k);
      Complex B = kernel_integral(blocks.vol, t, T, u, &psi);
      assert(-B.real() >= -1e-12 && "truncation keeps -iB in the upper half-plane");
      Complex btil = truncate_b(kernel_eval(blocks.vol, t, &psi, T, u));
      a.at(j, k) = kI * gamma_d2(blocks.gamma, Complex(u, 0.0), -kI * B) * btil;
    }
  }
  return a;
}

// Exact drift accumulation for deterministic Musiela-stationary kernels:
// int_{t1}^{t2} a(s)(T,u) ds = gamma(u, -i B(t2^T, T, u)) - gamma(u, -i B(t1^T, T, u)).
void add_drift_exact(const BuildingBlocks& blocks, double t1, double t2,
                     CodebookSurface& psi) {
  const GridSpec& g = psi.grid();
  for (int j = 0; j < g.n_mat; ++j) {
    double T = g.maturity(j);
    double a = std::min(t1, T), b = std::min(t2, T);
    if (b <= a) continue;
    for (int k = 0; k < g.n_freq(); ++k) {
      if (k == g.n_half) continue;
      double u = g.freq(k);
      Complex Ba = kernel_integral(blocks.vol, a, T, u, nullptr);
      Complex Bb = kernel_integral(blocks.vol, b, T, u, nullptr);
      psi.at(j, k) += gamma_eval(blocks.gamma, Complex(u, 0.0), -kI * Bb) -
                      gamma_eval(blocks.gamma, Complex(u, 0.0), -kI * Ba);
    }
  }
}

void add_jump(const BuildingBlocks& blocks, double tau, const CodebookSurface& pre,
              CodebookSurface& psi, double dM) {
  const GridSpec& g = psi.grid();
  for (int j = 0; j < g.n_mat; ++j) {
    double T = g.maturity(j);
    if (T < tau) continue;
    for (int k = 0; k < g.n_freq(); ++k) {
      if (k == g.n_half) continue;
      psi.at(j, k) += kernel_eval(blocks.vol, tau, &pre, T, g.freq(k)) * dM;
    }
  }
}

struct TimeGrid {
  std::vector<double> times;
  std::vector<double> jump_size;  // 0 where no jump
};

TimeGrid build_time_grid(const BuildingBlocks& blocks, const SubordinatorPath& path,
                         double t_end, const std::vector<double>& checkpoints,
                         double step) {
  std::vector<double> ts{0.0, t_end};
  for (long k = 1; k * step < t_end - 1e-12; ++k) ts.push_back(k * step);
  const GridSpec& g = blocks.psi0.grid();
  for (int j = 0; j < g.n_mat; ++j) {
    double T = g.maturity(j);
    if (T > 0.0 && T < t_end) ts.push_back(T);
  }
  for (double c : checkpoints) {
    if (c < -1e-12 || c > t_end + 1e-12)
      throw SpecError("evolve: checkpoint outside [0, t_end]");
    ts.push_back(std::clamp(c, 0.0, t_end));
  }
  for (const auto& [tau, sz] : path.jumps) {
    (void)sz;
    if (tau > 0.0 && tau <= t_end) ts.push_back(tau);
  }
  std::sort(ts.begin(), ts.end());
  TimeGrid tg;
  for (double t : ts)
    if (tg.times.empty() || t - tg.times.back() > 1e-12) tg.times.push_back(t);
  tg.jump_size.assign(tg.times.size(), 0.0);
  for (const auto& [tau, sz] : path.jumps) {
    if (tau <= 0.0 || tau > t_end) continue;
    auto it = std::lower_bound(tg.times.begin(), tg.times.end(), tau - 1e-12);
    std::size_t idx = static_cast<std::size_t>(it - tg.times.begin());
    tg.jump_size[idx] += sz;
  }
  return tg;
}

std::vector<double> sorted_checkpoints(const std::vector<double>& checkpoints, double t_end) {
  std::vector<double> cks = checkpoints;
  if (cks.empty()) cks.push_back(t_end);
  std::sort(cks.begin(), cks.end());
  return cks;
}

void record_checkpoints(Trajectory& traj, const std::vector<double>& cks,
                        double t, const CodebookSurface& state, std::size_t& next) {
  while (next < cks.size() && cks[next] <= t + 1e-12) {
    CodebookSurface s = state;
    s.set_time(cks[next]);
    traj.times.push_back(cks[next]);
    traj.states.push_back(std::move(s));
    ++next;
  }
}

}  // namespace

CodebookSurface drift_a(const BuildingBlocks& blocks, double t, const CodebookSurface& psi) {
  if (t > psi.grid().max_maturity() + 1e-12)
    throw SpecError("drift_a: t beyond the maturity grid");
  return drift_field(blocks, t, psi, t);
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

Trajectory evolve_picard(const BuildingBlocks& blocks, const SubordinatorPath& path,
                         double t_end, const std::vector<double>& checkpoints,
                         const EvolveConfig& cfg) {
  if (path.horizon < t_end - 1e-12)
    throw SpecError("evolve: path horizon shorter than t_end");
  blocks.validate();
  TimeGrid tg = build_time_grid(blocks, path, t_end, checkpoints, cfg.step);
  std::vector<double> cks = sorted_checkpoints(checkpoints, t_end);

  Trajectory traj;

  if (kernel_deterministic(blocks.vol)) {
    // Phi does not depend on the iterate; one exact sweep.
    CodebookSurface psi = blocks.psi0;
    std::size_t next_ck = 0;
    record_checkpoints(traj, cks, 0.0, psi, next_ck);
    for (std::size_t i = 0; i + 1 < tg.times.size(); ++i) {
      double t1 = tg.times[i], t2 = tg.times[i + 1];
      add_drift_exact(blocks, t1, t2, psi);
      if (tg.jump_size[i + 1] > 0.0) add_jump(blocks, t2, psi, psi, tg.jump_size[i + 1]);
      psi.set_time(t2);
      record_checkpoints(traj, cks, t2, psi, next_ck);
    }
    traj.iterations = 1;
    traj.residual = 0.0;
    return traj;
  }

  // State-dependent kernel: iterate the discrete fixed point.
  const std::size_t n = tg.times.size();
  std::vector<CodebookSurface> pre(n, blocks.psi0), post(n, blocks.psi0);
  double residual = 0.0;
  int it = 0;
  for (it = 1; it <= cfg.max_iter; ++it) {
    std::vector<CodebookSurface> new_pre(n, blocks.psi0), new_post(n, blocks.psi0);
    CodebookSurface acc = blocks.psi0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double t1 = tg.times[i], t2 = tg.times[i + 1];
      CodebookSurface a1 = drift_field(blocks, t1, post[i], t2);
      CodebookSurface a2 = drift_field(blocks, t2, pre[i + 1], t2);
      add_scaled(acc, a1, 0.5 * (t2 - t1));
      add_scaled(acc, a2, 0.5 * (t2 - t1));
      new_pre[i + 1] = acc;
      new_pre[i + 1].set_time(t2);
      if (tg.jump_size[i + 1] > 0.0)
        add_jump(blocks, t2, pre[i + 1], acc, tg.jump_size[i + 1]);
      new_post[i + 1] = acc;
      new_post[i + 1].set_time(t2);
    }
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, max_abs_diff_seminorm(new_post[i], post[i]));
    pre = std::move(new_pre);
    post = std::move(new_post);
    if (residual < cfg.tol) break;
  }
  if (residual >= cfg.tol)
    throw NumericalError("evolve_picard: no convergence after " +
                         std::to_string(cfg.max_iter) +
                         " iterations (residual " + std::to_string(residual) + ")");

  std::size_t next_ck = 0;
  for (std::size_t i = 0; i < n; ++i) record_checkpoints(traj, cks, tg.times[i], post[i], next_ck);
  traj.iterations = it;
  traj.residual = residual;
  return traj;
}

Trajectory evolve_event_driven(const BuildingBlocks& blocks, const SubordinatorPath& path,
                               double t_end, const std::vector<double>& checkpoints,
                               const EvolveConfig& cfg) {
  if (path.horizon < t_end - 1e-12)
    throw SpecError("evolve: path horizon shorter than t_end");
  blocks.validate();
  if (cfg.step <= 1e-12) throw NumericalError("evolve_event_driven: step underflow");
  TimeGrid tg = build_time_grid(blocks, path, t_end, checkpoints, cfg.step);
  std::vector<double> cks = sorted_checkpoints(checkpoints, t_end);

  Trajectory traj;
  CodebookSurface psi = blocks.psi0;
  std::size_t next_ck = 0;
  record_checkpoints(traj, cks, 0.0, psi, next_ck);

  for (std::size_t i = 0; i + 1 < tg.times.size(); ++i) {
    double t1 = tg.times[i], t2 = tg.times[i + 1];
    double h = t2 - t1;
    if (h > 1e-14) {
      // Classical 4-stage step; cells with T < t2 are inactive on [t1, t2].
      CodebookSurface k1 = drift_field(blocks, t1, psi, t2);
      CodebookSurface s2 = psi;
      add_scaled(s2, k1, 0.5 * h);
      CodebookSurface k2 = drift_field(blocks, t1 + 0.5 * h, s2, t2);
      CodebookSurface s3 = psi;
      add_scaled(s3, k2, 0.5 * h);
      CodebookSurface k3 = drift_field(blocks, t1 + 0.5 * h, s3, t2);
      CodebookSurface s4 = psi;
      add_scaled(s4, k3, h);
      CodebookSurface k4 = drift_field(blocks, t2, s4, t2);
      add_scaled(psi, k1, h / 6.0);
      add_scaled(psi, k2, h / 3.0);
      add_scaled(psi, k3, h / 3.0);
      add_scaled(psi, k4, h / 6.0);
    }
    if (tg.jump_size[i + 1] > 0.0) {
      CodebookSurface pre = psi;
      add_jump(blocks, t2, pre, psi, tg.jump_size[i + 1]);
    }
    psi.set_time(t2);
    record_checkpoints(traj, cks, t2, psi, next_ck);
  }
  traj.iterations = 1;
  return traj;
}

}  // namespace levycb
