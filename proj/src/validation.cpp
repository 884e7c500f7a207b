#include "levycb/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "levycb/rng.hpp"
#include "levycb/threads.hpp"

namespace levycb {

namespace {

const Complex kI(0.0, 1.0);

// Compound jump path of a general parametric spec (atoms may be negative);
// gamma-family small jumps are truncated and their mean returned as drift.
struct JumpPathSample {
  std::vector<std::pair<double, double>> jumps;
  double extra_drift = 0.0;
};

JumpPathSample sample_jump_path(const JumpSpec& spec, double horizon, RandomStream& rng) {
  JumpPathSample out;
  auto place = [&](double intensity, auto draw) {
    std::uint64_t n = rng.poisson(intensity * horizon);
    std::vector<double> times(n);
    for (auto& t : times) t = rng.uniform() * horizon;
    std::sort(times.begin(), times.end());
    for (double t : times) out.jumps.emplace_back(t, draw());
  };
  switch (spec.kind) {
    case JumpSpec::Kind::None:
      break;
    case JumpSpec::Kind::CompoundPoissonExp:
      if (spec.rate > 0.0)
        place(spec.rate, [&] { return rng.exponential(spec.theta); });
      break;
    case JumpSpec::Kind::CompoundPoissonDiscrete:
      if (spec.rate > 0.0)
        place(spec.rate, [&] {
          double u = rng.uniform(), acc = 0.0;
          for (const auto& a : spec.atoms) {
            acc += a.probability;
            if (u <= acc) return a.size;
          }
          return spec.atoms.back().size;
        });
      break;
    case JumpSpec::Kind::Gamma: {
      SubordinatorSimConfig c;
      double eps = c.small_jump_eps;
      double intensity = spec.shape * expint_e1(spec.rate * eps);
      out.extra_drift = spec.shape * (1.0 - std::exp(-spec.rate * eps)) / spec.rate;
      place(intensity, [&] { return gamma_jump_quantile(spec.rate, eps, rng.uniform()); });
      break;
    }
  }
  return out;
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_se(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

}  // namespace

std::size_t McPaths::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - t) < 1e-9) return i;
  throw SpecError("mc paths: time " + std::to_string(t) + " is not a saved time");
}

void McPaths::validate() const {
  const std::size_t nt = times.size();
  for (std::size_t p = 0; p < n_paths; ++p) {
    double prev_m = -1e-12;
    for (std::size_t i = 0; i < nt; ++i) {
      if (Z[p * nt + i] < -1e-12) throw SpecError("mc paths: negative variance factor");
      if (M[p * nt + i] < prev_m - 1e-12) throw SpecError("mc paths: M not nondecreasing");
      prev_m = M[p * nt + i];
    }
  }
}

double bns_variance_factor(const SubordinatorPath& path, double lambda, double t) {
  double z = 0.0;
  for (const auto& [tau, s] : path.jumps) {
    if (tau > t) break;
    z += s * std::exp(-lambda * (t - tau));
  }
  return z;
}

McPaths simulate_bns(const BnsParams& p, double horizon, std::uint64_t seed,
                     const McConfig& cfg) {
  p.validate();
  if (cfg.n_paths < 1) throw SpecError("simulate_bns: need at least one path");
  if (cfg.steps < 1) throw SpecError("simulate_bns: need at least one step");
  if (horizon <= 0.0) throw SpecError("simulate_bns: horizon must be > 0");

  McPaths out;
  out.seed = seed;
  out.steps = cfg.steps;
  out.n_paths = cfg.n_paths;
  out.x0 = p.x0;
  int save_points = std::min(cfg.save_points, cfg.steps);
  // Save stride in micro steps; the save grid is uniform.
  int stride = std::max(1, cfg.steps / std::max(1, save_points));
  std::vector<int> save_idx;
  for (int i = 0; i <= cfg.steps; i += stride) save_idx.push_back(i);
  if (save_idx.back() != cfg.steps) save_idx.push_back(cfg.steps);
  const double dt = horizon / cfg.steps;
  for (int i : save_idx) out.times.push_back(i * dt);
  const std::size_t nt = out.times.size();
  out.X.assign(out.n_paths * nt, 0.0);
  out.Z.assign(out.n_paths * nt, 0.0);
  out.M.assign(out.n_paths * nt, 0.0);

  const double eta_di = p.eta(Complex(0.0, -p.delta)).real();
  const LevyTriplet& lt = p.psiL.triplet();
  const double cL = lt.diffusion;
  const double kappaL = lt.jumps.exp_compensator();
  const double lambda = p.lambda;

  parallel_for(out.n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t pi = lo; pi < hi; ++pi) {
      RandomStream rng_l(seed, pi * 4 + 1);
      RandomStream rng_w(seed, pi * 4 + 2);

      SubordinatorPath mpath = simulate_subordinator(p.eta.triplet().jumps, horizon,
                                                     seed, pi * 4 + 0);
      JumpPathSample lpath = sample_jump_path(lt.jumps, horizon, rng_l);
      const double lDrift = -cL / 2.0 - kappaL + lpath.extra_drift;

      double X = p.x0, Z = 0.0, Mv = 0.0;
      std::size_t jm = 0, jl = 0, si = 0;
      auto apply_m_jump = [&](double size) {
        X += p.delta * size;
        Z += size;
        Mv += size;
      };
      for (int i = 0; i < cfg.steps; ++i) {
        if (si < save_idx.size() && save_idx[si] == i) {
          std::size_t base = pi * nt + si;
          out.X[base] = X;
          out.Z[base] = Z;
          out.M[base] = Mv;
          ++si;
        }
        double a = i * dt, b = (i + 1) * dt;
        // L increment over the whole micro step.
        double dL = lDrift * dt + (cL > 0.0 ? std::sqrt(cL * dt) * rng_l.normal() : 0.0);
        while (jl < lpath.jumps.size() && lpath.jumps[jl].first <= b + 1e-15) {
          dL += lpath.jumps[jl].second;
          ++jl;
        }
        X += dL;
        // Variance segments split exactly at the M jumps. Jumps that landed
        // exactly on the step boundary are consumed up front.
        while (jm < mpath.jumps.size() && mpath.jumps[jm].first <= a + 1e-15) {
          apply_m_jump(mpath.jumps[jm].second);
          ++jm;
        }
        double s0 = a;
        while (true) {
          double snext = b;
          double jump_size = 0.0;
          if (jm < mpath.jumps.size() && mpath.jumps[jm].first <= b + 1e-15) {
            snext = std::max(s0, std::min(b, mpath.jumps[jm].first));
            jump_size = mpath.jumps[jm].second;
          }
          double seg = snext - s0;
          if (seg > 1e-15) {
            double decay = std::exp(-lambda * seg);
            double zbar = lambda * seg > 1e-12 ? Z * (1.0 - decay) / (lambda * seg) : Z;
            X += -(0.5 * zbar + eta_di) * seg;
            if (zbar > 0.0) X += std::sqrt(zbar * seg) * rng_w.normal();
            Z *= decay;
          }
          if (jump_size > 0.0) {
            apply_m_jump(jump_size);
            ++jm;
          }
          s0 = snext;
          if (snext >= b - 1e-15 && jump_size == 0.0) break;
        }
      }
      std::size_t base = pi * nt + (nt - 1);
      out.X[base] = X;
      out.Z[base] = Z;
      out.M[base] = Mv;
    }
  });
  return out;
}

CheckReport check_conditional_expectation(const McPaths& paths, const CodebookSurface& s,
                                          double x0, const std::vector<double>& u_list,
                                          double T, double n_se) {
  CheckReport rep;
  std::size_t ti = paths.time_index(T);
  const std::size_t nt = paths.times.size();
  std::vector<double> re(paths.n_paths), im(paths.n_paths);
  for (double u : u_list) {
    Complex target = std::exp(integrate_maturity(s, 0.0, T, u));
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
      double dx = paths.X[p * nt + ti] - x0;
      re[p] = std::cos(u * dx);
      im[p] = std::sin(u * dx);
    }
    double mre = sample_mean(re), mim = sample_mean(im);
    double se_re = sample_se(re, mre), se_im = sample_se(im, mim);
    std::ostringstream n1, n2;
    n1 << "charfn re(u=" << u << ",T=" << T << ")";
    n2 << "charfn im(u=" << u << ",T=" << T << ")";
    double d_re = std::fabs(mre - target.real());
    double d_im = std::fabs(mim - target.imag());
    rep.entries.push_back({n1.str(), d_re, se_re, n_se * se_re, d_re <= n_se * se_re + 1e-14});
    rep.entries.push_back({n2.str(), d_im, se_im, n_se * se_im, d_im <= n_se * se_im + 1e-14});
  }
  return rep;
}

CheckReport check_martingale(const McPaths& paths, double x0, const CallPricer& price,
                             const std::vector<std::pair<double, double>>& maturity_strike,
                             double n_se) {
  CheckReport rep;
  const std::size_t nt = paths.times.size();
  std::vector<double> v(paths.n_paths);

  double T_last = paths.times.back();
  std::size_t t_last = nt - 1;
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    v[p] = std::exp(paths.X[p * nt + t_last]);
  double m = sample_mean(v);
  double se = sample_se(v, m);
  double d = std::fabs(m - std::exp(x0));
  std::ostringstream n0;
  n0 << "stock martingale E[exp(X_T)] (T=" << T_last << ")";
  rep.entries.push_back({n0.str(), d, se, n_se * se, d <= n_se * se + 1e-14});

  for (const auto& [T, K] : maturity_strike) {
    std::size_t ti = paths.time_index(T);
    for (std::size_t p = 0; p < paths.n_paths; ++p)
      v[p] = std::max(std::exp(paths.X[p * nt + ti]) - K, 0.0);
    double mp = sample_mean(v);
    double sep = sample_se(v, mp);
    double c = price(T, K);
    double dp = std::fabs(mp - c);
    std::ostringstream name;
    name << "call payoff vs price (T=" << T << ",K=" << K << ")";
    rep.entries.push_back({name.str(), dp, sep, n_se * sep, dp <= n_se * sep + 1e-14});
  }
  return rep;
}

CheckReport static_arbitrage_report(const PriceSurface& p, double tol_scale) {
  CheckReport rep;
  const double tol = tol_scale * p.spot;
  const std::size_t nK = p.strikes.size(), nT = p.maturities.size();
  double worst_mono = 0.0, worst_conv = 0.0, worst_bounds = 0.0, worst_cal = 0.0;
  std::size_t max_entries = 200;

  auto fail = [&](const std::string& name, double stat) {
    if (rep.entries.size() < max_entries)
      rep.entries.push_back({name, stat, 0.0, tol, false});
  };

  for (std::size_t jt = 0; jt < nT; ++jt) {
    for (std::size_t jk = 0; jk < nK; ++jk) {
      double c = p.at(jt, jk);
      double lo = std::max(p.spot - p.strikes[jk], 0.0);
      double excess = std::max(lo - c, c - p.spot);
      worst_bounds = std::max(worst_bounds, excess);
      if (excess > tol) {
        std::ostringstream n;
        n << "bounds (T=" << p.maturities[jt] << ",K=" << p.strikes[jk] << ")";
        fail(n.str(), excess);
      }
      if (jk + 1 < nK) {
        double inc = p.at(jt, jk + 1) - c;
        worst_mono = std::max(worst_mono, inc);
        if (inc > tol) {
          std::ostringstream n;
          n << "K-monotone (T=" << p.maturities[jt] << ",K=" << p.strikes[jk] << ")";
          fail(n.str(), inc);
        }
      }
      if (jk > 0 && jk + 1 < nK) {
        double w = (p.strikes[jk + 1] - p.strikes[jk]) /
                   (p.strikes[jk + 1] - p.strikes[jk - 1]);
        double hull = w * p.at(jt, jk - 1) + (1.0 - w) * p.at(jt, jk + 1);
        double conv = c - hull;
        worst_conv = std::max(worst_conv, conv);
        if (conv > tol) {
          std::ostringstream n;
          n << "K-convex (T=" << p.maturities[jt] << ",K=" << p.strikes[jk] << ")";
          fail(n.str(), conv);
        }
      }
    }
    if (jt + 1 < nT) {
      for (std::size_t jk = 0; jk < nK; ++jk) {
        double dec = p.at(jt, jk) - p.at(jt + 1, jk);
        worst_cal = std::max(worst_cal, dec);
        if (dec > tol) {
          std::ostringstream n;
          n << "calendar (T=" << p.maturities[jt] << "->" << p.maturities[jt + 1]
            << ",K=" << p.strikes[jk] << ")";
          fail(n.str(), dec);
        }
      }
    }
  }
  if (rep.entries.empty()) {
    rep.entries.push_back({"K-monotonicity", worst_mono, 0.0, tol, true});
    rep.entries.push_back({"K-convexity", worst_conv, 0.0, tol, true});
    rep.entries.push_back({"price bounds", worst_bounds, 0.0, tol, true});
    rep.entries.push_back({"calendar monotonicity", worst_cal, 0.0, tol, true});
  }
  return rep;
}

std::optional<double> tau_monitor(const Trajectory& traj, const JointExponent& gamma,
                                  double tol) {
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const CodebookSurface& psi = traj.states[i];
    const GridSpec& g = psi.grid();
    double t = traj.times[i];
    CodebookSurface eta = psi;
    for (int j = 0; j < g.n_mat; ++j) {
      if (g.maturity(j) > t + 1e-12) break;
      for (int k = 0; k < g.n_freq(); ++k) {
        if (k == g.n_half) continue;
        eta.at(j, k) -= gamma_eval(gamma, Complex(g.freq(k), 0.0), Complex(0.0, 0.0));
      }
    }
    if (!pi_necessary_check(eta, 0.0, tol).pass()) return t;
  }
  return std::nullopt;
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass();
  j["failures"] = failures();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"name", e.name},
                   {"statistic", e.statistic},
                   {"se", e.se},
                   {"threshold", e.threshold},
                   {"pass", e.pass}});
  }
  j["checks"] = arr;
  return j.dump(2);
}

std::string CheckReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(52) << "check" << std::right << std::setw(13) << "statistic"
     << std::setw(13) << "threshold" << std::setw(7) << "result" << "\n";
  for (const auto& e : entries) {
    os << std::left << std::setw(52) << e.name.substr(0, 51) << std::right
       << std::setw(13) << std::setprecision(4) << std::scientific << e.statistic
       << std::setw(13) << e.threshold << std::setw(7) << (e.pass ? "ok" : "FAIL") << "\n";
  }
  os << (pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
  return os.str();
}

}  // namespace levycb
