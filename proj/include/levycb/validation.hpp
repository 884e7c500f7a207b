#ifndef LEVYCB_VALIDATION_HPP
#define LEVYCB_VALIDATION_HPP

#include <functional>
#include <optional>
#include <string>

#include "levycb/models.hpp"
#include "levycb/pricing.hpp"

namespace levycb {

// Simulated (X, Z, M) at the save times, row-major [path][time].
struct McPaths {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> X, Z, M;
  std::uint64_t seed = 0;
  int steps = 0;
  double x0 = 0.0;

  double at(const std::vector<double>& a, std::size_t p, std::size_t ti) const {
    return a[p * times.size() + ti];
  }
  std::size_t time_index(double t) const;
  void validate() const;  // Z >= 0, M nondecreasing
};

struct McConfig {
  std::size_t n_paths = 100000;
  int steps = 100;           // micro steps over the horizon
  int save_points = 20;      // save-grid intervals (times.size() == save_points+1)
};

// Exact-decay scheme for the variance factor, interval-exact average variance
// in both the drift and the diffusion term, jumps placed exactly.
McPaths simulate_bns(const BnsParams& p, double horizon, std::uint64_t seed,
                     const McConfig& cfg = {});

// Variance factor of a realized driver path: Z_t = sum e^{-lambda (t-s)} dM_s.
double bns_variance_factor(const SubordinatorPath& path, double lambda, double t);

struct CheckEntry {
  std::string name;
  double statistic = 0.0;
  double se = 0.0;         // standard error (0 for deterministic checks)
  double threshold = 0.0;
  bool pass = true;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += !e.pass;
    return n;
  }
  std::string to_json() const;
  std::string table() const;
};

// Sample mean of e^{iu (X_T - x0)} against exp(int_0^T Psi_0(r,u) dr),
// componentwise within 3 standard errors.
CheckReport check_conditional_expectation(const McPaths& paths, const CodebookSurface& s,
                                          double x0, const std::vector<double>& u_list,
                                          double T, double n_se = 3.0);

// e^{X_T} vs e^{x0}, and discounted payoff means vs model call prices.
using CallPricer = std::function<double(double T, double K)>;
CheckReport check_martingale(const McPaths& paths, double x0, const CallPricer& price,
                             const std::vector<std::pair<double, double>>& maturity_strike,
                             double n_se = 3.0);

// Static no-arbitrage audit: strike monotonicity/convexity, price bounds and
// calendar monotonicity, all with tolerance tol_scale * spot.
CheckReport static_arbitrage_report(const PriceSurface& p, double tol_scale = 1e-8);

// First checkpoint at which the shifted field eta_t = Psi_t - gamma(u,0) 1_{T<=t}
// fails the necessary membership conditions; nullopt if none does.
std::optional<double> tau_monitor(const Trajectory& traj, const JointExponent& gamma,
                                  double tol = 1e-8);

}  // namespace levycb

#endif
