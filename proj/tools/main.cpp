// Batch front-end for the option-surface codebook library: config-driven
// pricing, codebook evolution, risk-neutrality checks and round trips.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "levycb/io.hpp"
#include "levycb/validation.hpp"

namespace fs = std::filesystem;
using namespace levycb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;  // deterministic default
  std::string solver = "picard";
  std::string checks;  // comma list; empty = all applicable
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> doubles_from(const Json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

// Per-maturity pricer: closed-form cumulant when the model has one, grid
// route through the initial codebook otherwise.
std::vector<double> price_maturity(const ParsedModel& m, double T,
                                   const std::vector<double>& strikes, double spot,
                                   std::vector<ModifiedPriceSlice>* slices) {
  if (m.cumulant0) {
    auto cum = [&](Complex z) { return m.cumulant0(T, z); };
    if (slices) {
      std::vector<double> xs(strikes.size());
      for (std::size_t i = 0; i < strikes.size(); ++i) xs[i] = std::log(strikes[i] / spot);
      slices->push_back(modified_from_cumulant(cum, 0.0, T, xs));
    }
    return price_from_cumulant(cum, spot, strikes, T);
  }
  ModifiedPriceSlice o = codebook_to_modified(m.blocks.psi0, 0.0, T);
  std::vector<double> calls = modified_to_calls(o, spot, strikes);
  if (slices) slices->push_back(std::move(o));
  return calls;
}

PriceSurface price_surface(const ParsedModel& m, const std::vector<double>& maturities,
                           const std::vector<double>& strikes,
                           std::vector<ModifiedPriceSlice>* slices) {
  PriceSurface p;
  p.spot = std::exp(m.x0);
  p.strikes = strikes;
  p.maturities = maturities;
  p.call.resize(strikes.size() * maturities.size());
  for (std::size_t jt = 0; jt < maturities.size(); ++jt) {
    std::vector<double> row = price_maturity(m, maturities[jt], strikes, p.spot, slices);
    for (std::size_t jk = 0; jk < strikes.size(); ++jk) p.at(jt, jk) = row[jk];
  }
  return p;
}

int cmd_price(const CommonArgs& args) {
  Json cfg = parse_config_file(args.config);
  require_keys(cfg, {"model", "strikes", "maturities"}, "price config");
  ParsedModel m = parse_model(cfg.at("model"));
  std::vector<double> strikes = doubles_from(cfg.at("strikes"), "strikes");
  std::vector<double> maturities = doubles_from(cfg.at("maturities"), "maturities");

  std::vector<ModifiedPriceSlice> slices;
  PriceSurface p = price_surface(m, maturities, strikes, &slices);
  p.validate();

  fs::path out(args.out);
  write_price_csv(p, out / "prices.csv", out / "prices.json");
  write_modified_csv(slices, out / "modified.csv");
  std::cout << "wrote " << (out / "prices.csv").string() << " ("
            << maturities.size() << " maturities x " << strikes.size() << " strikes)\n";
  return kExitOk;
}

int cmd_evolve(const CommonArgs& args) {
  Json cfg = parse_config_file(args.config);
  require_keys(cfg, {"model", "horizon", "checkpoints", "step", "tol", "max_iter"},
               "evolve config");
  ParsedModel m = parse_model(cfg.at("model"));
  double horizon = cfg.at("horizon").get<double>();
  std::vector<double> checkpoints =
      cfg.contains("checkpoints") ? doubles_from(cfg.at("checkpoints"), "checkpoints")
                                  : std::vector<double>{horizon};
  EvolveConfig ecfg;
  ecfg.step = cfg.value("step", ecfg.step);
  ecfg.tol = cfg.value("tol", ecfg.tol);
  ecfg.max_iter = cfg.value("max_iter", ecfg.max_iter);

  JumpSpec driver = m.bns ? m.bns->eta.triplet().jumps : JumpSpec::none();
  SubordinatorPath path = simulate_subordinator(driver, horizon, args.seed);

  bool run_picard = args.solver == "picard" || args.solver == "both";
  bool run_event = args.solver == "event" || args.solver == "both";
  if (!run_picard && !run_event)
    throw ConfigError("--solver must be picard, event or both");

  Trajectory tp, te;
  if (run_picard) tp = evolve_picard(m.blocks, path, horizon, checkpoints, ecfg);
  if (run_event) te = evolve_event_driven(m.blocks, path, horizon, checkpoints, ecfg);
  const Trajectory& primary = run_picard ? tp : te;

  fs::path out(args.out);
  Json manifest;
  manifest["seed"] = args.seed;
  manifest["solver"] = args.solver;
  manifest["times"] = primary.times;
  manifest["path"] = {{"jumps", path.jumps.size()},
                      {"drift_rate", path.drift_rate},
                      {"terminal", path.value(horizon)}};
  if (run_picard) {
    manifest["picard"] = {{"iterations", tp.iterations}, {"residual", tp.residual}};
  }
  if (run_picard && run_event) {
    double agree = 0.0;
    for (std::size_t i = 0; i < tp.states.size(); ++i) {
      const auto& a = tp.states[i].values();
      const auto& b = te.states[i].values();
      for (std::size_t c = 0; c < a.size(); ++c)
        agree = std::max(agree, std::abs(a[c] - b[c]));
    }
    manifest["solver_agreement_sup"] = agree;
    std::cout << "solver agreement (sup-norm): " << agree << "\n";
  }
  for (std::size_t i = 0; i < primary.times.size(); ++i) {
    std::string stem = "checkpoint_" + std::to_string(i);
    write_codebook_csv(primary.states[i], out / (stem + ".csv"), out / (stem + ".json"));
  }
  atomic_write(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << primary.times.size() << " checkpoints to " << out.string() << "\n";
  return kExitOk;
}

int cmd_check(const CommonArgs& args) {
  Json cfg = parse_config_file(args.config);
  require_keys(cfg,
               {"model", "mc", "u_list", "call_checks", "surface_csv", "surface_sidecar",
                "horizon", "tau_horizon"},
               "check config");
  std::vector<std::string> selected = split_list(args.checks);
  auto wants = [&](const std::string& name) {
    if (selected.empty()) return true;
    for (const auto& s : selected)
      if (s == name) return true;
    return false;
  };

  CheckReport combined;
  std::optional<ParsedModel> model;
  if (cfg.contains("model")) model = parse_model(cfg.at("model"));

  McConfig mc;
  double horizon = cfg.value("horizon", 1.0);
  if (cfg.contains("mc")) {
    const Json& mj = cfg.at("mc");
    require_keys(mj, {"n_paths", "steps", "save_points"}, "check.mc");
    mc.n_paths = mj.value("n_paths", mc.n_paths);
    mc.steps = mj.value("steps", mc.steps);
    mc.save_points = mj.value("save_points", mc.save_points);
  }

  bool mc_selected = !selected.empty() && (wants("conditional_expectation") || wants("martingale"));
  bool need_mc = wants("conditional_expectation") || wants("martingale");
  std::optional<McPaths> paths;
  if (need_mc && model && model->bns) {
    paths = simulate_bns(*model->bns, horizon, args.seed, mc);
    paths->validate();
  } else if (need_mc && model) {
    throw ConfigError("check: Monte Carlo checks need a bs, pii or bns model");
  } else if (mc_selected && !model) {
    throw ConfigError("check: Monte Carlo checks need a model config");
  }

  if (wants("conditional_expectation") && paths) {
    std::vector<double> us = cfg.contains("u_list")
                                 ? doubles_from(cfg.at("u_list"), "u_list")
                                 : std::vector<double>{0.5, 1.0, 2.0};
    CheckReport r = check_conditional_expectation(*paths, model->blocks.psi0, model->x0,
                                                  us, horizon);
    combined.entries.insert(combined.entries.end(), r.entries.begin(), r.entries.end());
  }

  if (wants("martingale") && paths) {
    std::vector<std::pair<double, double>> tk;
    if (cfg.contains("call_checks")) {
      for (const auto& e : cfg.at("call_checks"))
        tk.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    } else {
      double s = std::exp(model->x0);
      for (double T : {0.25 * horizon, 0.5 * horizon, horizon})
        for (double K : {0.9 * s, s, 1.1 * s}) tk.emplace_back(T, K);
    }
    // Snap the requested maturities onto the save grid.
    for (auto& [T, K] : tk) {
      (void)K;
      T = *std::min_element(paths->times.begin(), paths->times.end(),
                            [&](double a, double b) {
                              return std::fabs(a - T) < std::fabs(b - T);
                            });
    }
    const ParsedModel& m = *model;
    CallPricer pricer = [&m](double T, double K) {
      auto cum = [&](Complex z) { return m.cumulant0(T, z); };
      return price_from_cumulant(cum, std::exp(m.x0), {K}, T)[0];
    };
    CheckReport r = check_martingale(*paths, model->x0, pricer, tk);
    combined.entries.insert(combined.entries.end(), r.entries.begin(), r.entries.end());
  }

  if (wants("static_arbitrage")) {
    std::optional<PriceSurface> surf;
    if (cfg.contains("surface_csv")) {
      surf = read_price_csv(cfg.at("surface_csv").get<std::string>(),
                            cfg.value("surface_sidecar", std::string{}));
    } else if (model) {
      double s = std::exp(model->x0);
      std::vector<double> strikes, mats{0.0};
      for (int i = 0; i <= 20; ++i)
        strikes.push_back(s * std::exp(std::log(0.5) + i * (std::log(2.0) - std::log(0.5)) / 20.0));
      for (double T : {0.25 * horizon, 0.5 * horizon, horizon}) mats.push_back(T);
      surf = price_surface(*model, mats, strikes, nullptr);
    }
    if (surf) {
      CheckReport r = static_arbitrage_report(*surf);
      combined.entries.insert(combined.entries.end(), r.entries.begin(), r.entries.end());
    }
  }

  if (wants("tau") && model) {
    double th = cfg.value("tau_horizon", std::min(horizon, model->grid.max_maturity()));
    JumpSpec driver = model->bns ? model->bns->eta.triplet().jumps : JumpSpec::none();
    SubordinatorPath path = simulate_subordinator(driver, th, args.seed);
    std::vector<double> cks;
    for (int i = 0; i <= 10; ++i) cks.push_back(th * i / 10.0);
    Trajectory traj = evolve_picard(model->blocks, path, th, cks);
    std::optional<double> tau = tau_monitor(traj, model->blocks.gamma);
    CheckEntry e;
    e.name = "tau breakdown monitor";
    e.statistic = tau.value_or(-1.0);
    e.threshold = 0.0;
    e.pass = !tau.has_value();
    combined.entries.push_back(e);
    std::cout << "tau: " << (tau ? std::to_string(*tau) : std::string("none")) << "\n";
  }

  if (combined.entries.empty())
    throw ConfigError("check: nothing to check (no model or surface input matched the selection)");

  fs::path out(args.out);
  atomic_write(out / "report.json", combined.to_json() + "\n");
  std::cout << combined.table();
  return combined.pass() ? kExitOk : kExitCheckFailed;
}

int cmd_roundtrip(const CommonArgs& args) {
  Json cfg = parse_config_file(args.config);
  require_keys(cfg, {"model", "dx", "x_half_width"}, "roundtrip config");
  ParsedModel m = parse_model(cfg.at("model"));
  PricingConfig pc;
  pc.dx = cfg.value("dx", 0.01);
  double xw = cfg.value("x_half_width", 2.0);
  pc.x_pad = xw;
  double spot = std::exp(m.x0);

  const GridSpec& g = m.grid;
  std::vector<double> strikes;
  int nsteps = static_cast<int>(std::ceil(xw / pc.dx));
  for (int i = -nsteps; i <= nsteps; ++i) strikes.push_back(spot * std::exp(i * pc.dx));

  std::vector<double> maturities;
  for (int j = 0; j < g.n_mat; ++j) maturities.push_back(g.maturity(j));

  PriceSurface p;
  p.spot = spot;
  p.strikes = strikes;
  p.maturities = maturities;
  p.call.resize(strikes.size() * maturities.size());
  for (int j = 0; j < g.n_mat; ++j) {
    double T = g.maturity(j);
    if (T <= 0.0) {
      for (std::size_t jk = 0; jk < strikes.size(); ++jk)
        p.at(j, jk) = std::max(spot - strikes[jk], 0.0);
      continue;
    }
    ModifiedPriceSlice o = codebook_to_modified(m.blocks.psi0, 0.0, T, pc);
    std::vector<double> row = modified_to_calls(o, spot, strikes, pc);
    for (std::size_t jk = 0; jk < strikes.size(); ++jk) p.at(j, jk) = row[jk];
  }

  CodebookRecovery rec = surface_to_codebook_detailed(p, g.n_half, g.du, pc);
  double max_err = 0.0;
  std::size_t compared = 0;
  for (int j = 1; j < g.n_mat - 1; ++j)
    for (int k = 0; k < g.n_freq(); ++k) {
      if (!rec.cell_ok(j, k)) continue;
      max_err = std::max(max_err, std::abs(rec.psi.at(j, k) - m.blocks.psi0.at(j, k)));
      ++compared;
    }

  fs::path out(args.out);
  Json rep;
  rep["max_interior_abs_error"] = max_err;
  rep["recovered_interior_cells"] = compared;
  rep["recovered_cells_total"] = rec.n_recovered;
  rep["grid_cells_total"] = rec.n_total;
  write_codebook_csv(rec.psi, out / "recovered_codebook.csv", out / "recovered_codebook.json");
  atomic_write(out / "roundtrip.json", rep.dump(2) + "\n");
  std::cout << "roundtrip max interior abs error: " << max_err << " over " << compared
            << " recovered cells\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Option-surface codebook models: pricing, evolution, validation"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool needs_seed = true) {
    sub->add_option("--config", args.config, "JSON config path")->required();
    sub->add_option("--out", args.out, "output directory");
    if (needs_seed) sub->add_option("--seed", args.seed, "random seed (default 0)");
  };

  CLI::App* price = app.add_subcommand("price", "price a call surface from a model config");
  add_common(price, false);
  CLI::App* evolve = app.add_subcommand("evolve", "evolve the codebook along a driver path");
  add_common(evolve);
  evolve->add_option("--solver", args.solver, "picard | event | both");
  CLI::App* check = app.add_subcommand("check", "risk-neutrality and arbitrage checks");
  add_common(check);
  check->add_option("--checks", args.checks,
                    "comma list: conditional_expectation,martingale,static_arbitrage,tau");
  CLI::App* roundtrip = app.add_subcommand("roundtrip", "codebook -> prices -> codebook");
  add_common(roundtrip, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (price->parsed()) return cmd_price(args);
    if (evolve->parsed()) return cmd_evolve(args);
    if (check->parsed()) return cmd_check(args);
    if (roundtrip->parsed()) return cmd_roundtrip(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpecError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
