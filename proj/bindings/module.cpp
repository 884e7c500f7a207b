// Python bindings for the option-surface codebook library. Exposes the core
// operations: exponents, codebook surfaces, Fourier pricing in both
// directions, path evolution and the validation checks.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levycb/io.hpp"
#include "levycb/validation.hpp"

namespace py = pybind11;
using namespace levycb;

namespace {

ParsedModel model_from_json_str(const std::string& text) {
  return parse_model(Json::parse(text));
}

py::dict report_to_dict(const CheckReport& r) {
  py::dict d;
  d["pass"] = r.pass();
  py::list checks;
  for (const auto& e : r.entries) {
    py::dict c;
    c["name"] = e.name;
    c["statistic"] = e.statistic;
    c["se"] = e.se;
    c["threshold"] = e.threshold;
    c["pass"] = e.pass;
    checks.append(c);
  }
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Levy-codebook option surface models (C++ core)";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "StripDomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<JumpSpec>(m, "JumpSpec")
      .def_static("none", &JumpSpec::none)
      .def_static("compound_poisson_exp", &JumpSpec::compound_poisson_exp,
                  py::arg("rate"), py::arg("theta"))
      .def_static("gamma_process", &JumpSpec::gamma_process, py::arg("shape"), py::arg("rate"))
      .def_static("compound_poisson_discrete",
                  [](double rate, const std::vector<std::pair<double, double>>& atoms) {
                    std::vector<JumpAtom> a;
                    for (auto& [s, p] : atoms) a.push_back({s, p});
                    return JumpSpec::compound_poisson_discrete(rate, std::move(a));
                  },
                  py::arg("rate"), py::arg("atoms"))
      .def("is_subordinator", &JumpSpec::is_subordinator);

  py::class_<CharExponent>(m, "CharExponent")
      .def_static("from_triplet",
                  [](double drift, double diffusion, const JumpSpec& jumps) {
                    return CharExponent::from_triplet({drift, diffusion, jumps});
                  },
                  py::arg("drift"), py::arg("diffusion"), py::arg("jumps"))
      .def_static("pi_form", &CharExponent::pi_form, py::arg("diffusion"), py::arg("jumps"))
      .def_static("subordinator", &CharExponent::subordinator, py::arg("jumps"),
                  py::arg("drift_rate") = 0.0)
      .def("__call__", [](const CharExponent& e, Complex z) { return e(z); })
      .def("derivative", [](const CharExponent& e, Complex z) { return e.derivative(z); })
      .def("pi_member", &CharExponent::pi_member)
      .def("martingale_defect", [](const CharExponent& e) { return martingale_defect(e); });

  m.def("bns_gamma_eval", [](const CharExponent& eta, double delta, Complex u, Complex v) {
    JointExponent g = bns_gamma(eta, delta);
    return gamma_eval(g, u, v);
  });
  m.def("bns_gamma_d2", [](const CharExponent& eta, double delta, Complex u, Complex v) {
    JointExponent g = bns_gamma(eta, delta);
    return gamma_d2(g, u, v);
  });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double dT, int nT, double du, int nu) {
             GridSpec g{dT, nT, du, nu};
             g.validate();
             return g;
           }),
           py::arg("dT") = 0.05, py::arg("nT") = 41, py::arg("du") = 0.05,
           py::arg("nu") = 800)
      .def_readonly("dT", &GridSpec::dT)
      .def_readonly("nT", &GridSpec::n_mat)
      .def_readonly("du", &GridSpec::du)
      .def_readonly("nu", &GridSpec::n_half)
      .def("maturity", &GridSpec::maturity)
      .def("freq", &GridSpec::freq);

  py::class_<CodebookSurface>(m, "CodebookSurface")
      .def("grid", &CodebookSurface::grid)
      .def("time", &CodebookSurface::time)
      .def("value", [](const CodebookSurface& s, int j, int k) { return s.at(j, k); })
      .def("values",
           [](const CodebookSurface& s) {
             std::vector<std::vector<Complex>> rows(s.grid().n_mat);
             for (int j = 0; j < s.grid().n_mat; ++j) {
               rows[j].resize(s.grid().n_freq());
               for (int k = 0; k < s.grid().n_freq(); ++k) rows[j][k] = s.at(j, k);
             }
             return rows;
           })
      .def("integrate_maturity",
           [](const CodebookSurface& s, double t, double T, double u) {
             return integrate_maturity(s, t, T, u);
           })
      .def("seminorm", [](const CodebookSurface& s, double T, double m) {
        return seminorm(s, T, m);
      })
      .def("pi_check_passes", [](const CodebookSurface& s, double t) {
        return pi_necessary_check(s, t).pass();
      });

  m.def("black_scholes_codebook", &black_scholes_codebook, py::arg("sigma"), py::arg("grid"));

  m.def(
      "price_calls",
      [](const std::string& model_json, const std::vector<double>& strikes, double T) {
        ParsedModel pm = model_from_json_str(model_json);
        if (!pm.cumulant0) throw SpecError("model has no closed-form cumulant");
        auto cum = [&](Complex z) { return pm.cumulant0(T, z); };
        return price_from_cumulant(cum, std::exp(pm.x0), strikes, T);
      },
      py::arg("model_json"), py::arg("strikes"), py::arg("maturity"),
      "Fourier call prices from a model config (JSON string)");

  m.def(
      "roundtrip_error",
      [](const std::string& model_json, double dx, double x_half_width) {
        ParsedModel pm = model_from_json_str(model_json);
        PricingConfig pc;
        pc.dx = dx;
        pc.x_pad = x_half_width;
        double spot = std::exp(pm.x0);
        const GridSpec& g = pm.grid;
        std::vector<double> strikes;
        int n = static_cast<int>(std::ceil(x_half_width / dx));
        for (int i = -n; i <= n; ++i) strikes.push_back(spot * std::exp(i * dx));
        PriceSurface p;
        p.spot = spot;
        p.strikes = strikes;
        for (int j = 0; j < g.n_mat; ++j) p.maturities.push_back(g.maturity(j));
        p.call.resize(strikes.size() * p.maturities.size());
        for (int j = 0; j < g.n_mat; ++j) {
          if (g.maturity(j) <= 0.0) {
            for (std::size_t jk = 0; jk < strikes.size(); ++jk)
              p.at(j, jk) = std::max(spot - strikes[jk], 0.0);
            continue;
          }
          ModifiedPriceSlice o = codebook_to_modified(pm.blocks.psi0, 0.0, g.maturity(j), pc);
          std::vector<double> row = modified_to_calls(o, spot, strikes, pc);
          for (std::size_t jk = 0; jk < strikes.size(); ++jk) p.at(j, jk) = row[jk];
        }
        CodebookRecovery rec = surface_to_codebook_detailed(p, g.n_half, g.du, pc);
        double max_err = 0.0;
        std::size_t cells = 0;
        for (int j = 1; j < g.n_mat - 1; ++j)
          for (int k = 0; k < g.n_freq(); ++k) {
            if (!rec.cell_ok(j, k)) continue;
            max_err = std::max(max_err, std::abs(rec.psi.at(j, k) - pm.blocks.psi0.at(j, k)));
            ++cells;
          }
        return py::make_tuple(max_err, cells);
      },
      py::arg("model_json"), py::arg("dx") = 0.01, py::arg("x_half_width") = 2.0,
      "Grid-route pricing of every maturity followed by codebook recovery; "
      "returns (max abs error over recovered interior cells, cell count)");

  m.def(
      "evolve",
      [](const std::string& model_json, double horizon, std::uint64_t seed,
         const std::string& solver, double step) {
        ParsedModel pm = model_from_json_str(model_json);
        JumpSpec driver = pm.bns ? pm.bns->eta.triplet().jumps : JumpSpec::none();
        SubordinatorPath path = simulate_subordinator(driver, horizon, seed);
        EvolveConfig cfg;
        cfg.step = step;
        Trajectory traj = solver == "event"
                              ? evolve_event_driven(pm.blocks, path, horizon, {horizon}, cfg)
                              : evolve_picard(pm.blocks, path, horizon, {horizon}, cfg);
        py::dict d;
        d["times"] = traj.times;
        d["jumps"] = path.jumps.size();
        py::list states;
        for (auto& s : traj.states) states.append(s);
        d["states"] = states;
        return d;
      },
      py::arg("model_json"), py::arg("horizon"), py::arg("seed") = 0,
      py::arg("solver") = "picard", py::arg("step") = 0.01);

  m.def(
      "check_risk_neutral",
      [](const std::string& model_json, double horizon, std::size_t n_paths, int steps,
         std::uint64_t seed) {
        ParsedModel pm = model_from_json_str(model_json);
        if (!pm.bns) throw SpecError("MC checks need a bs, pii or bns model");
        McConfig mc;
        mc.n_paths = n_paths;
        mc.steps = steps;
        McPaths paths = simulate_bns(*pm.bns, horizon, seed, mc);
        paths.validate();
        CheckReport r = check_conditional_expectation(paths, pm.blocks.psi0, pm.x0,
                                                      {0.5, 1.0, 2.0}, horizon);
        CallPricer pricer = [&pm](double T, double K) {
          auto cum = [&](Complex z) { return pm.cumulant0(T, z); };
          return price_from_cumulant(cum, std::exp(pm.x0), {K}, T)[0];
        };
        double s = std::exp(pm.x0);
        CheckReport r2 = check_martingale(paths, pm.x0, pricer,
                                          {{horizon, 0.9 * s}, {horizon, s}, {horizon, 1.1 * s}});
        r.entries.insert(r.entries.end(), r2.entries.begin(), r2.entries.end());
        return report_to_dict(r);
      },
      py::arg("model_json"), py::arg("horizon") = 1.0, py::arg("n_paths") = 20000,
      py::arg("steps") = 100, py::arg("seed") = 0);

  m.def("static_arbitrage_ok",
        [](double spot, const std::vector<double>& strikes,
           const std::vector<double>& maturities, const std::vector<double>& calls) {
          PriceSurface p;
          p.spot = spot;
          p.strikes = strikes;
          p.maturities = maturities;
          p.call = calls;
          return report_to_dict(static_arbitrage_report(p));
        });
}
