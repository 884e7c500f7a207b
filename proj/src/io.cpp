#include "levycb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace levycb {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": bad number '" + s + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON descriptors
// ---------------------------------------------------------------------------

Json jump_spec_to_json(const JumpSpec& s) {
  Json j;
  switch (s.kind) {
    case JumpSpec::Kind::None:
      j["kind"] = "none";
      break;
    case JumpSpec::Kind::CompoundPoissonExp:
      j["kind"] = "compound-poisson-exp";
      j["rate"] = s.rate;
      j["theta"] = s.theta;
      break;
    case JumpSpec::Kind::CompoundPoissonDiscrete: {
      j["kind"] = "compound-poisson-discrete";
      j["rate"] = s.rate;
      Json atoms = Json::array();
      for (const auto& a : s.atoms)
        atoms.push_back({{"size", a.size}, {"probability", a.probability}});
      j["atoms"] = atoms;
      break;
    }
    case JumpSpec::Kind::Gamma:
      j["kind"] = "gamma";
      j["shape"] = s.shape;
      j["rate"] = s.rate;
      break;
  }
  return j;
}

JumpSpec jump_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("jump spec: expected an object with a 'kind' field");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    require_keys(j, {"kind"}, "jump spec (none)");
    return JumpSpec::none();
  }
  if (kind == "compound-poisson-exp") {
    require_keys(j, {"kind", "rate", "theta"}, "jump spec (compound-poisson-exp)");
    return JumpSpec::compound_poisson_exp(j.at("rate").get<double>(),
                                          j.at("theta").get<double>());
  }
  if (kind == "compound-poisson-discrete") {
    require_keys(j, {"kind", "rate", "atoms"}, "jump spec (compound-poisson-discrete)");
    std::vector<JumpAtom> atoms;
    for (const auto& a : j.at("atoms")) {
      require_keys(a, {"size", "probability"}, "jump atom");
      atoms.push_back({a.at("size").get<double>(), a.at("probability").get<double>()});
    }
    return JumpSpec::compound_poisson_discrete(j.at("rate").get<double>(), std::move(atoms));
  }
  if (kind == "gamma") {
    require_keys(j, {"kind", "shape", "rate"}, "jump spec (gamma)");
    return JumpSpec::gamma_process(j.at("shape").get<double>(), j.at("rate").get<double>());
  }
  throw ConfigError("jump spec: unknown kind '" + kind + "'");
}

Json triplet_to_json(const LevyTriplet& t) {
  return Json{{"drift", t.drift}, {"diffusion", t.diffusion}, {"jumps", jump_spec_to_json(t.jumps)}};
}

LevyTriplet triplet_from_json(const Json& j) {
  require_keys(j, {"drift", "diffusion", "jumps"}, "triplet");
  LevyTriplet t;
  t.drift = j.value("drift", 0.0);
  t.diffusion = j.value("diffusion", 0.0);
  if (j.contains("jumps")) t.jumps = jump_spec_from_json(j.at("jumps"));
  t.validate();
  return t;
}

Json grid_to_json(const GridSpec& g) {
  return Json{{"dT", g.dT}, {"nT", g.n_mat}, {"du", g.du}, {"nu", g.n_half}};
}

GridSpec grid_from_json(const Json& j) {
  require_keys(j, {"dT", "nT", "du", "nu"}, "grid");
  GridSpec g;
  g.dT = j.value("dT", g.dT);
  g.n_mat = j.value("nT", g.n_mat);
  g.du = j.value("du", g.du);
  g.n_half = j.value("nu", g.n_half);
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_codebook_csv(const CodebookSurface& s, const fs::path& csv, const fs::path& sidecar) {
  std::ostringstream os;
  os << "T,u,re,im\n";
  const GridSpec& g = s.grid();
  for (int j = 0; j < g.n_mat; ++j)
    for (int k = 0; k < g.n_freq(); ++k) {
      Complex v = s.at(j, k);
      os << fmt(g.maturity(j)) << ',' << fmt(g.freq(k)) << ',' << fmt(v.real()) << ','
         << fmt(v.imag()) << '\n';
    }
  Json side = grid_to_json(g);
  side["time"] = s.time();
  side["mode"] = s.mode() == SurfaceMode::Maturity ? "maturity" : "musiela";
  atomic_write(csv, os.str());
  atomic_write(sidecar, side.dump(2) + "\n");
}

CodebookSurface read_codebook_csv(const fs::path& csv, const fs::path& sidecar) {
  Json side = parse_config_file(sidecar);
  require_keys(side, {"dT", "nT", "du", "nu", "time", "mode"}, "codebook sidecar");
  GridSpec g;
  g.dT = side.at("dT").get<double>();
  g.n_mat = side.at("nT").get<int>();
  g.du = side.at("du").get<double>();
  g.n_half = side.at("nu").get<int>();
  g.validate();
  std::string mode = side.value("mode", "maturity");
  CodebookSurface s(g, side.value("time", 0.0),
                    mode == "musiela" ? SurfaceMode::Musiela : SurfaceMode::Maturity);

  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);  // header
  std::size_t row = 0;
  const std::size_t total = static_cast<std::size_t>(g.n_mat) * g.n_freq();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 4) throw ConfigError(csv.string() + ": expected 4 columns");
    if (row >= total) throw ConfigError(csv.string() + ": more rows than the grid holds");
    int j = static_cast<int>(row / g.n_freq());
    int k = static_cast<int>(row % g.n_freq());
    s.at(j, k) = Complex(to_double(cells[2], "re"), to_double(cells[3], "im"));
    ++row;
  }
  if (row != total) throw ConfigError(csv.string() + ": row count does not match the grid");
  return s;
}

void write_price_csv(const PriceSurface& p, const fs::path& csv, const fs::path& sidecar) {
  std::ostringstream os;
  os << "T,K,C\n";
  for (std::size_t jt = 0; jt < p.maturities.size(); ++jt)
    for (std::size_t jk = 0; jk < p.strikes.size(); ++jk)
      os << fmt(p.maturities[jt]) << ',' << fmt(p.strikes[jk]) << ',' << fmt(p.at(jt, jk))
         << '\n';
  atomic_write(csv, os.str());
  atomic_write(sidecar, Json{{"spot", p.spot}}.dump(2) + "\n");
}

PriceSurface read_price_csv(const fs::path& csv, const fs::path& sidecar) {
  Json side = parse_config_file(sidecar);
  require_keys(side, {"spot"}, "price sidecar");
  PriceSurface p;
  p.spot = side.at("spot").get<double>();

  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  struct Row { double T, K, C; };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ConfigError(csv.string() + ": expected 3 columns");
    rows.push_back({to_double(cells[0], "T"), to_double(cells[1], "K"), to_double(cells[2], "C")});
  }
  if (rows.empty()) throw ConfigError(csv.string() + ": no data rows");
  for (const Row& r : rows) {
    if (p.maturities.empty() || r.T > p.maturities.back() + 1e-12) p.maturities.push_back(r.T);
  }
  std::size_t nK = rows.size() / p.maturities.size();
  if (nK * p.maturities.size() != rows.size())
    throw ConfigError(csv.string() + ": rows do not form a maturity x strike grid");
  for (std::size_t i = 0; i < nK; ++i) p.strikes.push_back(rows[i].K);
  p.call.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t jt = i / nK, jk = i % nK;
    if (std::fabs(rows[i].K - p.strikes[jk]) > 1e-9 ||
        std::fabs(rows[i].T - p.maturities[jt]) > 1e-9)
      throw ConfigError(csv.string() + ": grid is not row-major in T then K");
    p.at(jt, jk) = rows[i].C;
  }
  p.validate();
  return p;
}

void write_modified_csv(const std::vector<ModifiedPriceSlice>& slices, const fs::path& csv) {
  std::ostringstream os;
  os << "T,x,O\n";
  for (const auto& s : slices)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << fmt(s.maturity) << ',' << fmt(s.x[i]) << ',' << fmt(s.value[i]) << '\n';
  atomic_write(csv, os.str());
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Json parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Convert the byte offset into a line:column anchor.
    std::size_t off = std::min<std::size_t>(e.byte, text.size());
    std::size_t lineno = 1, col = 1;
    for (std::size_t i = 0; i < off; ++i) {
      if (text[i] == '\n') {
        ++lineno;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path.string() + ":" + std::to_string(lineno) + ":" +
                      std::to_string(col) + ": " + e.what());
  }
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(context + ": unknown key '" + it.key() + "'");
  }
}

namespace {

CharExponent pi_exponent_from_json(const Json& j, const std::string& context) {
  require_keys(j, {"diffusion", "jumps"}, context);
  double c = j.value("diffusion", 0.0);
  JumpSpec spec = j.contains("jumps") ? jump_spec_from_json(j.at("jumps")) : JumpSpec::none();
  return CharExponent::pi_form(c, spec);
}

}  // namespace

ParsedModel parse_model(const Json& j) {
  if (!j.is_object() || !j.contains("model"))
    throw ConfigError("model: expected an object with a 'model' field");
  ParsedModel m;
  m.kind = j.at("model").get<std::string>();
  m.grid = j.contains("grid") ? grid_from_json(j.at("grid")) : GridSpec{};
  m.x0 = j.value("x0", 0.0);

  if (m.kind == "bs") {
    require_keys(j, {"model", "sigma", "x0", "grid"}, "model (bs)");
    double sigma = j.at("sigma").get<double>();
    m.blocks = black_scholes_blocks(sigma, m.x0, m.grid);
    double s2 = sigma * sigma;
    m.cumulant0 = [s2](double T, Complex z) {
      return -0.5 * (z * z + Complex(0, 1) * z) * s2 * T;
    };
    BnsParams p;  // zero-driver embedding for the MC checks
    p.lambda = 1.0;
    p.delta = 0.0;
    p.eta = CharExponent::subordinator(JumpSpec::none());
    p.psiL = CharExponent::pi_form(s2, JumpSpec::none());
    p.x0 = m.x0;
    m.bns = p;
    return m;
  }
  if (m.kind == "pii") {
    require_keys(j, {"model", "psi0", "x0", "grid"}, "model (pii)");
    CharExponent e = pi_exponent_from_json(j.at("psi0"), "model.psi0");
    m.blocks = pii_blocks(e, m.x0, m.grid);
    m.cumulant0 = [e](double T, Complex z) { return e(z) * T; };
    BnsParams p;
    p.lambda = 1.0;
    p.delta = 0.0;
    p.eta = CharExponent::subordinator(JumpSpec::none());
    p.psiL = e;
    p.x0 = m.x0;
    m.bns = p;
    return m;
  }
  if (m.kind == "bns") {
    require_keys(j, {"model", "lambda", "delta", "eta", "psiL", "x0", "grid"}, "model (bns)");
    BnsParams p;
    p.lambda = j.at("lambda").get<double>();
    p.delta = j.at("delta").get<double>();
    p.eta = CharExponent::subordinator(jump_spec_from_json(j.at("eta")));
    p.psiL = pi_exponent_from_json(j.at("psiL"), "model.psiL");
    p.x0 = m.x0;
    p.validate();
    m.bns = p;
    m.blocks = bns_blocks(p, m.grid);
    BnsParams cp = p;
    m.cumulant0 = [cp](double T, Complex z) { return bns_cumulant0(cp, T, z); };
    return m;
  }
  if (m.kind == "affine") {
    require_keys(j, {"model", "kernel", "eta", "delta", "psiL", "x0", "grid"},
                 "model (affine)");
    const Json& kj = j.at("kernel");
    require_keys(kj, {"phi", "lambda"}, "model.kernel");
    CharExponent phi = pi_exponent_from_json(kj.at("phi"), "model.kernel.phi");
    double lambda = kj.at("lambda").get<double>();
    if (lambda <= 0.0) throw ConfigError("model.kernel.lambda must be > 0");
    CharExponent eta = CharExponent::subordinator(jump_spec_from_json(j.at("eta")));
    double delta = j.at("delta").get<double>();
    CharExponent psiL = pi_exponent_from_json(j.at("psiL"), "model.psiL");
    m.blocks = affine_blocks(ExpKernel{phi, lambda}, eta, delta, psiL, m.x0, m.grid);
    // Closed cumulant: psiL(z) T + int_0^T gamma(z, -i G(r,z)) dr.
    JointExponent gamma = m.blocks.gamma;
    m.cumulant0 = [phi, lambda, gamma, psiL](double T, Complex z) {
      static const GaussLegendre gl(48, 0.0, 1.0);
      Complex acc = psiL(z) * T;
      Complex ph = phi(z);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double r = gl.nodes[q] * T;
        Complex G = ph * (1.0 - std::exp(-lambda * r)) / lambda;
        acc += gl.weights[q] * T * gamma_eval(gamma, z, Complex(0, -1) * G);
      }
      return acc;
    };
    return m;
  }
  throw ConfigError("model: unknown kind '" + m.kind + "'");
}

}  // namespace levycb
