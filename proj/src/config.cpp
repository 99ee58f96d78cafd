#include "osm/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace osm {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"tgamma", "output"}},
      {"geometry", {"width", "height", "nx", "ny"}},
      {"partition", {"px", "py"}},
      {"physics", {"k", "kappa", "mu_re", "mu_im", "kappa_mode", "gamma", "absorption", "layer_width",
                   "detune"}},
      {"bc", {"kind", "g_d", "g_n", "lambda_scale", "gamma_d_predicate"}},
      {"source", {"kind", "value"}},
      {"solver", {"method", "relax", "tol", "maxit", "restart", "rcond_min"}},
      {"analysis", {"dense_cap", "svd_threshold", "lanczos_steps"}},
      {"sweep", {"ks"}},
  };
  return keys;
}

void check_keys(const pt::ptree& tree) {
  const auto& allowed = allowed_keys();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!allowed.at("").count(name)) throw InvalidArgument("unknown key '" + name + "'");
      continue;
    }
    auto sec = allowed.find(name);
    if (sec == allowed.end() || name.empty()) throw InvalidArgument("unknown section [" + name + "]");
    for (const auto& [key, leaf] : node) {
      if (!sec->second.count(key)) throw InvalidArgument("unknown key '" + key + "' in [" + name + "]");
    }
  }
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& path) const { return static_cast<bool>(tree_.get_optional<std::string>(path)); }

  std::string str(const std::string& path, const std::string& fallback) const {
    return tree_.get<std::string>(path, fallback);
  }

  double num(const std::string& path, double fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    return to_double(path, *v);
  }

  int integer(const std::string& path, int fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    std::size_t used = 0;
    int out = 0;
    try {
      out = std::stoi(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->size()) throw InvalidArgument(path + ": expected an integer, got '" + *v + "'");
    return out;
  }

  static double to_double(const std::string& path, const std::string& s) {
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(out)) {
      throw InvalidArgument(path + ": expected a number, got '" + s + "'");
    }
    return out;
  }

 private:
  const pt::ptree& tree_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

std::function<cplx(Point)> profile(const std::string& key, const std::string& name, double k) {
  if (name == "zero") return {};
  if (name == "one") return [](Point) { return cplx(1.0); };
  if (name == "plane_wave") return [k](Point x) { return std::exp(I * (k * x.x)); };
  throw InvalidArgument(key + ": unknown profile '" + name + "' (expected zero, one or plane_wave)");
}

std::function<bool(Point)> side_predicate(const std::string& spec, double w, double h) {
  const auto sides = split(spec, '|');
  if (sides.empty()) throw InvalidArgument("bc.gamma_d_predicate: empty");
  std::vector<int> which;
  for (const auto& s : sides) {
    if (s == "left") which.push_back(0);
    else if (s == "right") which.push_back(1);
    else if (s == "bottom") which.push_back(2);
    else if (s == "top") which.push_back(3);
    else throw InvalidArgument("bc.gamma_d_predicate: unknown side '" + s + "' (use left|right|bottom|top)");
  }
  const double tol = 1e-10 * std::max(w, h);
  return [which, w, h, tol](Point x) {
    for (int s : which) {
      if ((s == 0 && x.x < tol) || (s == 1 && x.x > w - tol) || (s == 2 && x.y < tol) ||
          (s == 3 && x.y > h - tol)) {
        return true;
      }
    }
    return false;
  };
}

RunConfig build(const pt::ptree& tree) {
  check_keys(tree);
  const Reader r(tree);
  RunConfig cfg;
  ProblemSetup& s = cfg.setup;

  s.width = r.num("geometry.width", 1.0);
  s.height = r.num("geometry.height", 1.0);
  s.nx = r.integer("geometry.nx", 8);
  s.ny = r.integer("geometry.ny", 8);
  s.px = r.integer("partition.px", 2);
  s.py = r.integer("partition.py", 2);
  if (!(s.width > 0.0) || !(s.height > 0.0)) throw InvalidArgument("geometry: width and height must be positive");
  if (s.nx < 1 || s.ny < 1) throw InvalidArgument("geometry: nx and ny must be at least 1");
  if (s.px < 1 || s.py < 1) throw InvalidArgument("partition: px and py must be at least 1");
  if (s.nx % s.px != 0 || s.ny % s.py != 0) {
    throw InvalidArgument("partition: px must divide nx and py must divide ny (got nx=" + std::to_string(s.nx) +
                          " px=" + std::to_string(s.px) + ", ny=" + std::to_string(s.ny) +
                          " py=" + std::to_string(s.py) + ")");
  }

  if (!r.has("physics.k")) throw InvalidArgument("physics.k is required");
  s.k = r.num("physics.k", 0.0);
  if (!(s.k > 0.0)) throw InvalidArgument("physics.k must be positive");
  s.mu = cplx(r.num("physics.mu_re", 1.0), r.num("physics.mu_im", 0.0));
  if (!(s.mu.real() > 0.0) || s.mu.imag() < 0.0) {
    throw InvalidArgument("physics.mu: (A2) violated, need mu_re > 0 and mu_im >= 0");
  }
  const std::string g = r.str("physics.gamma", "1/k");
  s.gamma = g == "1/k" ? 1.0 / s.k : Reader::to_double("physics.gamma", g);
  if (!(s.gamma > 0.0)) throw InvalidArgument("physics.gamma must be positive");

  cfg.kappa = r.num("physics.kappa", s.k);
  if (cfg.kappa < 0.0) throw InvalidArgument("physics.kappa must be non-negative");
  cfg.kappa_mode = r.str("physics.kappa_mode", "constant");
  const double absorption = r.num("physics.absorption", 0.0);
  if (absorption < 0.0) throw InvalidArgument("physics.absorption: (A2) violated, Im kappa^2 must be >= 0");
  const std::string t = r.str("tgamma", "collar");
  if (t == "collar") s.tgamma = TGammaKind::collar;
  else if (t == "boundary_h1") s.tgamma = TGammaKind::boundary_h1;
  else throw InvalidArgument("tgamma: expected collar or boundary_h1, got '" + t + "'");

  s.bc = parse_bc_kind(r.str("bc.kind", "robin"));
  s.lambda_scale = r.num("bc.lambda_scale", s.k);
  if (s.bc == BcKind::robin && !(s.lambda_scale > 0.0)) {
    throw InvalidArgument("bc.lambda_scale: (A3) violated, Lambda must be positive definite");
  }
  if (s.bc == BcKind::mixed) {
    s.dirichlet_part = side_predicate(r.str("bc.gamma_d_predicate", "left"), s.width, s.height);
  } else if (r.has("bc.gamma_d_predicate")) {
    throw InvalidArgument("bc.gamma_d_predicate only applies to bc.kind = mixed");
  }
  s.g_d = profile("bc.g_d", r.str("bc.g_d", "zero"), s.k);
  s.g_n = profile("bc.g_n", r.str("bc.g_n", "zero"), s.k);

  if (cfg.kappa_mode == "constant") {
    const cplx k2 = cfg.kappa * cfg.kappa * (1.0 + I * absorption);
    s.kappa_sq = [k2](Point) { return k2; };
  } else if (cfg.kappa_mode == "resonant") {
    cfg.resonance = dirichlet_resonance(s);
    const double d = 1.0 + r.num("physics.detune", 0.0);
    const double k2 = cfg.resonance * d * d;
    s.kappa_sq = [k2](Point) { return cplx(k2); };
  } else if (cfg.kappa_mode == "absorbing-layer") {
    const double layer = r.num("physics.layer_width", 0.125 * std::min(s.width, s.height));
    if (!(layer > 0.0)) throw InvalidArgument("physics.layer_width must be positive");
    const double k2 = cfg.kappa * cfg.kappa;
    const double w = s.width;
    const double h = s.height;
    s.kappa_sq = [=](Point x) {
      const double d = std::min(std::min(x.x, w - x.x), std::min(x.y, h - x.y));
      return d < layer ? k2 * (1.0 + I * absorption) : cplx(k2);
    };
    s.kappa_sq_affine = false;
  } else {
    throw InvalidArgument("physics.kappa_mode: expected constant, resonant or absorbing-layer, got '" +
                          cfg.kappa_mode + "'");
  }
  if (cfg.kappa_mode != "resonant" && r.has("physics.detune")) {
    throw InvalidArgument("physics.detune only applies to kappa_mode = resonant");
  }

  cfg.source_kind = r.str("source.kind", "zero");
  const double value = r.num("source.value", 1.0);
  if (cfg.source_kind == "zero") {
    s.source = {};
  } else if (cfg.source_kind == "constant") {
    s.source = [value](Point) { return cplx(value); };
  } else if (cfg.source_kind == "manufactured_sine") {
    if (cfg.kappa_mode != "constant" || absorption != 0.0) {
      throw InvalidArgument("source.kind = manufactured_sine needs a constant real kappa");
    }
    if (s.bc != BcKind::dirichlet || s.g_d) {
      throw InvalidArgument("source.kind = manufactured_sine needs bc.kind = dirichlet with g_d = zero");
    }
    cfg.manufactured = true;
    const double c = M_PI * M_PI * (1.0 / (s.width * s.width) + 1.0 / (s.height * s.height));
    const cplx coef = s.mu * c - cfg.kappa * cfg.kappa;
    const double w = s.width;
    const double h = s.height;
    s.source = [=](Point x) { return coef * std::sin(M_PI * x.x / w) * std::sin(M_PI * x.y / h); };
  } else {
    throw InvalidArgument("source.kind: expected zero, constant or manufactured_sine, got '" + cfg.source_kind + "'");
  }

  SolverConfig& sv = cfg.solver;
  sv.method = r.str("solver.method", "gmres");
  if (sv.method != "gmres" && sv.method != "richardson") {
    throw InvalidArgument("solver.method: expected gmres or richardson, got '" + sv.method + "'");
  }
  sv.relax = r.num("solver.relax", 0.5);
  sv.tol = r.num("solver.tol", 1e-10);
  sv.maxit = r.integer("solver.maxit", 1000);
  sv.restart = r.integer("solver.restart", 100);
  if (!(sv.relax > 0.0 && sv.relax < 1.0)) throw InvalidArgument("solver.relax must lie in (0, 1)");
  if (!(sv.tol > 0.0)) throw InvalidArgument("solver.tol must be positive");
  s.rcond_min = r.num("solver.rcond_min", 1e-12);
  if (!(s.rcond_min > 0.0 && s.rcond_min < 1.0)) throw InvalidArgument("solver.rcond_min must lie in (0, 1)");
  if (sv.maxit < 1 || sv.restart < 1) throw InvalidArgument("solver.maxit and solver.restart must be positive");

  cfg.analysis.dense_cap = r.integer("analysis.dense_cap", 2000);
  cfg.analysis.svd_threshold = r.num("analysis.svd_threshold", 1e-8);
  cfg.analysis.lanczos_steps = r.integer("analysis.lanczos_steps", 160);
  if (cfg.analysis.dense_cap < 1) throw InvalidArgument("analysis.dense_cap must be positive");
  if (!(cfg.analysis.svd_threshold > 0.0 && cfg.analysis.svd_threshold < 1.0)) {
    throw InvalidArgument("analysis.svd_threshold must lie in (0, 1)");
  }

  for (const auto& item : split(r.str("sweep.ks", ""), ',')) {
    const double k = Reader::to_double("sweep.ks", item);
    if (!(k > 0.0)) throw InvalidArgument("sweep.ks: wavenumbers must be positive");
    cfg.ks.push_back(k);
  }
  cfg.output = r.str("output", "out");

  Coefficients c;
  c.mu = s.mu;
  c.kappa_sq = s.kappa_sq;
  c.kappa_sq_affine = s.kappa_sq_affine;
  c.gamma = s.gamma;
  c.validate(build_rect_mesh(s.nx, s.ny, s.width, s.height));
  return cfg;
}

pt::ptree read_ini(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return tree;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  return build(read_ini(in));
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return build(read_ini(in));
}

cplx manufactured_solution(const RunConfig& cfg, Point x) {
  return std::sin(M_PI * x.x / cfg.setup.width) * std::sin(M_PI * x.y / cfg.setup.height);
}

}  // namespace osm
