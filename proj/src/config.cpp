#include "nullctl/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nullctl/errors.hpp"

namespace nullctl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'", line);
  }
}

int to_int(const std::string& v, int line) {
  const double x = to_double(v, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("expected an integer, got '" + v + "'", line);
  return static_cast<int>(x);
}

bool to_bool(const std::string& v, int line) {
  const auto s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", line);
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, int line, F&& conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(conv(item, line));
  }
  return out;
}

}  // namespace

Formulation parse_formulation(const std::string& s) {
  const auto v = lower(s);
  if (v == "mf1") return Formulation::MF1;
  if (v == "mf2") return Formulation::MF2;
  if (v == "mf3" || v == "mf3norm") return Formulation::MF3Norm;
  throw ConfigError("unknown formulation '" + s + "' (mf1, mf2, mf3)");
}

DirichletMode parse_dirichlet(const std::string& s) {
  const auto v = lower(s);
  if (v == "eliminate") return DirichletMode::Eliminate;
  if (v == "keep") return DirichletMode::Keep;
  throw ConfigError("unknown dirichlet mode '" + s + "' (eliminate, keep)");
}

int matched_nt(int nx, double T) { return std::max(1, static_cast<int>(std::lround(nx * T))); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"problem.c", [&](auto& v, int l) { cfg.problem.c = to_double(v, l); }},
      {"problem.d", [&](auto& v, int l) { cfg.problem.d = to_double(v, l); }},
      {"problem.omega_a", [&](auto& v, int l) { cfg.problem.omega_a = to_double(v, l); }},
      {"problem.omega_b", [&](auto& v, int l) { cfg.problem.omega_b = to_double(v, l); }},
      {"problem.T", [&](auto& v, int l) { cfg.problem.T = to_double(v, l); }},
      {"problem.y0", [&](auto& v, int l) {
         const auto s = lower(v);
         if (s != "sine1" && s != "series" && s != "zero") throw ConfigError("problem.y0 must be sine1, series or zero", l);
         cfg.problem.y0 = s;
       }},
      {"problem.y0_coefficients", [&](auto& v, int l) { cfg.problem.y0_coefficients = to_list<double>(v, l, to_double); }},
      {"problem.eps", [&](auto& v, int l) { cfg.problem.eps = to_double(v, l); }},
      {"problem.r", [&](auto& v, int l) { cfg.problem.r = to_double(v, l); }},
      {"problem.eta", [&](auto& v, int l) { cfg.problem.eta = to_double(v, l); }},
      {"problem.formulation", [&](auto& v, int l) {
         try {
           cfg.problem.formulation = parse_formulation(v);
         } catch (const ConfigError& e) {
           throw ConfigError(e.what(), l);
         }
       }},
      {"weights.kind", [&](auto& v, int l) {
         const auto s = lower(v);
         if (s == "unit") cfg.weights.kind = WeightKind::Unit;
         else if (s == "poly_exp") cfg.weights.kind = WeightKind::PolyExp;
         else throw ConfigError("weights.kind must be unit or poly_exp", l);
       }},
      {"weights.K1", [&](auto& v, int l) { cfg.weights.k1 = to_double(v, l); }},
      {"weights.s", [&](auto& v, int l) { cfg.weights.s = to_double(v, l); }},
      {"mesh.nx", [&](auto& v, int l) { cfg.mesh.nx = to_int(v, l); }},
      {"mesh.nt", [&](auto& v, int l) { cfg.mesh.nt = to_int(v, l); }},
      {"mesh.family", [&](auto& v, int l) { cfg.mesh.family = to_list<int>(v, l, to_int); }},
      {"solver.path", [&](auto& v, int l) {
         const auto s = lower(v);
         if (s == "direct") cfg.solver.path = SolvePath::Direct;
         else if (s == "cg") cfg.solver.path = SolvePath::CG;
         else if (s == "infsup") cfg.solver.path = SolvePath::InfSup;
         else throw ConfigError("solver.path must be direct, cg or infsup", l);
       }},
      {"solver.gamma", [&](auto& v, int l) { cfg.solver.gamma = to_double(v, l); }},
      {"solver.maxit", [&](auto& v, int l) { cfg.solver.maxit = to_int(v, l); }},
      {"solver.eigen_tol", [&](auto& v, int l) { cfg.solver.eigen_tol = to_double(v, l); }},
      {"solver.dirichlet", [&](auto& v, int l) {
         try {
           cfg.solver.dirichlet = parse_dirichlet(v);
         } catch (const ConfigError& e) {
           throw ConfigError(e.what(), l);
         }
       }},
      {"solver.quad_order", [&](auto& v, int l) { cfg.solver.quad_order = to_int(v, l); }},
      {"solver.kappa", [&](auto& v, int l) { cfg.solver.kappa = to_bool(v, l); }},
      {"oracle.enabled", [&](auto& v, int l) { cfg.oracle.enabled = to_bool(v, l); }},
      {"oracle.N", [&](auto& v, int l) { cfg.oracle.modes = to_int(v, l); }},
      {"oracle.reference_nx", [&](auto& v, int l) { cfg.oracle.reference_nx = to_int(v, l); }},
      {"oracle.reference_file", [&](auto& v, int) { cfg.oracle.reference_file = v; }},
      {"output.dir", [&](auto& v, int) { cfg.output.dir = v; }},
      {"output.dump_matrices", [&](auto& v, int l) { cfg.output.dump_matrices = to_bool(v, l); }},
      {"output.forward", [&](auto& v, int l) { cfg.output.forward = to_bool(v, l); }},
      {"output.trajectory", [&](auto& v, int l) { cfg.output.trajectory = to_bool(v, l); }},
      {"output.forward_x_factor", [&](auto& v, int l) { cfg.output.forward_x_factor = to_int(v, l); }},
      {"output.forward_t_factor", [&](auto& v, int l) { cfg.output.forward_t_factor = to_int(v, l); }},
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool nt_set = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const auto body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value", line);
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "'", line);
    it->second(value, line);
    if (key == "mesh.nt") nt_set = true;
  }
  if (!nt_set) cfg.mesh.nt = matched_nt(cfg.mesh.nx, cfg.problem.T);
  if (cfg.mesh.nx < 1 || cfg.mesh.nt < 1) throw ConfigError("mesh.nx and mesh.nt must be positive");
  for (int nx : cfg.mesh.family)
    if (nx < 2) throw ConfigError("mesh.family entries must be at least 2");
  if (cfg.problem.y0 == "series" && cfg.problem.y0_coefficients.empty())
    throw ConfigError("problem.y0=series needs problem.y0_coefficients");
  if (cfg.oracle.modes < 1) throw ConfigError("oracle.N must be positive");
  if (cfg.solver.quad_order < 2) throw ConfigError("solver.quad_order must be at least 2");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ProblemSpec RunConfig::problem_spec() const {
  ProblemSpec spec = ProblemSpec::baseline();
  spec.c = problem.c;
  spec.d = problem.d;
  spec.omega_a = problem.omega_a;
  spec.omega_b = problem.omega_b;
  spec.T = problem.T;
  spec.eps = problem.eps;
  spec.r = problem.r;
  spec.eta = problem.eta;
  spec.quad_order = solver.quad_order;
  spec.dirichlet = solver.dirichlet;
  if (problem.y0 == "zero") {
    spec.y0 = [](double) { return 0.0; };
  } else if (problem.y0 == "series") {
    const auto a = problem.y0_coefficients;
    spec.y0 = [a](double x) {
      double s = 0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::sin((k + 1) * std::numbers::pi * x);
      return s;
    };
  }
  if (weights.kind == WeightKind::Unit) {
    spec.rho0 = WeightSpec::unit(problem.T);
    spec.rho = WeightSpec::unit(problem.T);
  } else {
    spec.rho0 = WeightSpec::poly_exp(weights.s, weights.k1, problem.T);
    spec.rho = WeightSpec::poly_exp(0.0, weights.k1, problem.T);
  }
  return spec;
}

std::vector<std::pair<int, int>> RunConfig::meshes() const {
  if (mesh.family.empty()) return {{mesh.nx, mesh.nt}};
  std::vector<std::pair<int, int>> out;
  for (int nx : mesh.family) out.emplace_back(nx, matched_nt(nx, problem.T));
  return out;
}

}  // namespace nullctl
