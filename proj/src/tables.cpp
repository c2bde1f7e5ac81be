#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "nullctl/errors.hpp"
#include "nullctl/report.hpp"

#ifndef NULLCTL_DATA_DIR
#define NULLCTL_DATA_DIR "data"
#endif

namespace nullctl {

namespace {

using nlohmann::json;
using Key = std::tuple<std::string, std::string, int>;  // quantity, parameter, nx
using Values = std::map<Key, double>;

const std::vector<std::string> kNames = {
    "infsup-r001",  "infsup-r1",    "infsup-r100",  "infsup-mf3",   "mf1-r1-e02",   "mf1-r1-e04",   "mf1-r1-e08",
    "mf2-r1-e04",   "cond-r001",    "cond-r1-r100", "cg-counts",    "mf3-r001",     "mf3-r1",       "mf3-r100",
    "mf1-r100-e02", "mf1-r100-e04", "mf1-r100-e08", "mf1-r001-e02", "mf1-r001-e04", "mf1-r001-e08"};

std::map<std::string, double> parse_parameter(const std::string& p) {
  std::map<std::string, double> out;
  std::stringstream ss(p);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos) out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

double name_r(const std::string& name) {
  if (name.find("r001") != std::string::npos) return 1e-2;
  if (name.find("r100") != std::string::npos) return 100.0;
  return 1.0;
}

RunConfig base_config(const TableOptions& o, Formulation f, double r, double eps) {
  RunConfig cfg;
  cfg.problem.formulation = f;
  cfg.problem.r = r;
  cfg.problem.eta = r;
  cfg.problem.eps = eps;
  cfg.solver.dirichlet = o.dirichlet;
  cfg.solver.quad_order = o.quad_order;
  return cfg;
}

struct Published {
  json data;
  std::vector<int> nx;
};

Published load_published(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read published values " + path);
  json all = json::parse(in);
  if (!all.contains(name)) throw ConfigError("no published values for table " + name);
  Published p{all[name], {}};
  p.nx = p.data["nx"].get<std::vector<int>>();
  return p;
}

// Inf-sup constants (and the derived condition bound) for every row parameter.
void infsup_rows(const Published& pub, const TableOptions& o, const std::string& name, Formulation f, Values& out) {
  std::map<std::pair<std::string, int>, double> cache;
  for (const auto& row : pub.data["rows"]) {
    const auto param = row["parameter"].get<std::string>();
    const auto pm = parse_parameter(param);
    const double r = pm.count("r") ? pm.at("r") : name_r(name);
    const double eps = f == Formulation::MF3Norm ? 0.0 : pm.at("eps");
    for (int nx : pub.nx) {
      if (nx > o.infsup_max_nx) continue;
      auto cfg = base_config(o, f, r, eps);
      cfg.solver.path = SolvePath::InfSup;
      const auto res = solve_case(cfg, nx, matched_nt(nx, cfg.problem.T));
      out[{"delta", param, nx}] = res.delta;
      out[{"cond_bound", param, nx}] = res.cond_bound;
    }
  }
}

void mf_rows(const Published& pub, const TableOptions& o, Formulation f, Values& out) {
  const double r = pub.data["r"].get<double>(), eps = pub.data["eps"].get<double>();
  for (int nx : pub.nx) {
    if (nx > o.max_nx) continue;
    auto cfg = base_config(o, f, r, eps);
    cfg.solver.path = SolvePath::Direct;
    cfg.solver.kappa = nx <= o.kappa_max_nx;
    const auto row = solve_case(cfg, nx, matched_nt(nx, cfg.problem.T));
    out[{"dofs", "", nx}] = static_cast<double>(row.n_h + row.m_h);
    out[{"lstar", "", nx}] = row.lstar;
    out[{"control_error", "", nx}] = row.control_error;
    out[{"control_error_abs", "", nx}] = row.control_error * row.exact_control_norm;
    out[{"state_error", "", nx}] = row.state_error;
    out[{"final_multiplier", "", nx}] = row.final_multiplier;
    out[{"kappa", "", nx}] = row.kappa;
  }
}

void cg_rows(const Published& pub, const TableOptions& o, Values& out) {
  for (const auto& row : pub.data["rows"]) {
    const auto q = row["quantity"].get<std::string>();
    const auto param = row["parameter"].get<std::string>();
    if (q != "iterations" && q != "kappa_A") continue;
    const auto pm = parse_parameter(param);
    for (int nx : pub.nx) {
      if (nx > o.max_nx || (q == "kappa_A" && nx > o.kappa_max_nx)) continue;
      auto cfg = base_config(o, Formulation::MF1, pm.at("r"), pm.at("eps"));
      const auto mesh = build_mesh(nx, matched_nt(nx, cfg.problem.T), cfg.problem.T);
      const auto sys = assemble_mf1(mesh, cfg.problem_spec());
      out[{"multipliers", "", nx}] = static_cast<double>(sys.m());
      if (q == "kappa_A")
        out[{q, param, nx}] = cond_estimate(sys.A);
      else
        out[{q, param, nx}] = cg_dual(sys, cfg.solver.gamma, cfg.solver.maxit).iterations;
    }
  }
}

void mf3_rows(const Published& pub, const TableOptions& o, Values& out, std::vector<std::vector<std::string>>& extra) {
  const double r = pub.data["r"].get<double>();
  auto cfg = base_config(o, Formulation::MF3Norm, r, 0.0);
  cfg.solver.path = SolvePath::CG;
  cfg.output.forward = true;

  const int ref_nx = o.reference_nx, ref_nt = matched_nt(ref_nx, cfg.problem.T);
  std::filesystem::create_directories(o.cache_dir);
  char stem[128];
  std::snprintf(stem, sizeof stem, "/reference_r%g_%dx%d_q%d_%s.txt", r, ref_nx, ref_nt, o.quad_order,
                o.dirichlet == DirichletMode::Eliminate ? "eliminate" : "keep");
  const std::string path = o.cache_dir + stem;
  FineReference ref;
  if (std::filesystem::exists(path)) {
    ref = FineReference::load(path);
  } else {
    ref = fine_reference(cfg, ref_nx, ref_nt, o.max_dofs);
    ref.save(path);
  }

  for (int nx : pub.nx) {
    if (nx == ref_nx && nx > o.mf3_max_nx) {
      // The reference is the solution on this mesh, sampled on the lattice.
      out[{"control_norm", "", nx}] = ref.control_norm;
      out[{"state_norm", "", nx}] = ref.state_norm;
    }
    if (nx > o.mf3_max_nx) continue;
    const int nt = matched_nt(nx, cfg.problem.T);
    const auto row = solve_case(cfg, nx, nt, &ref);
    out[{"lstar", "", nx}] = row.lstar;
    out[{"control_error", "", nx}] = row.control_error;
    out[{"control_norm", "", nx}] = row.control_norm;
    out[{"state_norm", "", nx}] = row.state_norm;
    out[{"state_error", "", nx}] = row.state_error;
    out[{"iterations", "", nx}] = row.iterations;
    out[{"n_h", "", nx}] = static_cast<double>(row.n_h);
    out[{"final_forward", "", nx}] = row.final_forward;
    if (nx <= o.kappa_max_nx) {
      const auto sys = assemble_mf3norm(build_mesh(nx, nt, cfg.problem.T), cfg.problem_spec());
      out[{"kappa_A", "", nx}] = cond_estimate(sys.A);
    }
    if (nx <= o.infsup_max_nx) {
      auto icfg = cfg;
      icfg.solver.path = SolvePath::InfSup;
      icfg.output.forward = false;
      out[{"cond_bound", "", nx}] = solve_case(icfg, nx, nt).cond_bound;
    }
  }

  const auto& pref = pub.data["reference"];
  const double href = build_mesh(ref_nx, ref_nt, cfg.problem.T).h;
  extra.push_back({"reference_control_norm", "", csv_number(href), std::to_string(ref_nx), std::to_string(ref_nt),
                   csv_number(ref.control_norm), csv_number(pref["control_norm"].get<double>()),
                   csv_number((ref.control_norm - pref["control_norm"].get<double>()) / pref["control_norm"].get<double>())});
  extra.push_back({"reference_state_norm", "", csv_number(href), std::to_string(ref_nx), std::to_string(ref_nt),
                   csv_number(ref.state_norm), csv_number(pref["state_norm"].get<double>()),
                   csv_number((ref.state_norm - pref["state_norm"].get<double>()) / pref["state_norm"].get<double>())});
}

}  // namespace

std::vector<std::string> table_names() { return kNames; }

std::string default_published_path() { return std::string(NULLCTL_DATA_DIR) + "/published_values.json"; }

CsvTable table(const std::string& name, const TableOptions& options) {
  if (std::find(kNames.begin(), kNames.end(), name) == kNames.end()) {
    std::string list;
    for (const auto& n : kNames) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown table '" + name + "'; available: " + list);
  }
  const auto path = options.published_path.empty() ? default_published_path() : options.published_path;
  const Published pub = load_published(path, name);

  Values values;
  std::vector<std::vector<std::string>> extra;
  if (name.rfind("infsup-mf3", 0) == 0)
    infsup_rows(pub, options, name, Formulation::MF3Norm, values);
  else if (name.rfind("infsup", 0) == 0 || name.rfind("cond", 0) == 0)
    infsup_rows(pub, options, name, Formulation::MF1, values);
  else if (name.rfind("mf1", 0) == 0)
    mf_rows(pub, options, Formulation::MF1, values);
  else if (name.rfind("mf2", 0) == 0)
    mf_rows(pub, options, Formulation::MF2, values);
  else if (name == "cg-counts")
    cg_rows(pub, options, values);
  else
    mf3_rows(pub, options, values, extra);

  CsvTable t;
  t.title = name + ": " + pub.data["description"].get<std::string>() + "; mirrors " +
            pub.data["source"].get<std::string>() +
            "; h is the space-time cell diameter, norms are L2, errors relative unless marked abs";
  t.header = {"quantity", "parameter", "h", "nx", "nt", "computed", "published", "rel_diff"};
  const double T = RunConfig{}.problem.T;
  for (const auto& row : pub.data["rows"]) {
    const auto q = row["quantity"].get<std::string>();
    const auto param = row["parameter"].get<std::string>();
    const auto& vals = row["values"];
    for (std::size_t k = 0; k < pub.nx.size(); ++k) {
      const int nx = pub.nx[k], nt = matched_nt(nx, T);
      const double published = vals[k].is_null() ? NAN : vals[k].get<double>();
      const auto it = values.find({q, param, nx});
      const double computed = it == values.end() ? NAN : it->second;
      const double rel = std::isnan(published) || std::isnan(computed) ? NAN : (computed - published) / std::abs(published);
      t.rows.push_back({q, param, csv_number(build_mesh(nx, nt, T).h), std::to_string(nx), std::to_string(nt),
                        csv_number(computed), csv_number(published), csv_number(rel)});
    }
  }
  for (auto& e : extra) t.rows.push_back(std::move(e));
  return t;
}

}  // namespace nullctl
