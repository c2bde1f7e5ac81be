#include "nullctl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nullctl/errors.hpp"
#include "nullctl/forward.hpp"
#include "nullctl/oracle.hpp"

namespace nullctl {

std::string csv_number(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  if (!title.empty()) out << "# " << title << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void CsvTable::write(const std::string& path) const {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << str();
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw DomainError("rate fit needs at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, e] : pairs) {
    if (!(h > 0) || !(e > 0)) throw DomainError("rate fit needs positive values");
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pairs.size());
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw DomainError("rate fit needs distinct mesh sizes");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

namespace {

struct LatticePoint {
  int i, j;
  double xi, tau;
};

LatticePoint locate(const SpaceTimeMesh& mesh, double x, double t) {
  const int i = std::clamp(static_cast<int>(std::floor(x / mesh.dx)), 0, mesh.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(t / mesh.dt)), 0, mesh.nt - 1);
  return {i, j, x / mesh.dx - i, t / mesh.dt - j};
}

template <typename F>
void for_each_lattice_point(int lx, int lt, double T, F&& f) {
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const double dx = 1.0 / lx, dt = T / lt;
  for (int b = 0; b < lt; ++b)
    for (int a = 0; a < lx; ++a)
      for (int q = 0; q < 4; ++q) f((a + g[q % 2]) * dx, (b + g[q / 2]) * dt, 0.25 * dx * dt);
}

std::pair<double, double> sample(const MixedSystem& s, const ControlField& v, const StateField& y, double x, double t) {
  const auto p = locate(s.mesh, x, t);
  const double c = s.spec.in_omega(x) ? v.weighted(p.i, p.j, p.xi, p.tau, x, t) : 0.0;
  return {c, y.at(p.i, p.j, p.xi, p.tau, t)};
}

}  // namespace

FineReference sample_reference(const MixedSystem& s, const MixedSolution& sol, int lattice_x, int lattice_t) {
  FineReference ref;
  ref.nx = s.mesh.nx;
  ref.nt = s.mesh.nt;
  ref.r = s.spec.r;
  ref.lattice_x = lattice_x;
  ref.lattice_t = lattice_t;
  const ControlField v(s, sol);
  const StateField y(s, sol);
  double cn = 0, sn = 0;
  for_each_lattice_point(lattice_x, lattice_t, s.spec.T, [&](double x, double t, double w) {
    const auto [c, st] = sample(s, v, y, x, t);
    ref.x.push_back(x);
    ref.t.push_back(t);
    ref.w.push_back(w);
    ref.control.push_back(c);
    ref.state.push_back(st);
    cn += w * c * c;
    sn += w * st * st;
  });
  ref.control_norm = std::sqrt(cn);
  ref.state_norm = std::sqrt(sn);
  return ref;
}

FineReference fine_reference(const RunConfig& config, int nx, int nt, long max_dofs) {
  const ProblemSpec spec = config.problem_spec();
  if (spec.eps != 0 || config.problem.formulation != Formulation::MF3Norm)
    throw DomainError("fine reference is for the eps = 0 normalized formulation");
  const auto mesh = build_mesh(nx, nt, spec.T);
  const long n = static_cast<long>(DofMap(mesh, FiniteElement::BFS, spec.dirichlet).size());
  const long m = static_cast<long>(DofMap(mesh, FiniteElement::Q1, DirichletMode::Keep).size());
  if (n + m > max_dofs)
    throw DomainError("reference mesh " + std::to_string(nx) + "x" + std::to_string(nt) + " has " +
                      std::to_string(n + m) + " unknowns, above the cap of " + std::to_string(max_dofs));
  const auto sys = assemble_mf3norm(mesh, spec);
  const auto sol = cg_dual(sys, config.solver.gamma, config.solver.maxit);
  return sample_reference(sys, sol);
}

void FineReference::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  char buf[160];
  std::snprintf(buf, sizeof buf, "nullctl-reference %d %d %.17g %d %d %zu\n", nx, nt, r, lattice_x, lattice_t, x.size());
  out << buf;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", x[k], t[k], w[k], control[k], state[k]);
    out << buf;
  }
}

FineReference FineReference::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  FineReference ref;
  std::string tag;
  std::size_t count = 0;
  in >> tag >> ref.nx >> ref.nt >> ref.r >> ref.lattice_x >> ref.lattice_t >> count;
  if (!in || tag != "nullctl-reference") throw Error("not a reference file: " + path);
  double cn = 0, sn = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double x, t, w, c, s;
    if (!(in >> x >> t >> w >> c >> s)) throw Error("truncated reference file: " + path);
    ref.x.push_back(x);
    ref.t.push_back(t);
    ref.w.push_back(w);
    ref.control.push_back(c);
    ref.state.push_back(s);
    cn += w * c * c;
    sn += w * s * s;
  }
  ref.control_norm = std::sqrt(cn);
  ref.state_norm = std::sqrt(sn);
  return ref;
}

ReferenceErrors compare_to_reference(const FineReference& ref, const MixedSystem& s, const MixedSolution& sol) {
  const ControlField v(s, sol);
  const StateField y(s, sol);
  double ce = 0, se = 0;
  for (std::size_t k = 0; k < ref.x.size(); ++k) {
    const auto [c, st] = sample(s, v, y, ref.x[k], ref.t[k]);
    ce += ref.w[k] * (c - ref.control[k]) * (c - ref.control[k]);
    se += ref.w[k] * (st - ref.state[k]) * (st - ref.state[k]);
  }
  ReferenceErrors out;
  out.control_error = ref.control_norm > 0 ? std::sqrt(ce) / ref.control_norm : std::sqrt(ce);
  out.state_error = ref.state_norm > 0 ? std::sqrt(se) / ref.state_norm : std::sqrt(se);
  return out;
}

ReportRow solve_case(const RunConfig& config, int nx, int nt, const FineReference* reference) {
  const ProblemSpec spec = config.problem_spec();
  const auto mesh = build_mesh(nx, nt, spec.T);
  const auto sys = assemble_system(mesh, spec, config.problem.formulation);
  ReportRow row;
  row.h = mesh.h;
  row.nx = nx;
  row.nt = nt;
  row.n_h = sys.n();
  row.m_h = sys.m();

  if (config.output.dump_matrices) {
    const std::string stem = config.output.dir + "/" + to_string(sys.formulation) + "_" + std::to_string(nx) + "x" +
                             std::to_string(nt) + "_";
    std::filesystem::create_directories(config.output.dir);
    dump_matrix(sys.A, stem + "A.txt");
    dump_matrix(sys.B, stem + "B.txt");
    dump_matrix(sys.J, stem + "J.txt");
  }

  if (config.solver.path == SolvePath::InfSup) {
    const auto res = infsup_delta(sys, config.solver.eigen_tol, config.solver.maxit);
    row.delta = res.delta;
    row.cond_bound = cg_condition_bound(spec.r, res.delta);
    row.iterations = res.iterations;
    return row;
  }

  const MixedSolution sol = config.solver.path == SolvePath::CG ? cg_dual(sys, config.solver.gamma, config.solver.maxit)
                                                                : solve_direct(sys);
  if (config.solver.path == SolvePath::CG) row.iterations = sol.iterations;
  const auto norms = solution_norms(sys, sol);
  row.lstar = norms.lstar;
  row.control_norm = norms.weighted_control;
  row.state_norm = norms.state;
  row.final_multiplier = norms.final_multiplier;

  if (spec.eps > 0 && config.oracle.enabled && spec.constant_coefficients()) {
    const auto oracle = FourierOracle::build_and_solve(config.oracle.modes, spec);
    const auto err = error_report(oracle, sys, sol);
    row.control_error = err.control_error;
    row.state_error = err.state_error;
    row.exact_control_norm = err.control_norm;
  } else if (reference) {
    const auto err = compare_to_reference(*reference, sys, sol);
    row.control_error = err.control_error;
    row.state_error = err.state_error;
  }

  if (config.solver.kappa) {
    const SparseMatrix K = config.solver.path == SolvePath::CG || sys.formulation == Formulation::MF2
                               ? sys.A
                               : block_matrix(sys);
    row.kappa = cond_estimate(K);
  }

  if (config.output.forward) {
    const ControlField v(sys, sol);
    const int fx = config.output.forward_x_factor * nx, ft = config.output.forward_t_factor * nt;
    const auto run = solve_forward(spec, [&](double x, double t) { return v(x, t); }, fx, ft);
    row.final_forward = run.final_l2;
    if (config.output.trajectory)
      write_trajectory_csv(run, config.output.dir + "/trajectory_" + std::to_string(nx) + "x" + std::to_string(nt) + ".csv");
  }
  return row;
}

namespace {

const std::vector<std::pair<std::string, double ReportRow::*>> kFitted = {
    {"lstar", &ReportRow::lstar},
    {"control_error", &ReportRow::control_error},
    {"state_error", &ReportRow::state_error},
    {"final_forward", &ReportRow::final_forward},
};

}  // namespace

CsvTable Report::table() const {
  CsvTable t;
  t.title = "run report; norms are L2 norms, errors are relative, h is the space-time cell diameter";
  t.header = {"h", "nx", "nt", "n_h", "m_h", "lstar", "control_error", "state_error", "control_norm", "state_norm",
              "final_multiplier", "final_forward", "kappa", "delta", "cond_bound", "iterations"};
  for (const auto& r : rows)
    t.rows.push_back({csv_number(r.h), std::to_string(r.nx), std::to_string(r.nt), std::to_string(r.n_h),
                      std::to_string(r.m_h), csv_number(r.lstar), csv_number(r.control_error),
                      csv_number(r.state_error), csv_number(r.control_norm), csv_number(r.state_norm),
                      csv_number(r.final_multiplier), csv_number(r.final_forward), csv_number(r.kappa),
                      csv_number(r.delta), csv_number(r.cond_bound),
                      r.iterations >= 0 ? std::to_string(r.iterations) : std::string()});
  return t;
}

CsvTable Report::slope_table() const {
  CsvTable t;
  t.title = "least-squares fits log(e) = intercept + slope log(h)";
  t.header = {"quantity", "slope", "intercept"};
  for (const auto& [name, fit] : slopes) t.rows.push_back({name, csv_number(fit.slope), csv_number(fit.intercept)});
  return t;
}

Report run(const RunConfig& config) {
  std::optional<FineReference> reference;
  const ProblemSpec spec = config.problem_spec();
  if (spec.eps == 0 && config.problem.formulation == Formulation::MF3Norm && config.solver.path != SolvePath::InfSup) {
    if (!config.oracle.reference_file.empty() && std::filesystem::exists(config.oracle.reference_file)) {
      reference = FineReference::load(config.oracle.reference_file);
    } else if (config.oracle.reference_nx > 0) {
      reference = fine_reference(config, config.oracle.reference_nx, matched_nt(config.oracle.reference_nx, spec.T));
      if (!config.oracle.reference_file.empty()) reference->save(config.oracle.reference_file);
    }
  }

  Report report;
  for (const auto& [nx, nt] : config.meshes())
    report.rows.push_back(solve_case(config, nx, nt, reference ? &*reference : nullptr));
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) { return a.h > b.h; });

  for (const auto& [name, field] : kFitted) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : report.rows)
      if (r.*field > 0 && std::isfinite(r.*field)) pts.emplace_back(r.h, r.*field);
    if (pts.size() >= 3) report.slopes[name] = fit_rate(pts);
  }

  std::filesystem::create_directories(config.output.dir);
  report.table().write(config.output.dir + "/report.csv");
  if (!report.slopes.empty()) report.slope_table().write(config.output.dir + "/slopes.csv");
  return report;
}

}  // namespace nullctl
