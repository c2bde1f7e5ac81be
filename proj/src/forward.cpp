#include "nullctl/forward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "nullctl/errors.hpp"
#include "nullctl/linalg.hpp"
#include "nullctl/quadrature.hpp"

namespace nullctl {

Vector project(const ForwardOperators& ops, const ProblemSpec& spec, const std::function<double(double)>& f) {
  const auto& basis = ops.basis;
  const auto line = gauss_legendre(spec.quad_order);
  Vector rhs = Vector::Zero(basis.size);
  for (int i = 0; i < basis.nx; ++i) {
    const auto idx = basis.cell_dofs(i);
    for (int q = 0; q < line.size(); ++q) {
      const double s = line.nodes[q], w = line.weights[q] * basis.dx * f((i + s) * basis.dx);
      for (int k = 0; k < 4; ++k)
        if (idx[k] >= 0) rhs[idx[k]] += w * hermite_cubic(k, s, basis.dx).v;
    }
  }
  return Factorization(ops.M, Symmetry::SPD).solve(rhs);
}

ForwardRun solve_forward(const ProblemSpec& spec, const ControlFunction& control, int nx_f, int nt_f) {
  spec.validate();
  if (nx_f < 2 || nt_f < 1) throw DomainError("forward solve needs nx_f >= 2 and nt_f >= 1");
  ForwardRun run;
  run.nx_f = nx_f;
  run.nt_f = nt_f;
  run.T = spec.T;
  run.ops = assemble_forward(nx_f, spec);
  const auto& M = run.ops.M;
  const auto& K = run.ops.K;
  const double dt = run.dt();

  auto load = [&](double t) -> Vector {
    if (!control) return Vector::Zero(M.rows());
    return forward_load(run.ops, spec, [&](double x) { return control(x, t); });
  };

  run.trajectory.reserve(nt_f + 1);
  run.trajectory.push_back(project(run.ops, spec, spec.y0));

  const SparseMatrix euler = SparseMatrix(M / dt) + K;
  const Vector& y0 = run.trajectory.back();
  run.trajectory.push_back(Factorization(euler, Symmetry::SPD).solve(M * y0 / dt + load(dt)));

  if (nt_f > 1) {
    const Factorization bdf2(SparseMatrix(M * (1.5 / dt)) + K, Symmetry::SPD);
    for (int n = 1; n < nt_f; ++n) {
      const Vector& y1 = run.trajectory[n];
      const Vector& ym = run.trajectory[n - 1];
      const Vector rhs = M * ((2.0 * y1 - 0.5 * ym) / dt) + load((n + 1) * dt);
      run.trajectory.push_back(bdf2.solve(rhs));
    }
  }
  run.final_l2 = final_norm(run);
  return run;
}

double final_norm(const ForwardRun& run) {
  const Vector& y = run.final_state();
  return std::sqrt(std::max(0.0, y.dot(run.ops.M * y)));
}

double eval_state(const ForwardRun& run, int step, double x) {
  const auto& basis = run.ops.basis;
  const Vector& y = run.trajectory.at(step);
  const int i = std::clamp(static_cast<int>(std::floor(x / basis.dx)), 0, basis.nx - 1);
  const double s = x / basis.dx - i;
  const auto idx = basis.cell_dofs(i);
  double v = 0;
  for (int k = 0; k < 4; ++k)
    if (idx[k] >= 0) v += y[idx[k]] * hermite_cubic(k, s, basis.dx).v;
  return v;
}

void write_trajectory_csv(const ForwardRun& run, const std::string& path, int samples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << std::setprecision(9) << "t,x,y\n";
  for (int n = 0; n <= run.nt_f; ++n)
    for (int k = 0; k < samples; ++k) {
      const double x = samples > 1 ? static_cast<double>(k) / (samples - 1) : 0.0;
      out << n * run.dt() << ',' << x << ',' << eval_state(run, n, x) << '\n';
    }
}

}  // namespace nullctl
