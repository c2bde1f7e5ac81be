#include "nullctl/solvers.hpp"

#include <cmath>

namespace nullctl {

namespace {

void append(std::vector<Eigen::Triplet<double>>& t, const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0,
            double scale = 1.0, bool transpose = false) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (transpose)
        t.emplace_back(r0 + it.col(), c0 + it.row(), scale * it.value());
      else
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
    }
}

// [A0 B^T; B -J/r], whose leading Schur block is A0 + r B^T J^{-1} B.
SparseMatrix augmented_primal(const MixedSystem& s) {
  const Eigen::Index n = s.n(), m = s.m();
  std::vector<Eigen::Triplet<double>> t;
  append(t, s.A, 0, 0);
  append(t, s.B, n, 0);
  append(t, s.B, 0, n, 1.0, true);
  append(t, s.J, n, n, -1.0 / s.spec.r);
  SparseMatrix K(n + m, n + m);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

SparseMatrix expanded_saddle(const MixedSystem& s) {
  const Eigen::Index n = s.n(), m = s.m();
  std::vector<Eigen::Triplet<double>> t;
  append(t, s.A, 0, 0);
  append(t, s.B, n, 0);
  append(t, s.B, 0, n, 1.0, true);
  append(t, s.B, n + m, 0);
  append(t, s.B, 0, n + m, 1.0, true);
  append(t, s.J, n + m, n + m, -1.0 / s.spec.r);
  SparseMatrix K(n + 2 * m, n + 2 * m);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

double constraint_residual(const MixedSystem& s, const Vector& phi) {
  const double b = phi.size() ? (s.B * phi).lpNorm<Eigen::Infinity>() : 0.0;
  const double p = phi.size() ? phi.lpNorm<Eigen::Infinity>() : 0.0;
  return b / (1.0 + p);
}

double primal_residual(const MixedSystem& s, const Vector& phi, const Vector& lambda) {
  Vector r = s.A * phi + s.B.transpose() * lambda - s.L;
  if (s.formulation == Formulation::MF2) {
    const Factorization fj(s.J, Symmetry::SPD);
    r += s.spec.r * (s.B.transpose() * fj.solve(s.B * phi));
  }
  const double scale = (s.A * phi).norm() + (s.B.transpose() * lambda).norm() + s.L.norm();
  return scale > 0 ? r.norm() / scale : r.norm();
}

}  // namespace

SaddleSolver::SaddleSolver(const MixedSystem& s)
    : n_(s.n()), m_(s.m()), expanded_(s.formulation == Formulation::MF2) {
  K_ = expanded_ ? expanded_saddle(s) : block_matrix(s);
  fact_ = Factorization(K_, Symmetry::Indefinite);
}

std::pair<Vector, Vector> SaddleSolver::solve(const Vector& f, const Vector& g) const {
  Vector rhs = Vector::Zero(fact_.rows());
  rhs.head(n_) = f;
  rhs.segment(n_, m_) = g;
  Vector x = fact_.solve(rhs);
  for (int k = 0; k < refinement_steps; ++k) x += fact_.solve(rhs - K_ * x);
  return {x.head(n_), x.segment(n_, m_)};
}

PrimalSolver::PrimalSolver(const MixedSystem& s) : n_(s.n()) {
  const bool mf2 = s.formulation == Formulation::MF2;
  K_ = mf2 ? augmented_primal(s) : s.A;
  fact_ = Factorization(K_, mf2 ? Symmetry::Indefinite : Symmetry::SPD);
}

Vector PrimalSolver::solve(const Vector& f) const {
  Vector rhs = Vector::Zero(fact_.rows());
  rhs.head(n_) = f;
  Vector x = fact_.solve(rhs);
  for (int k = 0; k < refinement_steps; ++k) x += fact_.solve(rhs - K_ * x);
  return x.head(n_);
}

DualOperator::DualOperator(const MixedSystem& s) : system_(s), primal_(s), metric_(s.J, Symmetry::SPD) {}

Vector DualOperator::apply(const Vector& mu) const {
  const Vector phi = primal_.solve(-(system_.B.transpose() * mu));
  return metric_.solve(-(system_.B * phi));
}

MixedSolution solve_direct(const MixedSystem& s) {
  const SaddleSolver saddle(s);
  auto [phi, lambda] = saddle.solve(s.L, Vector::Zero(s.m()));
  MixedSolution sol;
  sol.formulation = s.formulation;
  sol.phi = std::move(phi);
  sol.lambda = std::move(lambda);
  sol.residual = primal_residual(s, sol.phi, sol.lambda);
  sol.constraint = constraint_residual(s, sol.phi);
  if (!sol.phi.allFinite() || !sol.lambda.allFinite()) throw SolverError("direct solve produced non-finite values");
  return sol;
}

InfSupResult infsup_delta(const MixedSystem& s, double tol, int maxit) {
  const SaddleSolver saddle(s);
  const Vector zero = Vector::Zero(s.n());
  // lambda = S^{-1} J v with S = B A^{-1} B^T; its top eigenvalue is delta^{-2}.
  const auto step = [&](const Vector& v) { return saddle.solve(zero, -(s.J * v)).second; };
  const auto est = extreme_eigen(step, s.J, Extreme::Largest, {tol, maxit, 20240607u, EigenMethod::Lanczos});
  return {1.0 / std::sqrt(est.value), est.iterations, est.converged};
}

MixedSolution cg_dual(const MixedSystem& s, double gamma, int maxit) {
  const DualOperator op(s);
  const auto& J = s.J;
  Vector lambda = Vector::Zero(s.m());
  Vector phi = op.primal().solve(s.L);
  Vector g = op.metric().solve(-(s.B * phi));
  Vector w = g;
  double gg = g.dot(J * g);
  const double g0 = std::sqrt(gg);
  MixedSolution sol;
  sol.formulation = s.formulation;
  int n = 0;
  if (g0 > 0) {
    for (n = 1; n <= maxit; ++n) {
      const Vector wbar = op.apply(w);
      const double denom = wbar.dot(J * w);
      if (!(denom > 0)) throw SolverError("dual operator is not positive definite");
      const double rho = gg / denom;
      lambda -= rho * w;
      g -= rho * wbar;
      const double gg_next = g.dot(J * g);
      if (std::sqrt(gg_next) <= gamma * g0) break;
      w = g + (gg_next / gg) * w;
      gg = gg_next;
    }
    if (n > maxit) throw SolverError("conjugate gradient did not converge within maxit iterations");
  }
  // Count includes the initial gradient evaluation.
  sol.iterations = g0 > 0 ? n + 1 : 0;
  sol.lambda = lambda;
  sol.phi = op.primal().solve(s.L - s.B.transpose() * lambda);
  sol.residual = primal_residual(s, sol.phi, sol.lambda);
  sol.constraint = constraint_residual(s, sol.phi);
  return sol;
}

ControlField::ControlField(const MixedSystem& s, const MixedSolution& sol) : system_(s), phi_(sol.phi) {}

double ControlField::operator()(double x, double t) const {
  const auto& sp = system_.spec;
  if (!sp.in_omega(x)) return 0.0;
  const double phi = eval_field(system_.mesh, system_.phi_dofs, phi_, x, t);
  const double w = eval_rho0_inv(sp.rho0, t);
  return system_.formulation == Formulation::MF3Norm ? w * phi : w * w * phi;
}

double ControlField::weighted(int i, int j, double xi, double tau, double x, double t) const {
  const auto& sp = system_.spec;
  if (x < sp.omega_a || x > sp.omega_b) return 0.0;
  const double phi = eval_field(system_.mesh, system_.phi_dofs, phi_, i, j, xi, tau);
  return system_.formulation == Formulation::MF3Norm ? phi : eval_rho0_inv(sp.rho0, t) * phi;
}

StateField::StateField(const MixedSystem& s, const MixedSolution& sol) : system_(s), lambda_(sol.lambda) {}

double StateField::operator()(double x, double t) const {
  const double l = eval_field(system_.mesh, system_.lambda_dofs, lambda_, x, t);
  return system_.formulation == Formulation::MF3Norm ? eval_rho_inv(system_.spec.rho, t) * l : l;
}

double StateField::at(int i, int j, double xi, double tau, double t) const {
  const double l = eval_field(system_.mesh, system_.lambda_dofs, lambda_, i, j, xi, tau);
  return system_.formulation == Formulation::MF3Norm ? eval_rho_inv(system_.spec.rho, t) * l : l;
}

SolutionNorms solution_norms(const MixedSystem& s, const MixedSolution& sol) {
  SolutionNorms out;
  const auto& mesh = s.mesh;
  const QuadRule<double> rule(s.spec.quad_order);
  if (s.formulation == Formulation::MF2) {
    const Factorization fj(s.J, Symmetry::SPD);
    const Vector b = s.B * sol.phi;
    out.lstar = std::sqrt(std::max(0.0, b.dot(fj.solve(b))));
  } else {
    out.lstar = std::sqrt(std::max(0.0, sol.phi.dot(s.A_stab * sol.phi)));
  }
  const ControlField v(s, sol);
  const StateField y(s, sol);
  double wc = 0, st = 0;
  for_each_point(
      mesh, rule,
      [&](int i, int j, double xi, double tau, double x, double t, double w) {
        const double val = v.weighted(i, j, xi, tau, x, t);
        wc += w * val * val;
      },
      s.spec.omega_a, s.spec.omega_b);
  for_each_point(mesh, rule, [&](int i, int j, double xi, double tau, double, double t, double w) {
    const double val = y.at(i, j, xi, tau, t);
    st += w * val * val;
  });
  double fm = 0, gap = 0;
  const auto& line = rule.line;
  for (int i = 0; i < mesh.nx; ++i)
    for (int k = 0; k < line.size(); ++k) {
      const double w = line.weights[k] * mesh.dx;
      const double l = eval_field(mesh, s.lambda_dofs, sol.lambda, i, mesh.nt - 1, line.nodes[k], 1.0);
      const double p = eval_field(mesh, s.phi_dofs, sol.phi, i, mesh.nt - 1, line.nodes[k], 1.0);
      fm += w * l * l;
      gap += w * (l + s.spec.eps * p) * (l + s.spec.eps * p);
    }
  out.weighted_control = std::sqrt(wc);
  out.state = std::sqrt(st);
  out.final_multiplier = std::sqrt(fm);
  out.penalty_gap = std::sqrt(gap);
  return out;
}

}  // namespace nullctl
