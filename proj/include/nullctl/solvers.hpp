#pragma once

#include <utility>

#include "nullctl/assembly.hpp"

namespace nullctl {

struct MixedSolution {
  Formulation formulation = Formulation::MF1;
  Vector phi;     // phi_h, or psi_h for MF3Norm
  Vector lambda;  // multiplier
  int iterations = 0;
  double residual = 0;    // relative residual of the first block row
  double constraint = 0;  // |B phi|_inf / (1 + |phi|_inf)
};

// Repeated solves with [A B^T; B 0]. MF2 carries its augmentation through an extra block.
class SaddleSolver {
 public:
  explicit SaddleSolver(const MixedSystem& system);
  std::pair<Vector, Vector> solve(const Vector& f, const Vector& g) const;

  int refinement_steps = 3;

 private:
  Eigen::Index n_, m_;
  bool expanded_;
  SparseMatrix K_;
  Factorization fact_;
};

// Repeated solves with A (for MF2, A0 + r B^T J^{-1} B).
class PrimalSolver {
 public:
  explicit PrimalSolver(const MixedSystem& system);
  Vector solve(const Vector& f) const;

  int refinement_steps = 3;

 private:
  Eigen::Index n_;
  SparseMatrix K_;
  Factorization fact_;
};

// mu -> J^{-1} B A^{-1} B^T mu, the Hessian of the dual functional in the J metric.
class DualOperator {
 public:
  explicit DualOperator(const MixedSystem& system);
  Vector apply(const Vector& mu) const;
  const PrimalSolver& primal() const { return primal_; }
  const Factorization& metric() const { return metric_; }

 private:
  const MixedSystem& system_;
  PrimalSolver primal_;
  Factorization metric_;
};

MixedSolution solve_direct(const MixedSystem& system);

struct InfSupResult {
  double delta = 0;
  int iterations = 0;
  bool converged = false;
};

InfSupResult infsup_delta(const MixedSystem& system, double tol = 1e-8, int maxit = 1000);

MixedSolution cg_dual(const MixedSystem& system, double gamma = 1e-10, int maxit = 1000);

inline double cg_condition_bound(double r, double delta) { return 1.0 / (r * delta * delta); }
inline double cg_condition_bound(const MixedSystem& system, double delta) {
  return cg_condition_bound(system.spec.r, delta);
}

// v_h = rho0^{-2} phi_h 1_omega (MF1, MF2) or rho0^{-1} psi_h 1_omega (MF3Norm).
class ControlField {
 public:
  ControlField(const MixedSystem& system, const MixedSolution& solution);
  double operator()(double x, double t) const;
  // rho0 v_h at a quadrature point of cell (i, j); zero outside omega.
  double weighted(int i, int j, double xi, double tau, double x, double t) const;

 private:
  const MixedSystem& system_;
  Vector phi_;
};

// y_h = lambda_h (MF1, MF2) or rho^{-1} lambda_h (MF3Norm).
class StateField {
 public:
  StateField(const MixedSystem& system, const MixedSolution& solution);
  double operator()(double x, double t) const;
  double at(int i, int j, double xi, double tau, double t) const;

 private:
  const MixedSystem& system_;
  Vector lambda_;
};

struct SolutionNorms {
  double lstar = 0;             // |L* phi_h| in L2, |rho^{-1} L*(rho0 psi_h)| for MF3Norm, L2(H^{-1}) for MF2
  double weighted_control = 0;  // |rho0 v_h|_{L2(q_T)}
  double state = 0;             // |y_h|_{L2(Q_T)}
  double final_multiplier = 0;  // |lambda_h(., T)|_{L2(0,1)}
  double penalty_gap = 0;       // |lambda_h(., T) + eps phi_h(., T)|_{L2(0,1)}
};

SolutionNorms solution_norms(const MixedSystem& system, const MixedSolution& solution);

}  // namespace nullctl
