#pragma once

#include <functional>
#include <string>

#include "nullctl/linalg.hpp"
#include "nullctl/mesh.hpp"
#include "nullctl/weights.hpp"

namespace nullctl {

struct ProblemSpec {
  double c = 0.1;
  std::function<double(double)> c_fn;        // overrides c when set
  std::function<double(double)> c_prime_fn;  // derivative of c_fn
  double d = 0.0;
  std::function<double(double, double)> d_fn;  // overrides d when set
  double omega_a = 0.2;
  double omega_b = 0.5;
  double T = 0.5;
  std::function<double(double)> y0;
  double eps = 1e-2;
  double r = 1.0;
  double eta = 1.0;
  WeightSpec rho0;
  WeightSpec rho;
  int quad_order = 6;
  DirichletMode dirichlet = DirichletMode::Eliminate;

  static ProblemSpec baseline();

  double diffusion(double x) const { return c_fn ? c_fn(x) : c; }
  double diffusion_prime(double x) const { return c_fn && c_prime_fn ? c_prime_fn(x) : 0.0; }
  double potential(double x, double t) const { return d_fn ? d_fn(x, t) : d; }
  bool constant_coefficients() const { return !c_fn && !d_fn; }
  bool in_omega(double x) const { return x > omega_a && x < omega_b; }
  void validate() const;
};

enum class Formulation { MF1, MF2, MF3Norm };

std::string to_string(Formulation f);

// Block system [A B^T; B 0] [phi; lambda] = [L; 0].
// For MF1 and MF3Norm, A = A_base + r A_stab. For MF2, A holds only the sparse part
// and the augmentation r B^T J^{-1} B is applied implicitly.
struct MixedSystem {
  Formulation formulation = Formulation::MF1;
  SpaceTimeMesh mesh;
  DofMap phi_dofs;
  DofMap lambda_dofs;
  ProblemSpec spec;
  SparseMatrix A;
  SparseMatrix A_stab;
  SparseMatrix B;
  SparseMatrix J;
  Vector L;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return J.rows(); }
};

MixedSystem assemble_mf1(const SpaceTimeMesh& mesh, const ProblemSpec& spec);
MixedSystem assemble_mf3norm(const SpaceTimeMesh& mesh, const ProblemSpec& spec);
MixedSystem assemble_mf2(const SpaceTimeMesh& mesh, const ProblemSpec& spec);
MixedSystem assemble_system(const SpaceTimeMesh& mesh, const ProblemSpec& spec, Formulation formulation);

// Full symmetric block matrix of the saddle system (MF1, MF3Norm).
SparseMatrix block_matrix(const MixedSystem& system);

struct ForwardOperators {
  HermiteSpaceBasis basis;
  SparseMatrix M;
  SparseMatrix K;
};

ForwardOperators assemble_forward(int nx_f, const ProblemSpec& spec);

// Integrates v(., t) against the spatial basis over omega.
Vector forward_load(const ForwardOperators& ops, const ProblemSpec& spec,
                    const std::function<double(double)>& v);

// Coordinate-format dump (row col value), 1-based indices, 17 significant digits.
void dump_matrix(const SparseMatrix& matrix, const std::string& path);

}  // namespace nullctl
