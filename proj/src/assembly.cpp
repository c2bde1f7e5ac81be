#include "nullctl/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "nullctl/quadrature.hpp"

namespace nullctl {

ProblemSpec ProblemSpec::baseline() {
  ProblemSpec s;
  s.y0 = [](double x) { return std::sin(std::numbers::pi * x); };
  s.rho0 = WeightSpec::poly_exp(1.5, 0.75, s.T);
  s.rho = WeightSpec::poly_exp(0.0, 0.75, s.T);
  return s;
}

void ProblemSpec::validate() const {
  if (!(0 <= omega_a && omega_a < omega_b && omega_b <= 1)) throw DomainError("control support must satisfy 0 <= a < b <= 1");
  if (!c_fn && !(c > 0)) throw DomainError("diffusion coefficient must be positive");
  if (!(T > 0)) throw DomainError("final time must be positive");
  if (!(eps >= 0)) throw DomainError("penalty parameter must be nonnegative");
  if (!(r > 0)) throw DomainError("augmentation parameter r must be positive");
  if (!y0) throw DomainError("initial datum is not set");
  if (quad_order < 1) throw DomainError("quadrature order must be positive");
}

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::MF1: return "mf1";
    case Formulation::MF2: return "mf2";
    case Formulation::MF3Norm: return "mf3norm";
  }
  return "?";
}

namespace {

using Vec16 = Eigen::Matrix<double, 16, 1>;
using Mat16 = Eigen::Matrix<double, 16, 16>;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct BfsTable {
  Vec16 v, dx, dt, dxx;
};

BfsTable bfs_all(double xi, double tau, double dx, double dt) {
  std::array<Hermite<double>, 4> X, T;
  for (int k = 0; k < 4; ++k) {
    X[k] = hermite_cubic(k, xi, dx);
    T[k] = hermite_cubic(k, tau, dt);
  }
  BfsTable s;
  for (int k = 0; k < 16; ++k) {
    const int c = k / 4, kind = k % 4;
    const auto& x = X[2 * (c % 2) + (kind & 1)];
    const auto& t = T[2 * (c / 2) + (kind >> 1)];
    s.v[k] = x.v * t.v;
    s.dx[k] = x.d1 * t.v;
    s.dt[k] = x.v * t.d1;
    s.dxx[k] = x.d2 * t.v;
  }
  return s;
}

struct Q1Table {
  Vec4 v, dx, dt;
};

Q1Table q1_all(double xi, double tau, double dx, double dt) {
  Q1Table s;
  for (int k = 0; k < 4; ++k) {
    const auto q = q1_shape(k, xi, tau, dx, dt);
    s.v[k] = q.v;
    s.dx[k] = q.dx;
    s.dt[k] = q.dt;
  }
  return s;
}

template <int R, int C>
void mirror_lower(Eigen::Matrix<double, R, C>& m) {
  for (int k = 0; k < m.rows(); ++k)
    for (int l = k + 1; l < m.cols(); ++l) m(k, l) = m(l, k);
}

// Sub-interval of [x0, x1] inside omega; empty when lo >= hi.
std::pair<double, double> omega_part(const ProblemSpec& spec, double x0, double x1) {
  return {std::max(x0, spec.omega_a), std::min(x1, spec.omega_b)};
}

struct TripletSink {
  std::vector<Eigen::Triplet<double>> entries;

  template <typename Mat>
  void add(const int* rows, const int* cols, const Mat& m) {
    for (int k = 0; k < m.rows(); ++k) {
      if (rows[k] < 0) continue;
      for (int l = 0; l < m.cols(); ++l)
        if (cols[l] >= 0) entries.emplace_back(rows[k], cols[l], m(k, l));
    }
  }

  SparseMatrix build(Eigen::Index r, Eigen::Index c) const {
    SparseMatrix m(r, c);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
  }
};

MixedSystem assemble_bfs(const SpaceTimeMesh& mesh, const ProblemSpec& spec, Formulation form) {
  spec.validate();
  const bool normalized = form == Formulation::MF3Norm;
  MixedSystem sys;
  sys.formulation = form;
  sys.mesh = mesh;
  sys.spec = spec;
  sys.phi_dofs = DofMap(mesh, FiniteElement::BFS, spec.dirichlet);
  sys.lambda_dofs = DofMap(mesh, FiniteElement::Q1, DirichletMode::Keep);
  const int n = sys.phi_dofs.size(), m = sys.lambda_dofs.size();

  const QuadRule<double> rule(spec.quad_order);
  const auto& line = rule.line;
  const double dx = mesh.dx, dt = mesh.dt;
  const double rho0_at_0 = normalized ? eval_rho0(spec.rho0, 0.0) : 1.0;

  TripletSink a_base, a_stab, b_sink, j_sink;
  sys.L = Vector::Zero(n);
  int phi_idx[16], lam_idx[4];

  // Interior point tables are shared by every cell of the uniform mesh.
  std::vector<BfsTable> full_bfs;
  std::vector<Q1Table> full_q1;
  for (int k = 0; k < rule.size(); ++k) {
    full_bfs.push_back(bfs_all(rule.xi(k), rule.tau(k), dx, dt));
    full_q1.push_back(q1_all(rule.xi(k), rule.tau(k), dx, dt));
  }

  for (int j = 0; j < mesh.nt; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      const double x0 = mesh.x(i), t0 = mesh.t(j);
      Mat16 Ab = Mat16::Zero(), As = Mat16::Zero();
      Eigen::Matrix<double, 4, 16> Be = Eigen::Matrix<double, 4, 16>::Zero();
      Mat4 Je = Mat4::Zero();
      Vec16 Le = Vec16::Zero();

      for (int k = 0; k < rule.size(); ++k) {
        const double x = x0 + rule.xi(k) * dx, t = t0 + rule.tau(k) * dt;
        const double w = rule.weight(k) * dx * dt;
        const BfsTable& s = full_bfs[k];
        const Q1Table& q = full_q1[k];
        Vec16 op = -s.dt - spec.diffusion(x) * s.dxx + spec.potential(x, t) * s.v;
        if (spec.c_fn) op -= spec.diffusion_prime(x) * s.dx;
        if (normalized) {
          const auto a = normalized_coeffs(spec.rho0, spec.rho, t);
          op = a.alpha1 * op + a.alpha0 * s.v;
        }
        As.noalias() += (w * op) * op.transpose();
        Be.noalias() -= (w * q.v) * op.transpose();
        Je.noalias() += (w * q.v) * q.v.transpose();
      }

      const auto [xa, xb] = omega_part(spec, x0, x0 + dx);
      if (xa < xb) {
        for (int k = 0; k < rule.size(); ++k) {
          const double x = xa + rule.xi(k) * (xb - xa), t = t0 + rule.tau(k) * dt;
          const double w = rule.weight(k) * (xb - xa) * dt;
          const double g = normalized ? 1.0 : std::pow(eval_rho0_inv(spec.rho0, t), 2);
          const BfsTable s = bfs_all((x - x0) / dx, rule.tau(k), dx, dt);
          Ab.noalias() += (w * g * s.v) * s.v.transpose();
        }
      }

      if (j == mesh.nt - 1 && !normalized && spec.eps > 0) {
        for (int k = 0; k < line.size(); ++k) {
          const BfsTable s = bfs_all(line.nodes[k], 1.0, dx, dt);
          Ab.noalias() += (spec.eps * line.weights[k] * dx * s.v) * s.v.transpose();
        }
      }

      if (j == 0) {
        for (int k = 0; k < line.size(); ++k) {
          const double x = x0 + line.nodes[k] * dx;
          const BfsTable s = bfs_all(line.nodes[k], 0.0, dx, dt);
          Le -= (line.weights[k] * dx * rho0_at_0 * spec.y0(x)) * s.v;
        }
      }

      mirror_lower(Ab);
      mirror_lower(As);
      mirror_lower(Je);
      sys.phi_dofs.cell_dofs(i, j, phi_idx);
      sys.lambda_dofs.cell_dofs(i, j, lam_idx);
      a_base.add(phi_idx, phi_idx, Ab);
      a_stab.add(phi_idx, phi_idx, As);
      b_sink.add(lam_idx, phi_idx, Be);
      j_sink.add(lam_idx, lam_idx, Je);
      for (int k = 0; k < 16; ++k)
        if (phi_idx[k] >= 0) sys.L[phi_idx[k]] += Le[k];
    }

  sys.A_stab = a_stab.build(n, n);
  sys.A = a_base.build(n, n) + spec.r * sys.A_stab;
  sys.B = b_sink.build(m, n);
  sys.J = j_sink.build(m, m);
  return sys;
}

}  // namespace

MixedSystem assemble_mf1(const SpaceTimeMesh& mesh, const ProblemSpec& spec) {
  if (!(spec.eps > 0)) throw DomainError("MF1 needs eps > 0; use the normalized formulation for eps = 0");
  return assemble_bfs(mesh, spec, Formulation::MF1);
}

MixedSystem assemble_mf3norm(const SpaceTimeMesh& mesh, const ProblemSpec& spec) {
  if (spec.eps != 0) throw DomainError("normalized formulation is the eps = 0 problem");
  normalized_coeffs(spec.rho0, spec.rho, 0.0);
  return assemble_bfs(mesh, spec, Formulation::MF3Norm);
}

MixedSystem assemble_mf2(const SpaceTimeMesh& mesh, const ProblemSpec& spec) {
  spec.validate();
  if (!(spec.eps > 0)) throw DomainError("MF2 needs eps > 0");
  MixedSystem sys;
  sys.formulation = Formulation::MF2;
  sys.mesh = mesh;
  sys.spec = spec;
  sys.phi_dofs = DofMap(mesh, FiniteElement::Q1, spec.dirichlet);
  sys.lambda_dofs = DofMap(mesh, FiniteElement::Q1, DirichletMode::Eliminate);
  const int n = sys.phi_dofs.size(), m = sys.lambda_dofs.size();

  const QuadRule<double> rule(spec.quad_order);
  const auto& line = rule.line;
  const double dx = mesh.dx, dt = mesh.dt;
  TripletSink a_sink, b_sink, j_sink;
  sys.L = Vector::Zero(n);
  int phi_idx[4], lam_idx[4];

  for (int j = 0; j < mesh.nt; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      const double x0 = mesh.x(i), t0 = mesh.t(j);
      Mat4 Ae = Mat4::Zero(), Be = Mat4::Zero(), Je = Mat4::Zero();
      Vec4 Le = Vec4::Zero();
      for (int k = 0; k < rule.size(); ++k) {
        const double x = x0 + rule.xi(k) * dx, t = t0 + rule.tau(k) * dt;
        const double w = rule.weight(k) * dx * dt;
        const Q1Table q = q1_all(rule.xi(k), rule.tau(k), dx, dt);
        // Row: multiplier test function; column: phi.
        Be.noalias() += w * (q.v * q.dt.transpose() - spec.diffusion(x) * q.dx * q.dx.transpose() -
                             spec.potential(x, t) * q.v * q.v.transpose());
        Je.noalias() += (w * q.dx) * q.dx.transpose();
      }
      const auto [xa, xb] = omega_part(spec, x0, x0 + dx);
      if (xa < xb) {
        for (int k = 0; k < rule.size(); ++k) {
          const double x = xa + rule.xi(k) * (xb - xa), t = t0 + rule.tau(k) * dt;
          const double w = rule.weight(k) * (xb - xa) * dt * std::pow(eval_rho0_inv(spec.rho0, t), 2);
          const Q1Table q = q1_all((x - x0) / dx, rule.tau(k), dx, dt);
          Ae.noalias() += (w * q.v) * q.v.transpose();
        }
      }
      if (j == mesh.nt - 1) {
        for (int k = 0; k < line.size(); ++k) {
          const Q1Table q = q1_all(line.nodes[k], 1.0, dx, dt);
          Ae.noalias() += (spec.eps * line.weights[k] * dx * q.v) * q.v.transpose();
        }
      }
      if (j == 0) {
        for (int k = 0; k < line.size(); ++k) {
          const Q1Table q = q1_all(line.nodes[k], 0.0, dx, dt);
          Le -= (line.weights[k] * dx * spec.y0(x0 + line.nodes[k] * dx)) * q.v;
        }
      }
      mirror_lower(Ae);
      mirror_lower(Je);
      sys.phi_dofs.cell_dofs(i, j, phi_idx);
      sys.lambda_dofs.cell_dofs(i, j, lam_idx);
      a_sink.add(phi_idx, phi_idx, Ae);
      b_sink.add(lam_idx, phi_idx, Be);
      j_sink.add(lam_idx, lam_idx, Je);
      for (int k = 0; k < 4; ++k)
        if (phi_idx[k] >= 0) sys.L[phi_idx[k]] += Le[k];
    }
  sys.A = a_sink.build(n, n);
  sys.B = b_sink.build(m, n);
  sys.J = j_sink.build(m, m);
  return sys;
}

MixedSystem assemble_system(const SpaceTimeMesh& mesh, const ProblemSpec& spec, Formulation f) {
  switch (f) {
    case Formulation::MF1:
      return assemble_mf1(mesh, spec);
    case Formulation::MF2:
      return assemble_mf2(mesh, spec);
    case Formulation::MF3Norm:
      return assemble_mf3norm(mesh, spec);
  }
  throw DomainError("unknown formulation");
}

SparseMatrix block_matrix(const MixedSystem& sys) {
  const Eigen::Index n = sys.n(), m = sys.m();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(sys.A.nonZeros() + 2 * sys.B.nonZeros());
  for (int k = 0; k < sys.A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < sys.B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.B, k); it; ++it) {
      t.emplace_back(n + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n + it.row(), it.value());
    }
  SparseMatrix K(n + m, n + m);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

ForwardOperators assemble_forward(int nx_f, const ProblemSpec& spec) {
  ForwardOperators ops;
  ops.basis = hermite1d_space_basis(nx_f);
  const auto& basis = ops.basis;
  const auto line = gauss_legendre(spec.quad_order);
  TripletSink m_sink, k_sink;
  for (int i = 0; i < nx_f; ++i) {
    Mat4 Me = Mat4::Zero(), Ke = Mat4::Zero();
    for (int q = 0; q < line.size(); ++q) {
      const double s = line.nodes[q], x = (i + s) * basis.dx, w = line.weights[q] * basis.dx;
      Vec4 v, d;
      for (int k = 0; k < 4; ++k) {
        const auto h = hermite_cubic(k, s, basis.dx);
        v[k] = h.v;
        d[k] = h.d1;
      }
      Me.noalias() += (w * v) * v.transpose();
      Ke.noalias() += (w * spec.diffusion(x) * d) * d.transpose() + (w * spec.potential(x, 0.0) * v) * v.transpose();
    }
    mirror_lower(Me);
    mirror_lower(Ke);
    const auto idx = basis.cell_dofs(i);
    m_sink.add(idx.data(), idx.data(), Me);
    k_sink.add(idx.data(), idx.data(), Ke);
  }
  ops.M = m_sink.build(basis.size, basis.size);
  ops.K = k_sink.build(basis.size, basis.size);
  return ops;
}

Vector forward_load(const ForwardOperators& ops, const ProblemSpec& spec,
                    const std::function<double(double)>& v) {
  const auto& basis = ops.basis;
  const auto line = gauss_legendre(spec.quad_order);
  Vector F = Vector::Zero(basis.size);
  for (int i = 0; i < basis.nx; ++i) {
    const double x0 = i * basis.dx;
    const auto [xa, xb] = omega_part(spec, x0, x0 + basis.dx);
    if (!(xa < xb)) continue;
    const auto idx = basis.cell_dofs(i);
    for (int q = 0; q < line.size(); ++q) {
      const double x = xa + line.nodes[q] * (xb - xa), w = line.weights[q] * (xb - xa);
      const double val = w * v(x);
      for (int k = 0; k < 4; ++k)
        if (idx[k] >= 0) F[idx[k]] += val * hermite_cubic(k, (x - x0) / basis.dx, basis.dx).v;
    }
  }
  return F;
}

void dump_matrix(const SparseMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << std::setprecision(17);
  out << "% " << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace nullctl
