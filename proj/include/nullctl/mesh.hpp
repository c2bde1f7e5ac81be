#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nullctl/errors.hpp"
#include "nullctl/linalg.hpp"
#include "nullctl/quadrature.hpp"

namespace nullctl {

// Uniform rectangulation of (0,1) x (0,T). Node (i, j) sits at (i dx, j dt).
struct SpaceTimeMesh {
  int nx = 0;
  int nt = 0;
  double T = 0;
  double dx = 0;
  double dt = 0;
  double h = 0;

  int nodes() const { return (nx + 1) * (nt + 1); }
  int cells() const { return nx * nt; }
  int node(int i, int j) const { return j * (nx + 1) + i; }
  double x(int i) const { return i * dx; }
  double t(int j) const { return j * dt; }
};

SpaceTimeMesh build_mesh(int nx, int nt, double T);

enum class FiniteElement { BFS, Q1 };
enum class DirichletMode { Eliminate, Keep };

// BFS dof kinds per node.
enum BfsKind { kValue = 0, kDx = 1, kDt = 2, kDxt = 3 };

class DofMap {
 public:
  DofMap() = default;
  DofMap(const SpaceTimeMesh& mesh, FiniteElement element, DirichletMode mode);

  FiniteElement element() const { return element_; }
  DirichletMode mode() const { return mode_; }
  int per_node() const { return per_node_; }
  int size() const { return size_; }
  int local_size() const { return 4 * per_node_; }
  // -1 marks an eliminated dof.
  int global(int node, int kind) const { return index_[node * per_node_ + kind]; }
  // Local ordering: corner c = a + 2b (a, b the x/t offsets), then kind.
  void cell_dofs(int i, int j, int* out) const;

 private:
  SpaceTimeMesh mesh_;
  FiniteElement element_ = FiniteElement::Q1;
  DirichletMode mode_ = DirichletMode::Keep;
  int per_node_ = 1;
  int size_ = 0;
  std::vector<int> index_;
};

// 1D cubic Hermite function on a cell of length len, s in [0,1].
// which: 0 left value, 1 left slope, 2 right value, 3 right slope.
// Derivatives are with respect to the physical coordinate.
template <typename Scalar = double>
struct Hermite {
  Scalar v, d1, d2;
};

template <typename Scalar = double>
Hermite<Scalar> hermite_cubic(int which, Scalar s, Scalar len) {
  const Scalar s2 = s * s, s3 = s2 * s;
  switch (which) {
    case 0: return {1 - 3 * s2 + 2 * s3, (-6 * s + 6 * s2) / len, (-6 + 12 * s) / (len * len)};
    case 1: return {len * (s - 2 * s2 + s3), 1 - 4 * s + 3 * s2, (-4 + 6 * s) / len};
    case 2: return {3 * s2 - 2 * s3, (6 * s - 6 * s2) / len, (6 - 12 * s) / (len * len)};
    case 3: return {len * (-s2 + s3), -2 * s + 3 * s2, (-2 + 6 * s) / len};
    default: throw DomainError("Hermite index out of range");
  }
}

template <typename Scalar = double>
struct BfsValue {
  Scalar v, dx, dt, dxx, dxt, dtt;
};

// Local BFS shape k = 4 c + kind, c = a + 2 b.
template <typename Scalar = double>
BfsValue<Scalar> bfs_shape(int k, Scalar xi, Scalar tau, Scalar dx, Scalar dt) {
  if (k < 0 || k > 15) throw DomainError("BFS shape index out of range");
  const int c = k / 4, kind = k % 4;
  const int a = c % 2, b = c / 2;
  const auto X = hermite_cubic<Scalar>(2 * a + (kind & 1), xi, dx);
  const auto T = hermite_cubic<Scalar>(2 * b + (kind >> 1), tau, dt);
  return {X.v * T.v, X.d1 * T.v, X.v * T.d1, X.d2 * T.v, X.d1 * T.d1, X.v * T.d2};
}

template <typename Scalar = double>
struct Q1Value {
  Scalar v, dx, dt;
};

// Derivatives are with respect to the reference coordinates unless dx, dt are given.
template <typename Scalar = double>
Q1Value<Scalar> q1_shape(int k, Scalar xi, Scalar tau, Scalar dx = Scalar(1), Scalar dt = Scalar(1)) {
  if (k < 0 || k > 3) throw DomainError("Q1 shape index out of range");
  const int a = k % 2, b = k / 2;
  const Scalar X = a ? xi : 1 - xi, Xd = (a ? Scalar(1) : Scalar(-1)) / dx;
  const Scalar T = b ? tau : 1 - tau, Td = (b ? Scalar(1) : Scalar(-1)) / dt;
  return {X * T, Xd * T, X * Td};
}

// C1 cubic Hermite basis on (0,1): 2 dofs per node (value, slope), boundary values removed.
struct HermiteSpaceBasis {
  int nx = 0;
  double dx = 0;
  std::vector<int> index;  // node * 2 + kind -> dof or -1
  int size = 0;

  int global(int node, int kind) const { return index[node * 2 + kind]; }
  // Local ordering: (left value, left slope, right value, right slope).
  std::array<int, 4> cell_dofs(int i) const {
    return {global(i, 0), global(i, 1), global(i + 1, 0), global(i + 1, 1)};
  }
};

HermiteSpaceBasis hermite1d_space_basis(int nx);

// Value of a finite element field at reference point (xi, tau) of cell (i, j).
double eval_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const Vector& coeffs, int i, int j,
                  double xi, double tau);
double eval_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const Vector& coeffs, double x, double t);

// Calls f(i, j, xi, tau, x, t, w) at every quadrature point of (a, b) x (0, T).
// Cells cut by a or b are split there.
template <typename F>
void for_each_point(const SpaceTimeMesh& mesh, const QuadRule<double>& rule, F&& f, double a = 0.0,
                    double b = 1.0) {
  for (int j = 0; j < mesh.nt; ++j)
    for (int i = 0; i < mesh.nx; ++i) {
      const double x0 = mesh.x(i), xa = std::max(x0, a), xb = std::min(x0 + mesh.dx, b);
      if (!(xa < xb)) continue;
      for (int k = 0; k < rule.size(); ++k) {
        const double x = xa + rule.xi(k) * (xb - xa), t = mesh.t(j) + rule.tau(k) * mesh.dt;
        f(i, j, (x - x0) / mesh.dx, rule.tau(k), x, t, rule.weight(k) * (xb - xa) * mesh.dt);
      }
    }
}

}  // namespace nullctl
