#include "nullctl/mesh.hpp"

namespace nullctl {

SpaceTimeMesh build_mesh(int nx, int nt, double T) {
  if (nx < 1 || nt < 1) throw DomainError("mesh needs at least one cell per direction");
  if (!(T > 0)) throw DomainError("final time must be positive");
  SpaceTimeMesh m;
  m.nx = nx;
  m.nt = nt;
  m.T = T;
  m.dx = 1.0 / nx;
  m.dt = T / nt;
  m.h = std::hypot(m.dx, m.dt);
  return m;
}

DofMap::DofMap(const SpaceTimeMesh& mesh, FiniteElement element, DirichletMode mode)
    : mesh_(mesh), element_(element), mode_(mode), per_node_(element == FiniteElement::BFS ? 4 : 1) {
  index_.assign(static_cast<size_t>(mesh.nodes()) * per_node_, -1);
  int next = 0;
  for (int j = 0; j <= mesh.nt; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      const bool boundary = i == 0 || i == mesh.nx;
      for (int k = 0; k < per_node_; ++k) {
        // Value and t-derivative vanish along x = 0 and x = 1.
        const bool masked = mode == DirichletMode::Eliminate && boundary && (k == kValue || k == kDt);
        if (!masked) index_[mesh.node(i, j) * per_node_ + k] = next++;
      }
    }
  size_ = next;
}

void DofMap::cell_dofs(int i, int j, int* out) const {
  const int corners[4] = {mesh_.node(i, j), mesh_.node(i + 1, j), mesh_.node(i, j + 1),
                          mesh_.node(i + 1, j + 1)};
  for (int c = 0; c < 4; ++c)
    for (int k = 0; k < per_node_; ++k) out[c * per_node_ + k] = global(corners[c], k);
}

HermiteSpaceBasis hermite1d_space_basis(int nx) {
  if (nx < 2) throw DomainError("spatial basis needs at least two cells");
  HermiteSpaceBasis b;
  b.nx = nx;
  b.dx = 1.0 / nx;
  b.index.assign(2 * (nx + 1), -1);
  for (int i = 0; i <= nx; ++i)
    for (int k = 0; k < 2; ++k)
      if (!(k == 0 && (i == 0 || i == nx))) b.index[2 * i + k] = b.size++;
  return b;
}

}  // namespace nullctl

namespace nullctl {

double eval_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const Vector& coeffs, int i, int j,
                  double xi, double tau) {
  int idx[16];
  dofs.cell_dofs(i, j, idx);
  double sum = 0;
  if (dofs.element() == FiniteElement::BFS) {
    std::array<double, 4> X, T;
    for (int k = 0; k < 4; ++k) {
      X[k] = hermite_cubic(k, xi, mesh.dx).v;
      T[k] = hermite_cubic(k, tau, mesh.dt).v;
    }
    for (int k = 0; k < 16; ++k) {
      if (idx[k] < 0) continue;
      const int c = k / 4, kind = k % 4;
      sum += coeffs[idx[k]] * X[2 * (c % 2) + (kind & 1)] * T[2 * (c / 2) + (kind >> 1)];
    }
  } else {
    for (int k = 0; k < 4; ++k)
      if (idx[k] >= 0) sum += coeffs[idx[k]] * q1_shape(k, xi, tau).v;
  }
  return sum;
}

double eval_field(const SpaceTimeMesh& mesh, const DofMap& dofs, const Vector& coeffs, double x, double t) {
  const int i = std::clamp(static_cast<int>(std::floor(x / mesh.dx)), 0, mesh.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(t / mesh.dt)), 0, mesh.nt - 1);
  return eval_field(mesh, dofs, coeffs, i, j, x / mesh.dx - i, t / mesh.dt - j);
}

}  // namespace nullctl
