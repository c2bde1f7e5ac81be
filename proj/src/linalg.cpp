#include "nullctl/linalg.hpp"

#include <cmath>
#include <random>
#include <variant>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "nullctl/errors.hpp"

namespace nullctl {

struct Factorization::Impl {
  std::variant<Eigen::SimplicialLLT<SparseMatrix>, Eigen::SparseLU<SparseMatrix>> solver;
};

Factorization::Factorization(const SparseMatrix& matrix, Symmetry symmetry)
    : kind_(symmetry == Symmetry::SPD ? Kind::Cholesky : Kind::LU), rows_(matrix.rows()) {
  if (matrix.rows() != matrix.cols()) throw SolverError("factorization needs a square matrix");
  auto impl = std::make_shared<Impl>();
  if (kind_ == Kind::Cholesky) {
    auto& llt = impl->solver.emplace<0>();
    llt.compute(matrix);
    if (llt.info() != Eigen::Success)
      throw SolverError("Cholesky factorization failed: matrix is not positive definite");
  } else {
    auto& lu = impl->solver.emplace<1>();
    lu.analyzePattern(matrix);
    lu.factorize(matrix);
    if (lu.info() != Eigen::Success) throw SolverError("LU factorization failed: " + lu.lastErrorMessage());
  }
  impl_ = std::move(impl);
}

Vector Factorization::solve(const Vector& rhs) const {
  if (!impl_) throw SolverError("solve on an empty factorization");
  if (rhs.size() != rows_) throw SolverError("right-hand side has the wrong size");
  return std::visit([&](const auto& s) -> Vector { return s.solve(rhs); }, impl_->solver);
}

Factorization factor(const SparseMatrix& matrix, Symmetry symmetry) { return {matrix, symmetry}; }

Vector solve(const Factorization& fact, const Vector& rhs) { return fact.solve(rhs); }

Vector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

namespace {

EigenEstimate lanczos(const Operator& step, const SparseMatrix& metric, Extreme which, const EigenOptions& opts) {
  EigenEstimate est;
  const Eigen::Index n = metric.rows();
  const int kmax = static_cast<int>(std::min<Eigen::Index>(opts.maxit, n));
  Eigen::MatrixXd Q(n, kmax), JQ(n, kmax);
  Vector q = random_vector(n, opts.seed);
  Vector Jq = metric * q;
  double nrm = std::sqrt(q.dot(Jq));
  Q.col(0) = q / nrm;
  JQ.col(0) = Jq / nrm;
  std::vector<double> alpha, beta;
  double prev = 0;
  for (int k = 0; k < kmax; ++k) {
    Vector z = step(Q.col(k));
    alpha.push_back(JQ.col(k).dot(z));
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) z -= Q.leftCols(k + 1) * (JQ.leftCols(k + 1).transpose() * z);
    Vector Jz = metric * z;
    const double b = std::sqrt(std::max(0.0, z.dot(Jz)));

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      T(i, i) = alpha[i];
      if (i < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int top = k;
    const double theta = es.eigenvalues()[top];
    const double resid = b * std::abs(es.eigenvectors()(k, top));
    est.value = which == Extreme::Largest ? theta : 1.0 / theta;
    est.iterations = k + 1;
    est.vector = Q.leftCols(k + 1) * es.eigenvectors().col(top);
    const bool settled = k > 0 && std::abs(theta - prev) <= opts.tol * std::abs(theta);
    if ((settled && resid <= std::sqrt(opts.tol) * std::abs(theta)) || b <= 1e-14 * std::abs(theta)) {
      est.converged = true;
      return est;
    }
    prev = theta;
    if (k + 1 < kmax) {
      beta.push_back(b);
      Q.col(k + 1) = z / b;
      JQ.col(k + 1) = Jz / b;
    }
  }
  return est;
}

}  // namespace

EigenEstimate extreme_eigen(const Operator& step, const SparseMatrix& metric, Extreme which,
                            const EigenOptions& opts) {
  if (opts.method == EigenMethod::Lanczos) return lanczos(step, metric, which, opts);
  EigenEstimate est;
  Vector x = random_vector(metric.rows(), opts.seed);
  x /= std::sqrt(x.dot(metric * x));
  double prev = 0;
  for (int it = 1; it <= opts.maxit; ++it) {
    Vector y = step(x);
    const Vector Jx = metric * x;
    const double mu = Jx.dot(y);  // x is J-normalized
    const double value = which == Extreme::Largest ? mu : 1.0 / mu;
    est.value = value;
    est.iterations = it;
    if (it > 1 && std::abs(value - prev) <= opts.tol * std::abs(value)) {
      est.converged = true;
      est.vector = x;
      return est;
    }
    prev = value;
    x = y / std::sqrt(y.dot(metric * y));
  }
  est.vector = x;
  return est;
}

EigenEstimate extreme_eigen(const SparseMatrix& M, const SparseMatrix& J, Extreme which,
                            const EigenOptions& opts) {
  if (which == Extreme::Largest) {
    const Factorization fj(J, Symmetry::SPD);
    return extreme_eigen([&](const Vector& x) { return fj.solve(M * x); }, J, which, opts);
  }
  const Factorization fm(M, Symmetry::SPD);
  return extreme_eigen([&](const Vector& x) { return fm.solve(J * x); }, J, which, opts);
}

namespace {

// Power iteration for the dominant |eigenvalue| of a symmetric operator.
double dominant_abs(const Operator& op, Eigen::Index n, const EigenOptions& opts) {
  Vector x = random_vector(n, opts.seed);
  x.normalize();
  double prev = 0;
  for (int it = 1; it <= opts.maxit; ++it) {
    // Two applications per sweep so that +mu and -mu pairs do not stall the estimate.
    Vector y = op(x);
    Vector z = op(y);
    const double value = std::sqrt(z.norm());
    if (it > 1 && std::abs(value - prev) <= opts.tol * value) return value;
    prev = value;
    x = z / z.norm();
  }
  return prev;
}

}  // namespace

double cond_estimate(const SparseMatrix& matrix, const EigenOptions& opts) {
  const Factorization f(matrix, Symmetry::Indefinite);
  const Eigen::Index n = matrix.rows();
  const double big = dominant_abs([&](const Vector& x) { return Vector(matrix * x); }, n, opts);
  const double inv = dominant_abs([&](const Vector& x) { return f.solve(x); }, n, opts);
  return big * inv;
}

}  // namespace nullctl
