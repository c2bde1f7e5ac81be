#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace nullctl {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Operator = std::function<Vector(const Vector&)>;

enum class Symmetry { SPD, Indefinite };

// Reusable sparse factorization: Cholesky for SPD input, pivoted LU otherwise.
class Factorization {
 public:
  enum class Kind { Cholesky, LU };

  Factorization() = default;
  Factorization(const SparseMatrix& matrix, Symmetry symmetry);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Vector solve(const Vector& rhs) const;
  explicit operator bool() const { return impl_ != nullptr; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Kind kind_ = Kind::Cholesky;
  Eigen::Index rows_ = 0;
};

Factorization factor(const SparseMatrix& matrix, Symmetry symmetry = Symmetry::SPD);
Vector solve(const Factorization& fact, const Vector& rhs);

enum class Extreme { Largest, SmallestViaInverse };

// Lanczos (with full J-reorthogonalization) copes with clustered or repeated extreme eigenvalues,
// where plain power iteration stalls.
enum class EigenMethod { Power, Lanczos };

struct EigenOptions {
  double tol = 1e-8;
  int maxit = 1000;
  unsigned seed = 20240607u;
  EigenMethod method = EigenMethod::Power;
};

struct EigenEstimate {
  double value = 0;
  int iterations = 0;
  bool converged = false;
  Vector vector;
};

// Extreme eigenvalue of the pencil M x = mu J x by power iteration in the J-inner product.
// step must apply J^{-1} M (Largest) or M^{-1} J (SmallestViaInverse).
EigenEstimate extreme_eigen(const Operator& step, const SparseMatrix& metric, Extreme which,
                            const EigenOptions& opts = {});
EigenEstimate extreme_eigen(const SparseMatrix& M, const SparseMatrix& J, Extreme which,
                            const EigenOptions& opts = {});

// |lambda|_max / |lambda|_min of a symmetric matrix.
double cond_estimate(const SparseMatrix& matrix, const EigenOptions& opts = {1e-6, 1000});

Vector random_vector(Eigen::Index n, unsigned seed);

}  // namespace nullctl
