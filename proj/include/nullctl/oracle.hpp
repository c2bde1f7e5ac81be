#pragma once

#include <Eigen/Dense>

#include "nullctl/solvers.hpp"

namespace nullctl {

// 2 * int_a^b sin(p pi x) sin(q pi x) dx.
double c_pq(double a, double b, int p, int q);

// int_0^t rho0^{-2}(s) exp(c pi^2 (p^2 (s - T) + q^2 (s - t))) ds.
double d_pq(double t, int p, int q, const ProblemSpec& spec);

// Composite Gauss-Legendre on [lo, hi] with panels halving toward hi.
double graded_integral(const std::function<double(double)>& f, double lo, double hi, int levels = 40);

// Modal solution of the penalized problem: phi = sum_p a_p exp(c pi^2 p^2 (t - T)) sin(p pi x).
class FourierOracle {
 public:
  static FourierOracle build_and_solve(int N, const ProblemSpec& spec);

  int modes() const { return static_cast<int>(a_.size()); }
  const Vector& a() const { return a_; }
  const Vector& b0() const { return b0_; }
  const Eigen::MatrixXd& matrix() const { return M_; }
  const Vector& rhs() const { return F_; }
  const ProblemSpec& spec() const { return spec_; }

  // Sine coefficients of phi(., t) and y(., t).
  Vector adjoint_modes(double t) const;
  Vector state_modes(double t) const;

  double eval_phi(double x, double t) const;
  double eval_v(double x, double t) const;
  double eval_y(double x, double t) const;

  // |a_N| / |a|: weight of the last retained mode.
  double tail_ratio() const;
  // J*_eps(phi_T) = 1/2 |rho0^{-1} phi|^2_{q_T} + eps/2 |phi_T|^2 + (y0, phi(0)), by quadrature.
  double dual_value() const;

 private:
  ProblemSpec spec_;
  Vector a_, b0_, kappa_;
  Eigen::MatrixXd C_, M_;
  Vector F_;
};

// Sine coefficients b_q = 2 int_0^1 f(x) sin(q pi x) dx.
Vector sine_coefficients(const std::function<double(double)>& f, int N);

struct ErrorReport {
  double control_error = 0;  // |rho0 (v - v_h)|_{q_T} / |rho0 v|_{q_T}
  double state_error = 0;    // |y - y_h|_{Q_T} / |y|_{Q_T}
  double control_norm = 0;   // |rho0 v|_{q_T}
  double state_norm = 0;     // |y|_{Q_T}
};

ErrorReport error_report(const FourierOracle& oracle, const MixedSystem& system, const MixedSolution& solution);

}  // namespace nullctl
