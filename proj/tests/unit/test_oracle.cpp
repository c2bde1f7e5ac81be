#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nullctl/oracle.hpp"

using namespace nullctl;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Cpq, FullIntervalIsIdentity) {
  for (int p = 1; p < 6; ++p)
    for (int q = 1; q < 6; ++q) EXPECT_NEAR(c_pq(0, 1, p, q), p == q ? 1.0 : 0.0, 1e-14);
}

TEST(Cpq, Symmetric) {
  for (int p = 1; p < 9; ++p)
    for (int q = 1; q < 9; ++q) EXPECT_DOUBLE_EQ(c_pq(0.2, 0.5, p, q), c_pq(0.2, 0.5, q, p));
}

TEST(Cpq, MatchesQuadrature) {
  const auto g = gauss_legendre(30);
  const double ref = g.integrate(0.2, 0.5, [](double x) { return 2 * std::sin(pi * x) * std::sin(2 * pi * x); });
  EXPECT_NEAR(c_pq(0.2, 0.5, 1, 2), ref, 1e-14);
  const double ref2 = g.integrate(0.2, 0.5, [](double x) { return 2 * std::sin(3 * pi * x) * std::sin(3 * pi * x); });
  EXPECT_NEAR(c_pq(0.2, 0.5, 3, 3), ref2, 1e-14);
}

// The integrand depends on t through exp(-c pi^2 q^2 t); with that factor removed the
// integral over [0, t] of a nonnegative function remains.
TEST(Dpq, ZeroAtStartNonnegativeAndMonotone) {
  const auto spec = ProblemSpec::baseline();
  EXPECT_EQ(d_pq(0.0, 1, 2, spec), 0.0);
  const double k = spec.c * pi * pi;
  double prev = 0;
  for (double t = 0.05; t <= 0.5; t += 0.05) {
    const double d = d_pq(t, 2, 1, spec);
    EXPECT_GE(d, 0.0);
    const double undamped = std::exp(k * t) * d;
    EXPECT_GE(undamped, prev);
    prev = undamped;
  }
}

TEST(Dpq, UnitWeightClosedForm) {
  auto spec = ProblemSpec::baseline();
  spec.rho0 = WeightSpec::unit(spec.T);
  const double c = spec.c, T = spec.T;
  for (int p : {1, 3}) {
    const double t = 0.3, k = c * pi * pi * p * p;
    // int_0^t exp(k (2s - T - t)) ds
    const double exact = std::exp(-k * (T + t)) * (std::exp(2 * k * t) - 1) / (2 * k);
    EXPECT_NEAR(d_pq(t, p, p, spec) / exact, 1.0, 1e-12);
  }
}

TEST(Oracle, ZeroDatum) {
  auto spec = ProblemSpec::baseline();
  spec.y0 = [](double) { return 0.0; };
  EXPECT_EQ(FourierOracle::build_and_solve(20, spec).a().norm(), 0.0);
}

TEST(Oracle, SingleModeHandFormula) {
  const auto spec = ProblemSpec::baseline();
  const auto o = FourierOracle::build_and_solve(1, spec);
  const double k = spec.c * pi * pi;
  const double t_int = graded_integral(
      [&](double t) { return std::pow(eval_rho0_inv(spec.rho0, t), 2) * std::exp(2 * k * (t - spec.T)); }, 0.0,
      spec.T);
  const double m11 = c_pq(0.2, 0.5, 1, 1) / 2 * t_int + spec.eps / 2;
  EXPECT_NEAR(o.matrix()(0, 0) / m11, 1.0, 1e-10);
  EXPECT_NEAR(o.a()[0] / (-(std::exp(-k * spec.T) / 2) / m11), 1.0, 1e-10);
}

TEST(Oracle, OptimalityResidualAndSpd) {
  const auto o = FourierOracle::build_and_solve(50, ProblemSpec::baseline());
  EXPECT_LE((o.matrix() * o.a() - o.rhs()).norm(), 1e-12 * o.rhs().norm());
  EXPECT_EQ((o.matrix() - o.matrix().transpose()).norm(), 0.0);
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(o.matrix()).info(), Eigen::Success);
}

TEST(Oracle, TruncationStable) {
  const auto spec = ProblemSpec::baseline();
  const auto a40 = FourierOracle::build_and_solve(40, spec), a50 = FourierOracle::build_and_solve(50, spec);
  EXPECT_LE((a50.a().head(40) - a40.a()).norm(), 1e-10 * a50.a().norm());
  EXPECT_LT(a50.tail_ratio(), 1e-10);
}

TEST(Oracle, StateStartsAtInitialDatum) {
  const auto o = FourierOracle::build_and_solve(10, ProblemSpec::baseline());
  for (double x : {0.1, 0.33, 0.5, 0.9}) EXPECT_NEAR(o.eval_y(x, 0.0), std::sin(pi * x), 1e-8);
}

TEST(Oracle, ControlSupportedInOmega) {
  const auto o = FourierOracle::build_and_solve(20, ProblemSpec::baseline());
  EXPECT_EQ(o.eval_v(0.1, 0.2), 0.0);
  EXPECT_EQ(o.eval_v(0.6, 0.2), 0.0);
  EXPECT_NE(o.eval_v(0.3, 0.2), 0.0);
}

TEST(Oracle, FinalStateIsPenalizedAdjoint) {
  const auto spec = ProblemSpec::baseline();
  const auto o = FourierOracle::build_and_solve(50, spec);
  const auto g = gauss_legendre(40);
  const double yT = std::sqrt(g.integrate(0.0, 1.0, [&](double x) { return std::pow(o.eval_y(x, spec.T), 2); }));
  EXPECT_NEAR(yT, 0.168, 0.1 * 0.168);
  for (double x : {0.2, 0.45, 0.8}) EXPECT_NEAR(o.eval_y(x, spec.T), -spec.eps * o.eval_phi(x, spec.T), 1e-9);
}

TEST(Oracle, DualValueAtOptimum) {
  const auto o = FourierOracle::build_and_solve(50, ProblemSpec::baseline());
  const double quadratic = -0.5 * o.a().dot(o.matrix() * o.a());
  EXPECT_NEAR(o.dual_value() / quadratic, 1.0, 1e-8);
}

TEST(Oracle, RejectsZeroEps) {
  auto spec = ProblemSpec::baseline();
  spec.eps = 0;
  EXPECT_THROW(FourierOracle::build_and_solve(10, spec), DomainError);
}

TEST(ErrorReport, FiniteElementSolutionConverges) {
  const auto spec = ProblemSpec::baseline();
  const auto o = FourierOracle::build_and_solve(50, spec);
  double prev_c = INFINITY, prev_s = INFINITY;
  for (int nx : {10, 20, 40}) {
    const auto sys = assemble_mf1(build_mesh(nx, nx / 2, spec.T), spec);
    const auto e = error_report(o, sys, solve_direct(sys));
    EXPECT_LT(e.control_error, prev_c);
    EXPECT_LT(e.state_error, prev_s);
    prev_c = e.control_error;
    prev_s = e.state_error;
  }
  EXPECT_LT(prev_c, 1e-3);
}

TEST(ErrorReport, MismatchedSpecRejected) {
  auto spec = ProblemSpec::baseline();
  const auto o = FourierOracle::build_and_solve(10, spec);
  spec.eps = 1e-4;
  const auto sys = assemble_mf1(build_mesh(10, 5, spec.T), spec);
  EXPECT_ANY_THROW(error_report(o, sys, solve_direct(sys)));
}
