#include <gtest/gtest.h>

#include <cmath>

#include "nullctl/solvers.hpp"

using namespace nullctl;

namespace {

MixedSystem mf1(int nx, double r, double eps) {
  auto spec = ProblemSpec::baseline();
  spec.r = r;
  spec.eps = eps;
  return assemble_mf1(build_mesh(nx, nx / 2, spec.T), spec);
}

MixedSystem mf3(int nx, double r) {
  auto spec = ProblemSpec::baseline();
  spec.r = r;
  spec.eps = 0;
  return assemble_mf3norm(build_mesh(nx, nx / 2, spec.T), spec);
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

double constraint(const MixedSystem& s, const Vector& phi) {
  return (s.B * phi).lpNorm<Eigen::Infinity>() / (1 + phi.lpNorm<Eigen::Infinity>());
}

}  // namespace

TEST(SolveDirect, ZeroDatumGivesZeroSolution) {
  auto spec = ProblemSpec::baseline();
  spec.y0 = [](double) { return 0.0; };
  const auto sys = assemble_mf1(build_mesh(10, 5, spec.T), spec);
  const auto sol = solve_direct(sys);
  EXPECT_EQ(sol.phi.norm(), 0.0);
  EXPECT_EQ(sol.lambda.norm(), 0.0);
  const auto cg = cg_dual(sys);
  EXPECT_EQ(cg.phi.norm(), 0.0);
  EXPECT_EQ(cg.iterations, 0);
}

TEST(SolveDirect, ResidualsAndConstraint) {
  for (double r : {1e-2, 1.0, 1e2}) {
    const auto sys = mf1(20, r, 1e-2);
    const auto sol = solve_direct(sys);
    EXPECT_LE(sol.residual, 1e-9);
    EXPECT_LE(sol.constraint, 1e-8);
    EXPECT_LE(constraint(sys, sol.phi), 1e-8);
  }
  const auto sys = mf3(20, 1.0);
  const auto sol = solve_direct(sys);
  EXPECT_LE(sol.residual, 1e-9);
  EXPECT_LE(constraint(sys, sol.phi), 1e-8);
}

TEST(SolveDirect, ControlVanishesOutsideOmega) {
  const auto sys = mf1(20, 1.0, 1e-2);
  const auto sol = solve_direct(sys);
  const ControlField v(sys, sol);
  for (double t : {0.05, 0.2, 0.4}) {
    EXPECT_EQ(v(0.1, t), 0.0);
    EXPECT_EQ(v(0.7, t), 0.0);
    EXPECT_NE(v(0.35, t), 0.0);
  }
}

TEST(InfSup, CoarseMeshValues) {
  EXPECT_NEAR(infsup_delta(mf1(20, 1.0, 1e-2)).delta, 0.9933, 0.005 * 0.9933);
  EXPECT_NEAR(infsup_delta(mf1(20, 1e-2, 1e-2)).delta, 8.358, 0.01 * 8.358);
  EXPECT_NEAR(infsup_delta(mf1(20, 1e2, 1e-2)).delta, 9.933e-2, 0.005 * 9.933e-2);
}

TEST(InfSup, ScalesWithSqrtR) {
  const double d1 = infsup_delta(mf1(20, 1.0, 1e-4)).delta;
  const double d100 = infsup_delta(mf1(20, 1e2, 1e-4)).delta;
  EXPECT_NEAR(10 * d100 / d1, 1.0, 0.02);
}

TEST(InfSup, StableUnderRefinement) {
  const double a = infsup_delta(mf1(10, 1.0, 1e-2)).delta;
  const double b = infsup_delta(mf1(40, 1.0, 1e-2)).delta;
  EXPECT_LT(std::abs(a - b) / b, 0.05);
}

TEST(CgConditionBound, Values) {
  EXPECT_NEAR(cg_condition_bound(1.0, infsup_delta(mf1(20, 1.0, 1e-2)).delta), 1.013, 0.01 * 1.013);
  EXPECT_NEAR(cg_condition_bound(1e-2, infsup_delta(mf1(20, 1e-2, 1e-2)).delta), 1.431, 0.02 * 1.431);
  EXPECT_DOUBLE_EQ(cg_condition_bound(4.0, 0.5), 1.0);
}

TEST(CgDual, IterationCounts) {
  for (int nx : {10, 20, 40}) EXPECT_NEAR(cg_dual(mf1(nx, 1.0, 1e-2)).iterations, 5, 1);
  EXPECT_NEAR(cg_dual(mf1(10, 1e-2, 1e-2)).iterations, 9, 1);
}

TEST(CgDual, AgreesWithDirect) {
  for (double r : {1e-2, 1.0}) {
    const auto sys = mf1(20, r, 1e-2);
    const auto d = solve_direct(sys), c = cg_dual(sys);
    EXPECT_LT(rel(c.phi, d.phi), 1e-6);
    EXPECT_LT(rel(c.lambda, d.lambda), 1e-6);
    EXPECT_LE(constraint(sys, c.phi), 1e-8);
  }
  const auto sys = mf3(20, 1.0);
  const auto d = solve_direct(sys), c = cg_dual(sys);
  EXPECT_LT(rel(c.phi, d.phi), 1e-6);
  EXPECT_LT(rel(c.lambda, d.lambda), 1e-6);
}

TEST(CgDual, MaxitExceeded) { EXPECT_THROW(cg_dual(mf1(10, 1e-2, 1e-2), 1e-10, 2), SolverError); }

TEST(DualOperator, SymmetricPositiveInMetric) {
  const auto sys = mf1(10, 1.0, 1e-2);
  const DualOperator op(sys);
  const Vector mu = random_vector(sys.m(), 1), nu = random_vector(sys.m(), 2);
  const double a = (sys.J * op.apply(mu)).dot(nu), b = (sys.J * op.apply(nu)).dot(mu);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
  for (unsigned s = 3; s < 8; ++s) {
    const Vector x = random_vector(sys.m(), s);
    EXPECT_GT((sys.J * op.apply(x)).dot(x), 0.0);
  }
}

TEST(SolutionNorms, FinalMultiplierTracksPenalty) {
  const auto coarse = solution_norms(mf1(10, 1.0, 1e-2), solve_direct(mf1(10, 1.0, 1e-2)));
  const auto fine = solution_norms(mf1(40, 1.0, 1e-2), solve_direct(mf1(40, 1.0, 1e-2)));
  EXPECT_LT(fine.penalty_gap, coarse.penalty_gap);
  EXPECT_NEAR(fine.final_multiplier, 0.17, 0.02);
}

TEST(SolutionNorms, EpsilonSequenceApproachesNormalizedControl) {
  const int nx = 20;
  const auto sys3 = mf3(nx, 1.0);
  const auto sol3 = solve_direct(sys3);
  const ControlField v3(sys3, sol3);
  double prev = INFINITY;
  for (double eps : {1e-2, 1e-4, 1e-8}) {
    const auto sys = mf1(nx, 1.0, eps);
    const auto sol = solve_direct(sys);
    const ControlField v(sys, sol);
    double diff = 0;
    for_each_point(
        sys.mesh, QuadRule<double>(4),
        [&](int i, int j, double xi, double tau, double x, double t, double w) {
          const double d = v.weighted(i, j, xi, tau, x, t) - v3.weighted(i, j, xi, tau, x, t);
          diff += w * d * d;
        },
        sys.spec.omega_a, sys.spec.omega_b);
    diff = std::sqrt(diff);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
}
