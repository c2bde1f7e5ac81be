#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nullctl/weights.hpp"

using namespace nullctl;

namespace {

const WeightSpec kRho0 = WeightSpec::poly_exp(1.5, 0.75, 0.5);
const WeightSpec kRho = WeightSpec::poly_exp(0.0, 0.75, 0.5);

}  // namespace

TEST(Weights, UnitIsOne) {
  const auto u = WeightSpec::unit(0.5);
  for (double t : {0.0, 0.1, 0.49}) {
    EXPECT_EQ(eval_rho0(u, t), 1.0);
    EXPECT_EQ(eval_rho0_inv(u, t), 1.0);
  }
  EXPECT_EQ(eval_rho0_inv(u, 0.5), 1.0);
}

TEST(Weights, PolyExpValues) {
  EXPECT_NEAR(eval_rho0(kRho0, 0.0), std::pow(0.5, 1.5) * std::exp(1.5), 1e-13);
  EXPECT_NEAR(eval_rho0_inv(kRho0, 0.25), 1.0 / (std::pow(0.25, 1.5) * std::exp(3.0)), 1e-15);
  EXPECT_NEAR(eval_rho(kRho, 0.0), std::exp(1.5), 1e-13);
  EXPECT_EQ(eval_rho_inv(kRho, 0.5), 0.0);
  EXPECT_EQ(eval_rho0_inv(kRho0, 0.5), 0.0);
}

TEST(Weights, LongDoubleEvaluationAgrees) {
  for (double t : {0.0, 0.1, 0.3, 0.45}) {
    const long double ref = eval_weight<long double>(kRho0, static_cast<long double>(t));
    EXPECT_NEAR(eval_rho0(kRho0, t) / static_cast<double>(ref), 1.0, 1e-14);
  }
}

TEST(Weights, BlowUpNearFinalTime) {
  double prev = eval_rho0(kRho0, 0.4);
  for (double t = 0.41; t < 0.5; t += 0.01) {
    const double v = eval_rho0(kRho0, t);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(eval_rho0(kRho0, 0.5 - 1e-3), 1e300);
}

TEST(Weights, InverseVanishesContinuously) {
  for (double tau = 0.5 / 50; tau > 1e-9; tau /= 3) EXPECT_LT(eval_rho0_inv(kRho0, 0.5 - tau), 1e-12);
}

TEST(Weights, PositiveOnCompactSubintervals) {
  for (double t = 0; t < 0.49; t += 0.01) {
    EXPECT_GT(eval_rho0(kRho0, t), 0.0);
    EXPECT_TRUE(std::isfinite(eval_rho0(kRho0, t)));
  }
}

TEST(Weights, Errors) {
  EXPECT_THROW(eval_rho0(kRho0, 0.5), DomainError);
  EXPECT_THROW(eval_rho0(kRho0, -0.1), DomainError);
  EXPECT_THROW(eval_rho0(WeightSpec::carleman_typed(1, 1, 0.5), 0.1), UnsupportedError);
  EXPECT_THROW(WeightSpec::poly_exp(-1, 0.75, 0.5), DomainError);
  EXPECT_THROW(WeightSpec::poly_exp(1.5, 0.0, 0.5), DomainError);
  EXPECT_THROW(normalized_coeffs(kRho0, WeightSpec::poly_exp(0, 1.0, 0.5), 0.1), UnsupportedError);
  EXPECT_THROW(normalized_coeffs(kRho0, WeightSpec::unit(0.5), 0.1), UnsupportedError);
}

TEST(Weights, NormalizedCoeffsAtZero) {
  const auto c = normalized_coeffs(kRho0, kRho, 0.0);
  EXPECT_NEAR(c.alpha1, std::pow(0.5, 1.5), 1e-15);
  // alpha0 = -rho0'/rho = s tau^{s-1} - K1 tau^{s-2}.
  EXPECT_NEAR(c.alpha0, 1.5 * std::sqrt(0.5) - 0.75 / std::sqrt(0.5), 1e-14);
  EXPECT_LT(normalized_coeffs(kRho0, kRho, 0.5 - 1e-10).alpha1, 1e-14);
}

// rho^{-1} L*(rho0 psi) by the product rule against alpha1 L*psi + alpha0 psi,
// with psi(x, t) = (1 + x t^2)(x - x^3) and L* = -d/dt - c d2/dx2.
TEST(Weights, PairCancellationIdentity) {
  const double c = 0.1;
  auto psi = [](double x, double t) { return (1 + x * t * t) * (x - x * x * x); };
  auto psi_t = [](double x, double t) { return 2 * x * t * (x - x * x * x); };
  auto psi_xx = [](double x, double t) {
    // d2/dx2 of (x - x^3 + x^2 t^2 - x^4 t^2)
    return -6 * x + 2 * t * t - 12 * x * x * t * t;
  };
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> ux(0, 1), ut(0, 0.499);
  for (int k = 0; k < 50; ++k) {
    const double x = ux(gen), t = ut(gen);
    const double tau = 0.5 - t;
    const double rho0 = eval_rho0(kRho0, t), rho = eval_rho(kRho, t);
    const double rho0_t = rho0 * (-1.5 / tau + 0.75 / (tau * tau));
    const double lhs = (-(rho0_t * psi(x, t) + rho0 * psi_t(x, t)) - c * rho0 * psi_xx(x, t)) / rho;
    const auto a = normalized_coeffs(kRho0, kRho, t);
    const double rhs = a.alpha1 * (-psi_t(x, t) - c * psi_xx(x, t)) + a.alpha0 * psi(x, t);
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST(Weights, UnitPairCoefficients) {
  const auto c = normalized_coeffs(WeightSpec::unit(0.5), WeightSpec::unit(0.5), 0.2);
  EXPECT_EQ(c.alpha1, 1.0);
  EXPECT_EQ(c.alpha0, 0.0);
}
