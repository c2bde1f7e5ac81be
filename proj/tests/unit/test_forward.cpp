#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nullctl/forward.hpp"

using namespace nullctl;

namespace {
constexpr double pi = std::numbers::pi;
const double kDecay = std::sqrt(0.5) * std::exp(-pi * pi * 0.1 * 0.5);
}  // namespace

TEST(Forward, UncontrolledSingleModeDecay) {
  const auto run = solve_forward(ProblemSpec::baseline(), {}, 64, 200);
  EXPECT_NEAR(final_norm(run) / kDecay, 1.0, 0.005);
  EXPECT_NEAR(final_norm(run), 0.431, 0.001);
  EXPECT_EQ(run.trajectory.size(), 201u);
  EXPECT_DOUBLE_EQ(run.final_l2, final_norm(run));
}

TEST(Forward, ZeroRun) {
  auto spec = ProblemSpec::baseline();
  spec.y0 = [](double) { return 0.0; };
  const auto run = solve_forward(spec, {}, 16, 20);
  for (const auto& y : run.trajectory) EXPECT_EQ(y.norm(), 0.0);
  EXPECT_EQ(final_norm(run), 0.0);
}

TEST(Forward, TwoModeDecay) {
  auto spec = ProblemSpec::baseline();
  spec.y0 = [](double x) { return std::sin(pi * x) + 0.5 * std::sin(2 * pi * x); };
  const auto run = solve_forward(spec, {}, 64, 400);
  const double k = spec.c * pi * pi * spec.T;
  const double exact = std::sqrt(0.5 * std::exp(-2 * k) + 0.125 * std::exp(-8 * k));
  EXPECT_NEAR(final_norm(run) / exact, 1.0, 1e-4);
}

TEST(Forward, SecondOrderInTime) {
  const auto spec = ProblemSpec::baseline();
  double prev = 0;
  std::vector<double> ratios;
  for (int nt : {20, 40, 80, 160}) {
    const double err = std::abs(final_norm(solve_forward(spec, {}, 64, nt)) - kDecay);
    if (prev > 0) ratios.push_back(err / prev);
    prev = err;
  }
  for (double r : ratios) EXPECT_NEAR(r, 0.25, 0.05);
}

TEST(Forward, Linearity) {
  const auto spec = ProblemSpec::baseline();
  auto zero = spec;
  zero.y0 = [](double) { return 0.0; };
  const ControlFunction v = [](double x, double t) { return std::cos(3 * x) * (1 + t); };
  const auto both = solve_forward(spec, v, 24, 30);
  const auto free = solve_forward(spec, {}, 24, 30);
  const auto forced = solve_forward(zero, v, 24, 30);
  for (size_t n = 0; n < both.trajectory.size(); ++n) {
    const Vector sum = free.trajectory[n] + forced.trajectory[n];
    EXPECT_LE((both.trajectory[n] - sum).norm(), 1e-10 * std::max(1.0, sum.norm()));
  }
}

TEST(Forward, RejectsBadResolution) {
  EXPECT_THROW(solve_forward(ProblemSpec::baseline(), {}, 1, 10), DomainError);
  EXPECT_THROW(solve_forward(ProblemSpec::baseline(), {}, 8, 0), DomainError);
}

TEST(Forward, StateEvaluationAndCsv) {
  const auto run = solve_forward(ProblemSpec::baseline(), {}, 32, 50);
  EXPECT_NEAR(eval_state(run, 0, 0.5), 1.0, 1e-5);
  EXPECT_EQ(eval_state(run, 0, 0.0), 0.0);
  const auto path = std::filesystem::temp_directory_path() / "nullctl_traj_test.csv";
  write_trajectory_csv(run, path.string(), 5);
  std::ifstream in(path);
  std::string line;
  int count = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,y");
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 51 * 5);
  std::filesystem::remove(path);
}
