#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nullctl/assembly.hpp"

namespace nullctl {

// Control as a function of (x, t); an empty function means no control.
using ControlFunction = std::function<double(double, double)>;

struct ForwardRun {
  int nx_f = 0;
  int nt_f = 0;
  double T = 0;
  ForwardOperators ops;
  std::vector<Vector> trajectory;  // coefficients at t_n = n T / nt_f, n = 0..nt_f
  double final_l2 = 0;

  const Vector& final_state() const { return trajectory.back(); }
  double dt() const { return T / nt_f; }
};

// M y' + K y = F(t), BDF2 with a backward Euler first step, control taken at the new level.
ForwardRun solve_forward(const ProblemSpec& spec, const ControlFunction& control, int nx_f, int nt_f);

// sqrt(y^T M y) at t = T.
double final_norm(const ForwardRun& run);

// L2 projection of f onto the Hermite space.
Vector project(const ForwardOperators& ops, const ProblemSpec& spec, const std::function<double(double)>& f);

// Value of the state at step n and position x.
double eval_state(const ForwardRun& run, int step, double x);

// CSV with columns t, x, y on a uniform x grid of `samples` points per step.
void write_trajectory_csv(const ForwardRun& run, const std::string& path, int samples = 21);

}  // namespace nullctl
