#pragma once

#include <map>
#include <string>
#include <vector>

#include "nullctl/assembly.hpp"

namespace nullctl {

enum class SolvePath { Direct, CG, InfSup };

struct RunConfig {
  struct Problem {
    double c = 0.1;
    double d = 0.0;
    double omega_a = 0.2;
    double omega_b = 0.5;
    double T = 0.5;
    std::string y0 = "sine1";             // sine1 or series
    std::vector<double> y0_coefficients;  // y0 = sum_k a_k sin(k pi x) for series
    double eps = 1e-2;
    double r = 1.0;
    double eta = 1.0;
    Formulation formulation = Formulation::MF1;
  } problem;

  struct Weights {
    WeightKind kind = WeightKind::PolyExp;
    double k1 = 0.75;
    double s = 1.5;
  } weights;

  struct Mesh {
    int nx = 40;
    int nt = 20;
    std::vector<int> family;  // Nx values; Nt is chosen so that dt = dx
  } mesh;

  struct Solver {
    SolvePath path = SolvePath::Direct;
    double gamma = 1e-10;
    int maxit = 1000;
    double eigen_tol = 1e-8;
    DirichletMode dirichlet = DirichletMode::Eliminate;
    int quad_order = 6;
    bool kappa = false;
  } solver;

  struct Oracle {
    bool enabled = true;
    int modes = 50;
    int reference_nx = 0;        // eps = 0: fine mesh solved as the reference, 0 disables
    std::string reference_file;  // previously saved reference
  } oracle;

  struct Output {
    std::string dir = ".";
    bool dump_matrices = false;
    bool forward = false;
    bool trajectory = false;
    int forward_x_factor = 2;
    int forward_t_factor = 4;
  } output;

  ProblemSpec problem_spec() const;
  // (Nx, Nt) pairs for the configured family, or the single mesh.
  std::vector<std::pair<int, int>> meshes() const;
};

// Flat key=value lines, '#' comments, dotted section prefixes (problem.c=0.1).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Nt giving dt = dx for the given Nx and horizon.
int matched_nt(int nx, double T);

Formulation parse_formulation(const std::string& s);
DirichletMode parse_dirichlet(const std::string& s);

}  // namespace nullctl
