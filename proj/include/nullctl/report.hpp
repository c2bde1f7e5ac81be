#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nullctl/config.hpp"
#include "nullctl/solvers.hpp"

namespace nullctl {

// 9 significant digits; NaN prints as an empty cell.
std::string csv_number(double value);

struct CsvTable {
  std::string title;  // written as a leading '# ' line
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
  void write(const std::string& path) const;
};

struct RateFit {
  double slope = 0;
  double intercept = 0;  // natural log of the constant
};

// Least squares on (log h, log e).
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

// Samples of rho0 v and y on a fixed lattice: cells x cells_t, 2x2 Gauss points per cell.
struct FineReference {
  int nx = 0;
  int nt = 0;
  double r = 0;
  int lattice_x = 320;
  int lattice_t = 160;
  std::vector<double> x, t, w;
  std::vector<double> control;  // rho0 v at each point, 0 outside omega
  std::vector<double> state;
  double control_norm = 0;
  double state_norm = 0;

  void save(const std::string& path) const;
  static FineReference load(const std::string& path);
};

struct ReferenceErrors {
  double control_error = 0;
  double state_error = 0;
};

// Solves the eps = 0 problem on an nx x nt mesh and samples it.
// Refuses meshes whose n_h + m_h exceeds max_dofs.
FineReference fine_reference(const RunConfig& config, int nx, int nt, long max_dofs = 1200000);
FineReference sample_reference(const MixedSystem& system, const MixedSolution& solution, int lattice_x = 320,
                               int lattice_t = 160);
ReferenceErrors compare_to_reference(const FineReference& reference, const MixedSystem& system,
                                     const MixedSolution& solution);

struct ReportRow {
  double h = 0;
  int nx = 0;
  int nt = 0;
  long n_h = 0;
  long m_h = 0;
  double lstar = NAN;
  double control_error = NAN;
  double state_error = NAN;
  double control_norm = NAN;
  double exact_control_norm = NAN;  // oracle |rho0 v|, when an oracle is used
  double state_norm = NAN;
  double final_multiplier = NAN;
  double final_forward = NAN;
  double kappa = NAN;
  double delta = NAN;
  double cond_bound = NAN;
  int iterations = -1;
};

struct Report {
  std::vector<ReportRow> rows;  // decreasing h
  std::map<std::string, RateFit> slopes;

  CsvTable table() const;
  CsvTable slope_table() const;
};

// One mesh of the configured problem along the configured solver path.
ReportRow solve_case(const RunConfig& config, int nx, int nt, const FineReference* reference = nullptr);

// All configured meshes; writes report.csv (and slopes.csv for >= 3 meshes) to config.output.dir.
Report run(const RunConfig& config);

struct TableOptions {
  std::string published_path;  // published comparator file; empty uses the installed default
  std::string cache_dir = ".";
  int max_nx = 160;  // larger meshes of a table are skipped
  int mf3_max_nx = 320;
  int infsup_max_nx = 160;
  int kappa_max_nx = 40;
  int reference_nx = 640;
  long max_dofs = 1200000;
  int quad_order = 6;
  DirichletMode dirichlet = DirichletMode::Eliminate;
};

std::vector<std::string> table_names();
std::string default_published_path();

// Runs the mesh and parameter family bound to name; columns
// quantity, parameter, h, nx, nt, computed, published, rel_diff.
CsvTable table(const std::string& name, const TableOptions& options = {});

}  // namespace nullctl
