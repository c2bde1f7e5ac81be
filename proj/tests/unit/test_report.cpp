#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nullctl/report.hpp"

using namespace nullctl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nullctl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, DefaultsAreBaseline) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.problem.c, 0.1);
  EXPECT_EQ(cfg.problem.d, 0.0);
  EXPECT_EQ(cfg.problem.omega_a, 0.2);
  EXPECT_EQ(cfg.problem.omega_b, 0.5);
  EXPECT_EQ(cfg.problem.T, 0.5);
  EXPECT_EQ(cfg.problem.y0, "sine1");
  const auto spec = cfg.problem_spec();
  EXPECT_NEAR(spec.y0(0.5), 1.0, 1e-15);
  EXPECT_EQ(spec.rho0, WeightSpec::poly_exp(1.5, 0.75, 0.5));
}

TEST(Config, ParsesKeysAndComments) {
  const auto cfg = parse_config(
      "# comment\n"
      "problem.eps = 1e-4\n"
      "problem.r=100   # trailing\n"
      "\n"
      "mesh.nx=20\n"
      "solver.path=cg\n"
      "solver.dirichlet=keep\n"
      "problem.formulation=mf3\n"
      "problem.y0=series\n"
      "problem.y0_coefficients=1, 0.5\n"
      "mesh.family=10,20,40\n");
  EXPECT_EQ(cfg.problem.eps, 1e-4);
  EXPECT_EQ(cfg.problem.r, 100.0);
  EXPECT_EQ(cfg.mesh.nx, 20);
  EXPECT_EQ(cfg.mesh.nt, 10);
  EXPECT_EQ(cfg.solver.path, SolvePath::CG);
  EXPECT_EQ(cfg.solver.dirichlet, DirichletMode::Keep);
  EXPECT_EQ(cfg.problem.formulation, Formulation::MF3Norm);
  EXPECT_NEAR(cfg.problem_spec().y0(0.25), std::sin(M_PI / 4) + 0.5, 1e-15);
  const auto m = cfg.meshes();
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[2], std::make_pair(40, 20));
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  EXPECT_EQ(line_of("problem.c=0.1\nproblem.bogus=1\n"), 2);
  EXPECT_EQ(line_of("\n\nmesh.nx=abc\n"), 3);
  EXPECT_EQ(line_of("solver.path=magic"), 1);
  EXPECT_EQ(line_of("no equals sign"), 1);
  EXPECT_EQ(line_of("problem.formulation=mf9"), 1);
  EXPECT_THROW(parse_config("mesh.nx=0"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(csv_number(0.1), "0.1");
  EXPECT_EQ(csv_number(1.0 / 3), "0.333333333");
  EXPECT_EQ(csv_number(12345678901.0), "1.23456789e+10");
  EXPECT_EQ(csv_number(NAN), "");
}

TEST(Csv, TableLayout) {
  CsvTable t{"demo table", {"a", "b"}, {{"1", "2"}, {"3", ""}}};
  EXPECT_EQ(t.str(), "# demo table\na,b\n1,2\n3,\n");
}

TEST(FitRate, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) pts.emplace_back(h, 2 * h * h * h);
  const auto f = fit_rate(pts);
  EXPECT_NEAR(f.slope, 3.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(2.0), 1e-12);
}

TEST(FitRate, Preconditions) {
  EXPECT_THROW(fit_rate({{0.1, 1}, {0.05, 0.5}}), DomainError);
  EXPECT_THROW(fit_rate({{0.1, 1}, {0.05, 0.0}, {0.025, 0.2}}), DomainError);
}

TEST(Run, ZeroDatumGivesZeroErrors) {
  const auto dir = scratch_dir("zero");
  auto cfg = parse_config("problem.y0=zero\nmesh.family=10,20,40\noracle.N=10\noutput.dir=" + dir.string());
  const auto rep = run(cfg);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.control_error, 0.0);
    EXPECT_EQ(r.state_error, 0.0);
  }
  fs::remove_all(dir);
}

TEST(Run, DeterministicCsvAndDecreasingH) {
  const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  const std::string base = "mesh.family=20,10,40\noracle.N=30\n";
  const auto rep = run(parse_config(base + "output.dir=" + d1.string()));
  run(parse_config(base + "output.dir=" + d2.string()));
  EXPECT_EQ(slurp(d1 / "report.csv"), slurp(d2 / "report.csv"));
  EXPECT_EQ(slurp(d1 / "slopes.csv"), slurp(d2 / "slopes.csv"));
  EXPECT_EQ(slurp(d1 / "report.csv").rfind("# ", 0), 0u);
  for (size_t k = 1; k < rep.rows.size(); ++k) EXPECT_LT(rep.rows[k].h, rep.rows[k - 1].h);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Run, CgAndDirectAgree) {
  const auto d = scratch_dir("paths");
  const std::string base = "mesh.nx=20\noracle.N=30\noutput.dir=" + d.string() + "\n";
  const auto a = run(parse_config(base + "solver.path=direct")).rows.at(0);
  const auto b = run(parse_config(base + "solver.path=cg")).rows.at(0);
  EXPECT_NEAR(a.control_error, b.control_error, 1e-6 * a.control_error);
  EXPECT_NEAR(a.state_norm, b.state_norm, 1e-6 * a.state_norm);
  EXPECT_NEAR(a.lstar, b.lstar, 1e-6 * a.lstar);
  fs::remove_all(d);
}

TEST(Reference, SelfComparisonIsZero) {
  auto cfg = parse_config("problem.eps=0\nproblem.formulation=mf3\nsolver.path=cg");
  auto spec = cfg.problem_spec();
  const auto sys = assemble_mf3norm(build_mesh(20, 10, spec.T), spec);
  const auto sol = cg_dual(sys);
  const auto ref = sample_reference(sys, sol, 40, 20);
  const auto e = compare_to_reference(ref, sys, sol);
  EXPECT_EQ(e.control_error, 0.0);
  EXPECT_EQ(e.state_error, 0.0);
  EXPECT_GT(ref.control_norm, 0.0);
}

TEST(Reference, SaveLoadRoundTrip) {
  auto cfg = parse_config("problem.eps=0\nproblem.formulation=mf3\nsolver.path=cg");
  const auto ref = fine_reference(cfg, 20, 10);
  const auto dir = scratch_dir("ref");
  ref.save((dir / "ref.txt").string());
  const auto back = FineReference::load((dir / "ref.txt").string());
  EXPECT_EQ(back.nx, 20);
  EXPECT_EQ(back.control, ref.control);
  EXPECT_EQ(back.state, ref.state);
  EXPECT_EQ(back.control_norm, ref.control_norm);
  fs::remove_all(dir);
}

TEST(Reference, MemoryGuard) {
  auto cfg = parse_config("problem.eps=0\nproblem.formulation=mf3");
  EXPECT_THROW(fine_reference(cfg, 640, 320, 100000), Error);
}

TEST(Tables, UnknownNameListsAvailable) {
  try {
    table("no-such-table");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("infsup-r1"), std::string::npos);
  }
}

TEST(Tables, EveryNameHasPublishedValues) {
  std::ifstream in(default_published_path());
  ASSERT_TRUE(in.good());
  const std::string text = slurp(default_published_path());
  for (const auto& name : table_names()) EXPECT_NE(text.find("\"" + name + "\""), std::string::npos) << name;
  EXPECT_EQ(table_names().size(), 20u);
}

TEST(Tables, CgCountsSmoke) {
  const auto dir = scratch_dir("table");
  TableOptions o;
  o.cache_dir = dir.string();
  o.max_nx = 20;
  o.kappa_max_nx = 10;
  const auto t = table("cg-counts", o);
  EXPECT_EQ(t.header.front(), "quantity");
  EXPECT_EQ(t.header.back(), "rel_diff");
  int counted = 0;
  for (const auto& row : t.rows)
    if (row[0] == "iterations" && !row[5].empty() && !row[6].empty()) {
      EXPECT_LE(std::abs(std::stod(row[5]) - std::stod(row[6])), 1.0) << row[1] << " " << row[2];
      ++counted;
    }
  EXPECT_EQ(counted, 18);
  fs::remove_all(dir);
}
