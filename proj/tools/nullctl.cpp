#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "nullctl/config.hpp"
#include "nullctl/errors.hpp"
#include "nullctl/forward.hpp"
#include "nullctl/oracle.hpp"
#include "nullctl/report.hpp"

using namespace nullctl;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  bool dump = false;
  int quad_order = 0;
  std::string dirichlet;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key=value configuration file");
  app->add_option("--out", c.out_dir, "output directory");
  app->add_flag("--dump-matrices", c.dump, "write A, B, J in coordinate format");
  app->add_option("--quad-order", c.quad_order, "Gauss points per direction")->check(CLI::Range(2, 20));
  app->add_option("--dirichlet", c.dirichlet, "eliminate or keep")->check(CLI::IsMember({"eliminate", "keep"}));
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? parse_config("") : load_config(c.config_path);
  if (!c.out_dir.empty()) cfg.output.dir = c.out_dir;
  if (c.dump) cfg.output.dump_matrices = true;
  if (c.quad_order > 0) cfg.solver.quad_order = c.quad_order;
  if (!c.dirichlet.empty()) cfg.solver.dirichlet = parse_dirichlet(c.dirichlet);
  return cfg;
}

void print(const CsvTable& t) { std::cout << t.str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null and approximate controls for the 1D heat equation by space-time mixed formulations"};
  app.require_subcommand(1);
  Common common;

  auto* run_cmd = app.add_subcommand("run", "solve the configured problem on its mesh or mesh family");
  add_common(run_cmd, common);

  std::string table_name;
  bool list_tables = false;
  TableOptions topt;
  auto* table_cmd = app.add_subcommand("table", "reproduce a published table next to its published values");
  add_common(table_cmd, common);
  table_cmd->add_option("name", table_name, "table name");
  table_cmd->add_flag("--list", list_tables, "list table names");
  table_cmd->add_option("--max-nx", topt.max_nx, "skip meshes finer than this");
  table_cmd->add_option("--mf3-max-nx", topt.mf3_max_nx, "skip eps = 0 meshes finer than this");
  table_cmd->add_option("--infsup-max-nx", topt.infsup_max_nx, "skip inf-sup solves finer than this");
  table_cmd->add_option("--kappa-max-nx", topt.kappa_max_nx, "skip condition estimates finer than this");
  table_cmd->add_option("--reference-nx", topt.reference_nx, "reference mesh for eps = 0 tables");
  table_cmd->add_option("--published", topt.published_path, "published values file");

  auto* infsup_cmd = app.add_subcommand("infsup", "discrete inf-sup constant on the configured meshes");
  add_common(infsup_cmd, common);
  auto* cg_cmd = app.add_subcommand("cg", "conjugate gradient on the dual functional");
  add_common(cg_cmd, common);

  int oracle_points = 21;
  auto* oracle_cmd = app.add_subcommand("oracle", "Fourier solution of the penalized problem");
  add_common(oracle_cmd, common);
  oracle_cmd->add_option("--points", oracle_points, "x samples of y(., T)");

  int fnx = 64, fnt = 200;
  bool uncontrolled = false;
  auto* forward_cmd = app.add_subcommand("forward", "forward solve driven by the computed control");
  add_common(forward_cmd, common);
  forward_cmd->add_option("--nx", fnx, "forward cells (uncontrolled run)");
  forward_cmd->add_option("--nt", fnt, "forward steps (uncontrolled run)");
  forward_cmd->add_flag("--uncontrolled", uncontrolled, "zero control");

  auto* converge_cmd = app.add_subcommand("converge", "mesh family study with fitted rates");
  add_common(converge_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      const auto report = run(resolve(common));
      print(report.table());
    } else if (table_cmd->parsed()) {
      if (list_tables || table_name.empty()) {
        for (const auto& n : table_names()) std::cout << n << '\n';
        return list_tables ? 0 : 2;
      }
      const auto cfg = resolve(common);
      topt.quad_order = cfg.solver.quad_order;
      topt.dirichlet = cfg.solver.dirichlet;
      topt.cache_dir = cfg.output.dir;
      const auto t = table(table_name, topt);
      t.write(cfg.output.dir + "/" + table_name + ".csv");
      print(t);
    } else if (infsup_cmd->parsed()) {
      auto cfg = resolve(common);
      cfg.solver.path = SolvePath::InfSup;
      print(run(cfg).table());
    } else if (cg_cmd->parsed()) {
      auto cfg = resolve(common);
      cfg.solver.path = SolvePath::CG;
      print(run(cfg).table());
    } else if (oracle_cmd->parsed()) {
      const auto cfg = resolve(common);
      const auto oracle = FourierOracle::build_and_solve(cfg.oracle.modes, cfg.problem_spec());
      CsvTable t;
      t.title = "Fourier solution: final state y(x, T) samples; tail_ratio and dual_value in the first row";
      t.header = {"x", "y_T", "tail_ratio", "dual_value"};
      const double T = cfg.problem.T;
      for (int k = 0; k < oracle_points; ++k) {
        const double x = oracle_points > 1 ? static_cast<double>(k) / (oracle_points - 1) : 0.0;
        t.rows.push_back({csv_number(x), csv_number(oracle.eval_y(x, T)), k == 0 ? csv_number(oracle.tail_ratio()) : "",
                          k == 0 ? csv_number(oracle.dual_value()) : ""});
      }
      t.write(cfg.output.dir + "/oracle.csv");
      print(t);
    } else if (forward_cmd->parsed()) {
      auto cfg = resolve(common);
      if (uncontrolled) {
        const auto fr = solve_forward(cfg.problem_spec(), {}, fnx, fnt);
        std::filesystem::create_directories(cfg.output.dir);
        if (cfg.output.trajectory) write_trajectory_csv(fr, cfg.output.dir + "/trajectory.csv");
        CsvTable t;
        t.title = "uncontrolled forward solve";
        t.header = {"nx_f", "nt_f", "final_norm"};
        t.rows.push_back({std::to_string(fnx), std::to_string(fnt), csv_number(final_norm(fr))});
        t.write(cfg.output.dir + "/forward.csv");
        print(t);
      } else {
        cfg.output.forward = true;
        print(run(cfg).table());
      }
    } else if (converge_cmd->parsed()) {
      const auto cfg = resolve(common);
      if (cfg.meshes().size() < 3) throw ConfigError("converge needs mesh.family with at least 3 entries");
      const auto report = run(cfg);
      print(report.table());
      print(report.slope_table());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
