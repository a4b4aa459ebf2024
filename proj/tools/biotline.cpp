#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biotline/config.hpp"
#include "biotline/convergence.hpp"
#include "biotline/verify.hpp"
#include "biotline/vtk.hpp"

using namespace biotline;

namespace {

struct TimeFlags {
  double tau = 0.0;
  double final_time = 0.0;

  void apply(SolverConfig& cfg) const {
    if (tau > 0.0) cfg.tau = tau;
    if (final_time > 0.0) cfg.final_time = final_time;
  }
};

int run_converge(const std::vector<int>& levels, const TimeFlags& flags, bool quiet) {
  ConvergenceOptions opt;
  opt.levels = levels;
  flags.apply(opt.config);
  opt.config.validate();
  if (!quiet) {
    opt.on_level = [](const ConvergenceLevel& l) {
      int total = 0;
      for (int i : l.iterations) total += i;
      std::fprintf(stderr, "n=%d: %zu steps, %d fixed-stress iterations, %.1f s\n", l.n, l.iterations.size(), total,
                   l.seconds);
    };
  }
  const ConvergenceReport report = run_convergence_study(opt);
  std::cout << report.table();
  if (!quiet && report.successive_rates.size() > 1) {
    std::cout << "\nRates between consecutive levels (p, w, u):\n";
    for (size_t i = 0; i < report.successive_rates.size(); ++i) {
      const auto& r = report.successive_rates[i];
      std::printf("1/%d -> 1/%d: %.2f %.2f %.2f\n", report.levels[i].n, report.levels[i + 1].n, r[0], r[1], r[2]);
    }
  }
  return 0;
}

int run_solve(const std::string& config_path, const std::string& export_path, const TimeFlags& flags, bool quiet) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  flags.apply(cfg.solver);
  cfg.solver.validate();
  if (!export_path.empty()) cfg.vtk_output = export_path;

  const Mesh mesh = build_structured_tet_mesh(cfg.mesh_n);
  const BiotSolver solver(mesh, cfg.params, cfg.solver, manufactured_sources(cfg.mcase, cfg.params));
  const Trajectory traj = solver.run(solver.zero_state(0.0));
  const DiscreteState& final_state = traj.states.back();

  if (!quiet) {
    std::printf("mesh n=%d: %d cells, %d faces, %d displacement dofs\n", cfg.mesh_n, mesh.num_cells(),
                mesh.num_faces(), solver.dofs().num_u);
    std::printf("fixed-stress iterations per step:");
    for (int i : traj.iterations) std::printf(" %d", i);
    std::printf("\n");
  }
  const ConvergenceLevel errors = measure_errors(solver, cfg.mcase, final_state, 5);
  std::printf("t=%g  err_p=%.4e  err_w=%.4e  err_u=%.4e\n", final_state.t, errors.err_p, errors.err_w, errors.err_u);

  if (!cfg.vtk_output.empty()) {
    export_fields(cfg.vtk_output, solver, final_state);
    if (!quiet) std::printf("wrote %s\n", cfg.vtk_output.c_str());
  }
  return 0;
}

int run_verify(bool quiet) {
  int failures = 0;
  for (const auto& group : {run_greens_checks(), run_fem_checks()}) {
    for (const auto& r : group) {
      if (!r.passed) ++failures;
      if (!quiet || !r.passed) {
        std::printf("[%s] %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
      }
    }
  }
  if (failures > 0) std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static Biot poroelasticity with line sources: singularity removal and fixed-stress splitting"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  TimeFlags flags;
  app.add_flag("--quiet,-q", quiet, "Only print results");
  app.add_option("--tau", flags.tau, "Time step (overrides config)")->check(CLI::PositiveNumber);
  app.add_option("--T", flags.final_time, "Final time (overrides config)")->check(CLI::PositiveNumber);

  auto* converge = app.add_subcommand("converge", "Convergence study of the manufactured line-source case");
  std::vector<int> levels{8, 16, 32};
  converge->add_option("--levels", levels, "Mesh subdivisions per axis")->delimiter(',')->check(CLI::Range(1, 512));

  auto* solve = app.add_subcommand("solve", "Single run of the manufactured case");
  std::string config_path, export_path;
  solve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  solve->add_option("--export", export_path, "Legacy VTK output file");

  auto* verify = app.add_subcommand("verify", "Green's function and assembly checks");
  auto* defaults = app.add_subcommand("defaults", "Print the default config as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*converge) return run_converge(levels, flags, quiet);
    if (*solve) return run_solve(config_path, export_path, flags, quiet);
    if (*verify) return run_verify(quiet);
    if (*defaults) {
      std::cout << default_config_json() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
