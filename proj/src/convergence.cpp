#include "biotline/convergence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace biotline {

ConvergenceLevel measure_errors(const BiotSolver& solver, const ManufacturedCase& mcase, const DiscreteState& state,
                                int error_degree) {
  const Mesh& mesh = solver.mesh();
  const MaterialParams& params = solver.params();
  const double t = state.t;
  ConvergenceLevel level;
  level.n = mesh.subdivisions();
  level.h = 1.0 / mesh.subdivisions();

  const FullFields full = solver.reconstruct_full(state);
  level.err_p_interpolated = l2_error_p0(
      mesh, full.p, [&](const Vec3& x, double time) { return mcase.pressure(x, time, params); }, t, error_degree);
  level.err_p = l2_error_p0(
      mesh, state.p_r, [&](const Vec3& x, double time) { return mcase.remainder_pressure(x, time, params); }, t,
      error_degree);
  level.err_w = l2_error_rt0(
      mesh, state.w_r, [&](const Vec3& x, double time) { return mcase.remainder_flux(x, time); }, t, error_degree);
  level.err_u = l2_error_p1(
      mesh, solver.dofs(), state.u, [&](const Vec3& x, double time) { return mcase.displacement(x, time); }, t,
      error_degree);
  return level;
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size() || h.size() < 2) throw std::invalid_argument("rate fit needs two or more levels");
  double mx = 0.0, my = 0.0;
  const double k = static_cast<double>(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    mx += std::log(h[i]) / k;
    my += std::log(errors[i]) / k;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport run_convergence_study(const ConvergenceOptions& options) {
  if (options.levels.empty()) throw std::invalid_argument("no mesh levels given");
  ConvergenceReport report;
  const ProblemData data = manufactured_sources(options.mcase, options.params);
  for (int n : options.levels) {
    const auto start = std::chrono::steady_clock::now();
    const Mesh mesh = build_structured_tet_mesh(n);
    const BiotSolver solver(mesh, options.params, options.config, data);
    // All analytic fields vanish at t = 0.
    const Trajectory traj = solver.run(solver.zero_state(0.0));
    ConvergenceLevel level = measure_errors(solver, options.mcase, traj.states.back(), options.error_degree);
    level.iterations = traj.iterations;
    level.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.on_level) options.on_level(level);
    report.levels.push_back(std::move(level));
  }

  std::vector<double> hs;
  std::array<std::vector<double>, 3> errs;
  for (const auto& l : report.levels) {
    hs.push_back(l.h);
    errs[0].push_back(l.err_p);
    errs[1].push_back(l.err_w);
    errs[2].push_back(l.err_u);
  }
  for (size_t i = 1; i < report.levels.size(); ++i) {
    std::array<double, 3> r{};
    for (int k = 0; k < 3; ++k) r[k] = std::log(errs[k][i - 1] / errs[k][i]) / std::log(hs[i - 1] / hs[i]);
    report.successive_rates.push_back(r);
  }
  if (report.levels.size() >= 2) {
    for (int k = 0; k < 3; ++k) report.fitted_rates[k] = fitted_rate(hs, errs[k]);
  }
  return report;
}

std::string ConvergenceReport::table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-12s %-12s %-12s\n", "h", "p_a - p_h", "w_a - w_h", "u_a - u_h");
  out += line;
  for (const auto& l : levels) {
    std::snprintf(line, sizeof line, "1/%-6d %-12.3e %-12.3e %-12.3e\n", l.n, l.err_p, l.err_w, l.err_u);
    out += line;
  }
  if (levels.size() >= 2) {
    std::snprintf(line, sizeof line, "%-8s %-12.2f %-12.2f %-12.2f\n", "Rate", fitted_rates[0], fitted_rates[1],
                  fitted_rates[2]);
    out += line;
  }
  return out;
}

}  // namespace biotline
