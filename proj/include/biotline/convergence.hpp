#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "biotline/manufactured.hpp"

namespace biotline {

struct ConvergenceLevel {
  int n = 0;
  double h = 0.0;
  /// L2 errors at the final time of the full fields p = p_s + p_r,
  /// w = w_s + w_r and u. The singular parts are known in closed form and
  /// enter both sides exactly, so the pressure and flux errors are those of
  /// the P0 and RT0 remainders (w_s is not square integrable).
  double err_p = 0.0;
  double err_w = 0.0;
  double err_u = 0.0;
  /// Pressure error when p_s is replaced by its P0 cell averages in the
  /// discrete field; dominated by the interpolation error of p_s.
  double err_p_interpolated = 0.0;
  std::vector<int> iterations;  // fixed-stress iterations per time step
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  /// log2(e_{2h} / e_h) between consecutive levels, order (p, w, u).
  std::vector<std::array<double, 3>> successive_rates;
  /// Least-squares slope of log e against log h.
  std::array<double, 3> fitted_rates{};

  /// Plain-text table: h, errors and rates.
  std::string table() const;
};

struct ConvergenceOptions {
  std::vector<int> levels{8, 16, 32};
  MaterialParams params;
  SolverConfig config;
  ManufacturedCase mcase;
  int error_degree = 5;
  /// Called after each level finishes.
  std::function<void(const ConvergenceLevel&)> on_level;
};

/// Errors of one finished run of the manufactured case.
ConvergenceLevel measure_errors(const BiotSolver& solver, const ManufacturedCase& mcase, const DiscreteState& state,
                                int error_degree);

/// Runs the manufactured case to the final time on each level.
ConvergenceReport run_convergence_study(const ConvergenceOptions& options);

/// Slope of the least-squares line through (log h, log e).
double fitted_rate(const std::vector<double>& h, const std::vector<double>& errors);

}  // namespace biotline
