#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "biotline/fem.hpp"
#include "biotline/greens.hpp"
#include "biotline/linsolve.hpp"

namespace biotline {

/// Coefficients at one time level: displacement (interior P1 dofs),
/// remainder pressure (P0) and remainder flux (RT0 face fluxes).
struct DiscreteState {
  Vector u;
  Vector p_r;
  Vector w_r;
  double t = 0.0;

  /// (p_r, w_r, u) stacked, the vector the stopping criterion measures.
  Vector stacked() const;
};

struct SolverConfig {
  double tau = 0.1;
  double final_time = 1.0;
  double eps_a = 1e-6;
  double eps_r = 1e-6;
  int max_iters = 100;
  /// Quadrature degree for load vectors and singular-field interpolation.
  int load_degree = 5;
  /// Split p and w into the explicit singular part plus a remainder.
  bool singularity_removal = true;

  /// Throws std::invalid_argument unless tau > 0, T = N tau and tolerances > 0.
  void validate() const;
  int num_steps() const;
};

/// Data of the Biot problem beyond the material parameters. Empty callbacks
/// are zero.
struct ProblemData {
  LineSourceNetwork network = LineSourceNetwork::none();
  /// Background mass source psi.
  ScalarField source;
  /// Body force paired with v: <f, v>.
  VectorField body_force;
  /// Additional mechanics load paired with div v: <s, div v>.
  ScalarField body_force_div;
  /// Full pressure on the boundary (zero for the homogeneous problem).
  ScalarField boundary_pressure;
};

/// Load vectors and singular-field interpolant at one time level.
struct StepLoads {
  double t = 0.0;
  Vector mass_source;  // <psi_r, q>
  Vector flux;         // <rho_f g, z> - boundary integral of p_r z.n
  Vector body;         // mechanics right-hand side without pressure coupling
  Vector p_singular;   // P0 interpolant of p_s
};

struct FullFields {
  Vector p;
  Vector w;
};

struct TimestepResult {
  DiscreteState state;
  int iterations = 0;
  /// Stacked increment norm after each iteration.
  std::vector<double> increments;
};

struct Trajectory {
  std::vector<DiscreteState> states;
  std::vector<int> iterations;
};

class IterationLimitError : public std::runtime_error {
 public:
  IterationLimitError(const std::string& what, double last_increment)
      : std::runtime_error(what), last_increment_(last_increment) {}
  double last_increment() const { return last_increment_; }

 private:
  double last_increment_;
};

/// Backward Euler in time with fixed-stress splitting per step:
///   1. mixed flow solve for (p_r, w_r) with stabilization beta_FS,
///   2. p = p_s + p_r, w = w_s + w_r,
///   3. elasticity solve driven by the full pressure,
/// repeated until |increment| <= eps_a + eps_r |state|.
///
/// Time- and iteration-independent matrices are assembled and factorized in
/// the constructor. The mesh must outlive the solver.
class BiotSolver {
 public:
  BiotSolver(const Mesh& mesh, MaterialParams params, SolverConfig config, ProblemData problem);
  ~BiotSolver();
  BiotSolver(BiotSolver&&) noexcept;

  const Mesh& mesh() const { return mesh_; }
  const DofMaps& dofs() const { return dofs_; }
  const MaterialParams& params() const { return params_; }
  const SolverConfig& config() const { return config_; }
  const ProblemData& problem() const { return problem_; }

  DiscreteState zero_state(double t = 0.0) const;
  /// Initial state from the full initial pressure and displacement; the
  /// remainder pressure is the cell average of p0 - p_s(., t0).
  DiscreteState initial_state(const ScalarField& p0, const VectorField& u0, double t0 = 0.0) const;

  StepLoads assemble_loads(double t) const;

  /// Step 1: returns (p_r, w_r).
  std::pair<Vector, Vector> flow_step(const DiscreteState& prev_time, const DiscreteState& prev_iter,
                                      const StepLoads& loads) const;
  /// Step 3: displacement driven by the full P0 pressure.
  Vector mechanics_step(const Vector& p_full, const StepLoads& loads) const;
  /// Step 2 applied to a state: adds the interpolated singular fields.
  FullFields reconstruct_full(const DiscreteState& state) const;

  TimestepResult fixed_stress_solve_timestep(const DiscreteState& prev) const;
  TimestepResult fixed_stress_solve_timestep(const DiscreteState& prev, const StepLoads& loads) const;

  /// Coupled three-field solve of the same time step (reference solution).
  DiscreteState monolithic_solve_timestep(const DiscreteState& prev) const;
  DiscreteState monolithic_solve_timestep(const DiscreteState& prev, const StepLoads& loads) const;

  /// N = T / tau fixed-stress steps starting from `initial`.
  Trajectory run(const DiscreteState& initial) const;

  const SparseMatrix& elasticity_matrix() const { return elasticity_; }
  const SparseMatrix& coupling_matrix() const { return coupling_; }
  const SparseMatrix& divergence_matrix() const { return divergence_; }
  const SparseMatrix& flux_mass_matrix() const { return flux_mass_; }
  const SparseMatrix& pressure_mass_matrix() const { return pressure_mass_; }

 private:
  Vector line_source_load(double t) const;

  const Mesh& mesh_;
  MaterialParams params_;
  SolverConfig config_;
  ProblemData problem_;
  DofMaps dofs_;

  SparseMatrix elasticity_;
  SparseMatrix coupling_;       // <alpha div u, q>
  SparseMatrix divergence_;     // <div w, q>
  SparseMatrix flux_mass_;      // <kappa^-1 w, z>
  SparseMatrix pressure_mass_;  // <p, q>
  std::unique_ptr<SpdSolver> mechanics_solver_;
  std::unique_ptr<MixedDarcySolver> flow_solver_;
};

/// P0 load of the line source: integral over the segments of f q, each
/// point attributed equally to all cells containing it.
Vector assemble_line_source_p0(const Mesh& mesh, const LineSourceNetwork& network, double t);

}  // namespace biotline
