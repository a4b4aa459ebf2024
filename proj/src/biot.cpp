#include "biotline/biot.hpp"

#include <cmath>
#include <sstream>

#include "biotline/quadrature.hpp"

namespace biotline {

Vector DiscreteState::stacked() const {
  Vector s(p_r.size() + w_r.size() + u.size());
  s << p_r, w_r, u;
  return s;
}

void SolverConfig::validate() const {
  std::ostringstream bad;
  if (!(tau > 0.0)) bad << " tau must be > 0;";
  if (!(final_time > 0.0)) bad << " final time must be > 0;";
  if (!(eps_a > 0.0) || !(eps_r > 0.0)) bad << " tolerances must be > 0;";
  if (max_iters < 1) bad << " max_iters must be >= 1;";
  if (load_degree < 1) bad << " load_degree must be >= 1;";
  if (bad.str().empty()) {
    const double steps = final_time / tau;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps) || std::round(steps) < 1.0) {
      bad << " final time " << final_time << " is not a positive integer multiple of tau " << tau << ";";
    }
  }
  if (!bad.str().empty()) throw std::invalid_argument("invalid solver config:" + bad.str());
}

int SolverConfig::num_steps() const {
  validate();
  return static_cast<int>(std::lround(final_time / tau));
}

BiotSolver::BiotSolver(const Mesh& mesh, MaterialParams params, SolverConfig config, ProblemData problem)
    : mesh_(mesh),
      params_(std::move(params)),
      config_(std::move(config)),
      problem_(std::move(problem)),
      dofs_(DofMaps::build(mesh)) {
  params_.validate();
  config_.validate();

  elasticity_ = assemble_elasticity(mesh_, dofs_, params_);
  coupling_ = assemble_coupling_div_u(mesh_, dofs_, params_.alpha);
  divergence_ = assemble_div(mesh_);
  flux_mass_ = assemble_rt0_mass(mesh_, 1.0 / params_.kappa);
  pressure_mass_ = assemble_p_mass(mesh_, 1.0);

  if (dofs_.num_u > 0) mechanics_solver_ = std::make_unique<SpdSolver>(elasticity_);
  const double storage = 1.0 / params_.biot_modulus + params_.beta_fs();
  flow_solver_ = std::make_unique<MixedDarcySolver>(storage * pressure_mass_, divergence_, flux_mass_, config_.tau);
}

BiotSolver::~BiotSolver() = default;
BiotSolver::BiotSolver(BiotSolver&&) noexcept = default;

DiscreteState BiotSolver::zero_state(double t) const {
  return {Vector::Zero(dofs_.num_u), Vector::Zero(dofs_.num_p), Vector::Zero(dofs_.num_w), t};
}

DiscreteState BiotSolver::initial_state(const ScalarField& p0, const VectorField& u0, double t0) const {
  DiscreteState s = zero_state(t0);
  if (u0) s.u = interpolate_p1(mesh_, dofs_, u0, t0);
  if (p0) s.p_r = interpolate_p0(mesh_, p0, t0, config_.load_degree);
  if (config_.singularity_removal) {
    s.p_r -= interpolate_ps_p0(mesh_, problem_.network, t0, params_.kappa, config_.load_degree);
  }
  return s;
}

Vector BiotSolver::line_source_load(double t) const { return assemble_line_source_p0(mesh_, problem_.network, t); }

StepLoads BiotSolver::assemble_loads(double t) const {
  const int degree = config_.load_degree;
  const LineSourceNetwork& net = problem_.network;
  const bool removal = config_.singularity_removal && !net.segments.empty();
  const double kappa = params_.kappa;
  const double M = params_.biot_modulus;

  StepLoads loads;
  loads.t = t;

  if (removal) {
    loads.mass_source = assemble_load_p0(
        mesh_, [&](const Vec3& x, double time) { return eval_psi_r(net, x, time, kappa, M, problem_.source); }, t,
        degree);
    loads.p_singular = interpolate_ps_p0(mesh_, net, t, kappa, degree);
  } else {
    loads.mass_source = problem_.source ? assemble_load_p0(mesh_, problem_.source, t, degree)
                                        : Vector(Vector::Zero(dofs_.num_p));
    if (!net.segments.empty()) loads.mass_source += line_source_load(t);
    loads.p_singular = Vector::Zero(dofs_.num_p);
  }

  const Vec3 rho_g = params_.rho_f * params_.gravity;
  loads.flux = Vector::Zero(dofs_.num_w);
  if (!rho_g.isZero(0.0)) {
    loads.flux += assemble_load_rt0(mesh_, [&](const Vec3&, double) { return rho_g; }, t, 1);
  }
  // Natural boundary term of the remainder pressure: p_r = p_bd - p_s on the boundary.
  ScalarField remainder_bd;
  if (removal) {
    remainder_bd = [&](const Vec3& x, double time) {
      const double full = problem_.boundary_pressure ? problem_.boundary_pressure(x, time) : 0.0;
      return full - eval_ps(net, x, time, kappa);
    };
  } else if (problem_.boundary_pressure) {
    remainder_bd = problem_.boundary_pressure;
  }
  if (remainder_bd) loads.flux -= assemble_boundary_pressure_load(mesh_, remainder_bd, t, degree);

  loads.body = Vector::Zero(dofs_.num_u);
  if (problem_.body_force) loads.body += assemble_load_p1(mesh_, dofs_, problem_.body_force, t, degree);
  if (problem_.body_force_div) loads.body += assemble_load_p1_div(mesh_, dofs_, problem_.body_force_div, t, degree);
  return loads;
}

std::pair<Vector, Vector> BiotSolver::flow_step(const DiscreteState& prev_time, const DiscreteState& prev_iter,
                                                const StepLoads& loads) const {
  const double inv_m = 1.0 / params_.biot_modulus;
  const double beta = params_.beta_fs();
  const Vector& vol = pressure_mass_.diagonal();
  Vector rhs_p = config_.tau * loads.mass_source + inv_m * vol.cwiseProduct(prev_time.p_r) +
                 beta * vol.cwiseProduct(prev_iter.p_r);
  if (dofs_.num_u > 0) rhs_p += coupling_ * (prev_time.u - prev_iter.u);
  return flow_solver_->solve(rhs_p, loads.flux);
}

Vector BiotSolver::mechanics_step(const Vector& p_full, const StepLoads& loads) const {
  if (dofs_.num_u == 0) return Vector::Zero(0);
  return mechanics_solver_->solve(loads.body + coupling_.transpose() * p_full);
}

FullFields BiotSolver::reconstruct_full(const DiscreteState& state) const {
  FullFields full{state.p_r, state.w_r};
  if (config_.singularity_removal && !problem_.network.segments.empty()) {
    full.p += interpolate_ps_p0(mesh_, problem_.network, state.t, params_.kappa, config_.load_degree);
    full.w += interpolate_ws_rt0(mesh_, problem_.network, state.t, params_.kappa, config_.load_degree);
  }
  return full;
}

TimestepResult BiotSolver::fixed_stress_solve_timestep(const DiscreteState& prev) const {
  return fixed_stress_solve_timestep(prev, assemble_loads(prev.t + config_.tau));
}

TimestepResult BiotSolver::fixed_stress_solve_timestep(const DiscreteState& prev, const StepLoads& loads) const {
  TimestepResult result;
  DiscreteState iter = prev;
  iter.t = loads.t;
  for (int i = 1; i <= config_.max_iters; ++i) {
    DiscreteState next;
    next.t = loads.t;
    std::tie(next.p_r, next.w_r) = flow_step(prev, iter, loads);
    next.u = mechanics_step(loads.p_singular + next.p_r, loads);

    const double increment = (next.stacked() - iter.stacked()).norm();
    const double size = next.stacked().norm();
    result.increments.push_back(increment);
    iter = std::move(next);
    if (increment <= config_.eps_a + config_.eps_r * size) {
      result.state = std::move(iter);
      result.iterations = i;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "fixed-stress iteration did not converge in " << config_.max_iters << " iterations at t=" << loads.t
      << " (last increment " << result.increments.back() << ")";
  throw IterationLimitError(msg.str(), result.increments.back());
}

DiscreteState BiotSolver::monolithic_solve_timestep(const DiscreteState& prev) const {
  return monolithic_solve_timestep(prev, assemble_loads(prev.t + config_.tau));
}

DiscreteState BiotSolver::monolithic_solve_timestep(const DiscreteState& prev, const StepLoads& loads) const {
  // Unknowns ordered (u, p_r, w_r):
  //   A u - C^T p                 = body + C^T p_s
  //   C u + (1/M) Mp p + tau B w  = tau src + (1/M) Mp p_prev + C u_prev
  //   -B^T p + Mw w               = flux
  const int nu = dofs_.num_u, np = dofs_.num_p, nw = dofs_.num_w;
  const double inv_m = 1.0 / params_.biot_modulus;
  const double tau = config_.tau;
  std::vector<Eigen::Triplet<double>> trips;
  auto add_block = [&trips](const SparseMatrix& m, int row0, int col0, double scale, bool transpose) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
        const int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
        trips.emplace_back(row0 + r, col0 + c, scale * it.value());
      }
    }
  };
  add_block(elasticity_, 0, 0, 1.0, false);
  add_block(coupling_, 0, nu, -1.0, true);
  add_block(coupling_, nu, 0, 1.0, false);
  add_block(pressure_mass_, nu, nu, inv_m, false);
  add_block(divergence_, nu, nu + np, tau, false);
  add_block(divergence_, nu + np, nu, -1.0, true);
  add_block(flux_mass_, nu + np, nu + np, 1.0, false);

  LinearSystem system;
  system.kind = SystemKind::SaddlePoint;
  system.matrix.resize(nu + np + nw, nu + np + nw);
  system.matrix.setFromTriplets(trips.begin(), trips.end());
  system.rhs.resize(nu + np + nw);
  const Vector& vol = pressure_mass_.diagonal();
  Vector rhs_u = loads.body + coupling_.transpose() * loads.p_singular;
  Vector rhs_p = tau * loads.mass_source + inv_m * vol.cwiseProduct(prev.p_r);
  if (nu > 0) rhs_p += coupling_ * prev.u;
  system.rhs << rhs_u, rhs_p, loads.flux;

  // Row equilibration: the three blocks differ by many orders of magnitude.
  Vector row_scale(system.rhs.size());
  for (int r = 0; r < row_scale.size(); ++r) row_scale[r] = 0.0;
  for (int k = 0; k < system.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(system.matrix, k); it; ++it) {
      row_scale[it.row()] = std::max(row_scale[it.row()], std::abs(it.value()));
    }
  }
  row_scale = row_scale.cwiseInverse();
  system.matrix = row_scale.asDiagonal() * system.matrix;
  system.rhs = row_scale.cwiseProduct(system.rhs);

  const Vector x = solve(system);
  DiscreteState next;
  next.t = loads.t;
  next.u = x.head(nu);
  next.p_r = x.segment(nu, np);
  next.w_r = x.tail(nw);
  return next;
}

Trajectory BiotSolver::run(const DiscreteState& initial) const {
  const int steps = config_.num_steps();
  Trajectory traj;
  traj.states.reserve(steps);
  DiscreteState current = initial;
  for (int n = 1; n <= steps; ++n) {
    const double t = initial.t + n * config_.tau;
    TimestepResult r = fixed_stress_solve_timestep(current, assemble_loads(t));
    traj.iterations.push_back(r.iterations);
    current = r.state;
    traj.states.push_back(std::move(r.state));
  }
  return traj;
}

namespace {

// Cells of the structured mesh whose closure contains x.
std::vector<int> containing_cells(const Mesh& mesh, const Vec3& x) {
  const int n = mesh.subdivisions();
  std::array<std::vector<int>, 3> idx;
  for (int k = 0; k < 3; ++k) {
    const double s = x[k] * n;
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-10) {
      for (int c : {static_cast<int>(r) - 1, static_cast<int>(r)}) {
        if (c >= 0 && c < n) idx[k].push_back(c);
      }
    } else {
      const int c = static_cast<int>(std::floor(s));
      if (c >= 0 && c < n) idx[k].push_back(c);
    }
  }
  std::vector<int> cells;
  for (int i : idx[0]) {
    for (int j : idx[1]) {
      for (int k : idx[2]) {
        const int base = 6 * (i + n * (j + n * k));
        for (int c = base; c < base + 6; ++c) {
          const CellGeometry g = cell_geometry(mesh, c);
          const Vec3 lam = g.jacobian.inverse() * (x - mesh.vertex(mesh.cell(c)[0]));
          if (lam.minCoeff() >= -1e-10 && lam.sum() <= 1.0 + 1e-10) cells.push_back(c);
        }
      }
    }
  }
  return cells;
}

}  // namespace

Vector assemble_line_source_p0(const Mesh& mesh, const LineSourceNetwork& network, double t) {
  Vector load = Vector::Zero(mesh.num_cells());
  const quad::LineRule rule = quad::gauss_legendre(4);
  for (const auto& seg : network.segments) {
    const int parts = std::max(1, static_cast<int>(std::ceil(4.0 * seg.length() / mesh.h())));
    for (int p = 0; p < parts; ++p) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const double s = (p + rule.points[q]) / parts;
        const Vec3 x = seg.a() + s * (seg.b() - seg.a());
        const std::vector<int> cells = containing_cells(mesh, x);
        if (cells.empty()) continue;
        const double value = rule.weights[q] / parts * seg.length() * network.intensity(x, t);
        for (int c : cells) load[c] += value / static_cast<double>(cells.size());
      }
    }
  }
  return load;
}

}  // namespace biotline
