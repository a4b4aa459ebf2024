#pragma once

#include <Eigen/Sparse>

#include "biotline/greens.hpp"
#include "biotline/mesh.hpp"

namespace biotline {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Physical coefficients. Units: mm, s, mPa.
struct MaterialParams {
  double kappa = 1.57e-2;  // permeability / viscosity, mm^2 mPa^-1 s^-1
  double biot_modulus = 3.9e7;  // M, mPa
  double alpha = 1.0;
  double youngs_modulus = 1.5e6;  // E, mPa
  double poisson_ratio = 0.2;
  double rho_f = 1.0;
  Vec3 gravity = Vec3::Zero();  // mm s^-2
  int dimension = 3;

  double mu() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
  double lambda() const {
    return youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
  /// Drained bulk modulus (d/2)(mu + lambda).
  double drained_bulk_modulus() const { return 0.5 * dimension * (mu() + lambda()); }
  /// Fixed-stress stabilization alpha^2 / K_dr.
  double beta_fs() const { return alpha * alpha / drained_bulk_modulus(); }

  /// Throws std::invalid_argument unless kappa, M, alpha, mu, lambda > 0.
  void validate() const;
};

/// Degree-of-freedom layout.
///   displacement: 3 consecutive dofs per interior vertex (u = 0 on the boundary)
///   pressure: one per cell
///   flux: one per face, the normal flux w.r.t. the face's global normal
struct DofMaps {
  std::vector<int> vertex_dof;  // first displacement dof of a vertex, -1 on the boundary
  int num_u = 0;
  int num_p = 0;
  int num_w = 0;

  static DofMaps build(const Mesh& mesh);
};

/// Number of quadrature points nudged off a line segment since start-up.
long quadrature_collisions();

// ---- bilinear forms -------------------------------------------------------

/// <2 mu eps(u), eps(v)> + <lambda div u, div v> on interior displacement dofs.
SparseMatrix assemble_elasticity(const Mesh& mesh, const DofMaps& dofs, const MaterialParams& params);
/// Same form on all vertices (dof 3 v + i), before boundary elimination.
SparseMatrix assemble_elasticity_unconstrained(const Mesh& mesh, const MaterialParams& params);

/// Diagonal P0 mass scaled by a constant coefficient.
SparseMatrix assemble_p_mass(const Mesh& mesh, double coefficient);

/// <inv_kappa w, z> on RT0.
SparseMatrix assemble_rt0_mass(const Mesh& mesh, double inv_kappa);

/// <div w, q>: rows are cells, columns faces; entry is the face sign in the cell.
SparseMatrix assemble_div(const Mesh& mesh);

/// <alpha div u, q>: rows are cells, columns interior displacement dofs.
/// Its transpose is the <alpha p, div v> coupling of the momentum equation.
SparseMatrix assemble_coupling_div_u(const Mesh& mesh, const DofMaps& dofs, double alpha);
SparseMatrix assemble_coupling_div_u_unconstrained(const Mesh& mesh, double alpha);

// ---- linear forms ---------------------------------------------------------

/// <f, q> for P0 test functions.
Vector assemble_load_p0(const Mesh& mesh, const ScalarField& f, double t, int degree);
/// <f, v> for interior P1 vector test functions.
Vector assemble_load_p1(const Mesh& mesh, const DofMaps& dofs, const VectorField& f, double t, int degree);
/// <s, div v> for interior P1 vector test functions.
Vector assemble_load_p1_div(const Mesh& mesh, const DofMaps& dofs, const ScalarField& s, double t, int degree);
/// <f, z> for RT0 test functions.
Vector assemble_load_rt0(const Mesh& mesh, const VectorField& f, double t, int degree);
/// Boundary integral of p z.n (outward normal) for RT0 test functions.
Vector assemble_boundary_pressure_load(const Mesh& mesh, const ScalarField& p, double t, int degree);

// ---- interpolation and evaluation ----------------------------------------

/// Cell averages by quadrature.
Vector interpolate_p0(const Mesh& mesh, const ScalarField& f, double t, int degree);
/// Face normal fluxes (global orientation) by face quadrature.
Vector interpolate_rt0(const Mesh& mesh, const VectorField& f, double t, int degree);
/// Nodal values at interior vertices.
Vector interpolate_p1(const Mesh& mesh, const DofMaps& dofs, const VectorField& f, double t);

Vector interpolate_ps_p0(const Mesh& mesh, const LineSourceNetwork& network, double t, double kappa, int degree = 5);
Vector interpolate_ws_rt0(const Mesh& mesh, const LineSourceNetwork& network, double t, double kappa,
                          int degree = 5);

/// RT0 field of cell `cell` at point x.
Vec3 eval_rt0(const Mesh& mesh, const Vector& coeffs, int cell, const Vec3& x);
/// RT0 field at the centroid, which equals its cell average.
Vec3 rt0_cell_average(const Mesh& mesh, const Vector& coeffs, int cell);
/// Expands interior displacement dofs to a (num_vertices x 3) nodal array.
Eigen::MatrixX3d p1_nodal_values(const Mesh& mesh, const DofMaps& dofs, const Vector& u);

// ---- errors -----------------------------------------------------------------

double l2_error_p0(const Mesh& mesh, const Vector& coeffs, const ScalarField& exact, double t, int degree);
double l2_error_rt0(const Mesh& mesh, const Vector& coeffs, const VectorField& exact, double t, int degree);
double l2_error_p1(const Mesh& mesh, const DofMaps& dofs, const Vector& coeffs, const VectorField& exact, double t,
                   int degree);

}  // namespace biotline
