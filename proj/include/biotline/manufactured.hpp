#pragma once

#include "biotline/biot.hpp"

namespace biotline {

/// Analytic test problem on the unit cube: a single segment with pulsating
/// intensity sin(t), remainder pressure proportional to r_a - r_b and a
/// bubble displacement t x(1-x) y(1-y) z(1-z) (1, 1, 1).
///
/// The segment x = z = 0.5 lies on mesh planes for even subdivisions; the
/// interior-point quadrature rules never sample it.
struct ManufacturedCase {
  Vec3 a{0.5, 0.8, 0.5};
  Vec3 b{0.5, 0.2, 0.5};

  LineSourceNetwork network() const;

  double intensity(double t) const;
  double intensity_dt(double t) const;

  double remainder_pressure(const Vec3& x, double t, const MaterialParams& params) const;
  Vec3 remainder_flux(const Vec3& x, double t) const;
  /// div of the remainder flux, -(f / 4 pi)(2 / r_a - 2 / r_b).
  double remainder_flux_div(const Vec3& x, double t) const;
  Vec3 displacement(const Vec3& x, double t) const;
  double displacement_div(const Vec3& x, double t) const;

  /// p_s + p_r.
  double pressure(const Vec3& x, double t, const MaterialParams& params) const;
  /// w_s + w_r.
  Vec3 flux(const Vec3& x, double t, const MaterialParams& params) const;

  /// d_t(p_r / M + alpha div u) + div w_r.
  double remainder_source(const Vec3& x, double t, const MaterialParams& params) const;
  /// -div sigma(u) for the linear elastic stress.
  Vec3 elastic_load(const Vec3& x, double t, const MaterialParams& params) const;
};

/// Problem data reproducing the case: background source psi whose regularized
/// part is the remainder source, mechanics load <-div sigma(u), v> plus
/// <-alpha p, div v> with the full analytic pressure, and the full analytic
/// pressure as natural boundary data for the flux equation.
ProblemData manufactured_sources(const ManufacturedCase& mcase, const MaterialParams& params);

}  // namespace biotline
