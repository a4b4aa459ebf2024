#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "biotline/mesh.hpp"

namespace biotline {

/// Scalar and vector fields of position and time.
using ScalarField = std::function<double(const Vec3&, double)>;
using VectorField = std::function<Vec3(const Vec3&, double)>;

/// Raised when a singular field is evaluated on (or numerically at) a line
/// segment, where G has no finite value.
class OnSegmentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Straight segment from a to b.
class LineSegment {
 public:
  /// Throws std::invalid_argument for a degenerate (zero length) segment.
  LineSegment(const Vec3& a, const Vec3& b);

  const Vec3& a() const { return a_; }
  const Vec3& b() const { return b_; }
  double length() const { return length_; }
  const Vec3& tangent() const { return tangent_; }

  /// Euclidean distance from x to the closed segment.
  double distance(const Vec3& x) const;

 private:
  Vec3 a_;
  Vec3 b_;
  double length_;
  Vec3 tangent_;
};

/// Line source: segments plus an intensity f given as an ambient field on
/// the whole domain (its trace on the segments is the physical intensity).
/// The time derivative, gradient and Laplacian of that extension are needed
/// for the regularized source; they default to zero.
struct LineSourceNetwork {
  std::vector<LineSegment> segments;
  ScalarField intensity;
  ScalarField intensity_dt;
  VectorField intensity_grad;
  ScalarField intensity_laplacian;

  /// Network with an intensity that depends on time only.
  static LineSourceNetwork time_only(std::vector<LineSegment> segments, std::function<double(double)> f,
                                     std::function<double(double)> df_dt);

  /// Network carrying no source at all (f = 0).
  static LineSourceNetwork none();
};

/// Distance from x to the nearest segment of the network.
double distance_to_network(const LineSourceNetwork& network, const Vec3& x);

/// Single-segment potential (1/4pi) ln((r_b + L + g.(a - x)) / (r_a + g.(a - x))).
double eval_G(const LineSegment& segment, const Vec3& x);
Vec3 grad_G(const LineSegment& segment, const Vec3& x);

/// Sum over all segments. Both throw OnSegmentError for x on a segment.
double eval_G(const LineSourceNetwork& network, const Vec3& x);
Vec3 grad_G(const LineSourceNetwork& network, const Vec3& x);

/// Singular pressure f G / kappa.
double eval_ps(const LineSourceNetwork& network, const Vec3& x, double t, double kappa);

/// Singular flux -kappa grad(p_s) = -(f grad G + G grad f).
Vec3 eval_ws(const LineSourceNetwork& network, const Vec3& x, double t, double kappa);

/// Regularized source psi - d_t(p_s)/M + G lap(f) + 2 grad(G).grad(f).
/// An empty psi is treated as zero.
double eval_psi_r(const LineSourceNetwork& network, const Vec3& x, double t, double kappa, double biot_modulus,
                  const ScalarField& psi);

struct TestFunction {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
};

/// Quadrature used by verify_weak_laplacian: `order` Gauss points per
/// direction on each box of a grid with `subdivisions` boxes between
/// consecutive breakpoints along each axis.
struct WeakLaplacianQuadrature {
  int order = 8;
  int subdivisions = 1;
};

struct WeakLaplacianResult {
  double volume_term = 0.0;  // integral over the unit cube of grad G . grad v
  double line_term = 0.0;    // integral of v along the segments
  double residual = 0.0;     // |volume_term - line_term|
};

/// Checks -lap G = delta on the segments in weak form over the unit cube for
/// a test function vanishing on the cube boundary. The cube is split at the
/// segment endpoint coordinates; boxes having an axis-parallel segment on one
/// of their edges are integrated with a Duffy map that cancels the 1/rho
/// singularity of grad G. Other boxes use plain tensor Gauss rules, so
/// segments not parallel to an axis converge slowly and may raise
/// OnSegmentError when a node lands on them.
WeakLaplacianResult verify_weak_laplacian(const LineSourceNetwork& network, const TestFunction& v,
                                          const WeakLaplacianQuadrature& quadrature);

}  // namespace biotline
