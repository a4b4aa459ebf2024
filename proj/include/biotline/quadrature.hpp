#pragma once

#include <array>
#include <vector>

namespace biotline::quad {

/// 1D rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
};

/// Rule on the reference tetrahedron in barycentric coordinates.
/// Weights sum to 1 so that integral ~= volume * sum(w_q f(x_q)).
struct TetRule {
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on the reference triangle in barycentric coordinates; weights sum to 1.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// m-point Gauss-Legendre rule mapped to [0, 1].
LineRule gauss_legendre(int m);

/// Interior-point tetrahedron rule exact for polynomials of the given total
/// degree. Degrees 1, 2 and 5 use tabulated symmetric rules (1, 4 and 14
/// points); any other degree uses a collapsed Gauss-Legendre product rule.
/// All rules have positive weights and no points on faces or edges.
const TetRule& tet_rule(int degree);

/// Interior-point triangle rule; tabulated for degrees 1, 2 and 5.
const TriangleRule& triangle_rule(int degree);

}  // namespace biotline::quad
