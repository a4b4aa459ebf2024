#include "biotline/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "biotline/quadrature.hpp"

namespace biotline {

namespace {

constexpr double kInvFourPi = 0.25 / std::numbers::pi;

// Relative (to segment length) distance below which x counts as on the segment.
constexpr double kOnSegmentTolerance = 1e-14;

/// Axial/radial decomposition of x relative to a segment.
struct Local {
  double s_a;  // gamma . (x - a)
  double s_b;  // gamma . (x - b) = s_a - L
  double r_a;
  double r_b;
  Vec3 d;  // component of x - a perpendicular to the segment
  double rho2;
};

Local decompose(const LineSegment& seg, const Vec3& x) {
  if (seg.distance(x) <= kOnSegmentTolerance * seg.length()) {
    std::ostringstream msg;
    msg << "evaluation point (" << x.transpose() << ") lies on segment [(" << seg.a().transpose() << "), ("
        << seg.b().transpose() << ")]";
    throw OnSegmentError(msg.str());
  }
  Local l;
  const Vec3 xa = x - seg.a();
  l.s_a = seg.tangent().dot(xa);
  l.s_b = l.s_a - seg.length();
  l.r_a = xa.norm();
  l.r_b = (x - seg.b()).norm();
  l.d = xa - l.s_a * seg.tangent();
  l.rho2 = l.d.squaredNorm();
  return l;
}

}  // namespace

LineSegment::LineSegment(const Vec3& a, const Vec3& b) : a_(a), b_(b), length_((b - a).norm()) {
  if (!(length_ > 0.0) || !std::isfinite(length_)) {
    throw std::invalid_argument("line segment must have positive finite length");
  }
  tangent_ = (b - a) / length_;
}

double LineSegment::distance(const Vec3& x) const {
  const double s = std::clamp(tangent_.dot(x - a_), 0.0, length_);
  return (x - (a_ + s * tangent_)).norm();
}

LineSourceNetwork LineSourceNetwork::time_only(std::vector<LineSegment> segments, std::function<double(double)> f,
                                               std::function<double(double)> df_dt) {
  LineSourceNetwork net;
  net.segments = std::move(segments);
  net.intensity = [f](const Vec3&, double t) { return f(t); };
  net.intensity_dt = [df_dt](const Vec3&, double t) { return df_dt(t); };
  net.intensity_grad = [](const Vec3&, double) { return Vec3::Zero().eval(); };
  net.intensity_laplacian = [](const Vec3&, double) { return 0.0; };
  return net;
}

LineSourceNetwork LineSourceNetwork::none() {
  return time_only({}, [](double) { return 0.0; }, [](double) { return 0.0; });
}

double distance_to_network(const LineSourceNetwork& network, const Vec3& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& seg : network.segments) d = std::min(d, seg.distance(x));
  return d;
}

// The ln argument is evaluated through whichever of r - s or rho^2 / (r + s)
// avoids cancellation: for points beyond b both factors carry rho^2 and it
// cancels, alongside the segment only the denominator does.
double eval_G(const LineSegment& seg, const Vec3& x) {
  const Local l = decompose(seg, x);
  double ratio;
  if (l.s_b > 0.0) {
    ratio = (l.r_a + l.s_a) / (l.r_b + l.s_b);
  } else if (l.s_a <= 0.0) {
    ratio = (l.r_b - l.s_b) / (l.r_a - l.s_a);
  } else {
    ratio = (l.r_b - l.s_b) * (l.r_a + l.s_a) / l.rho2;
  }
  return kInvFourPi * std::log(ratio);
}

Vec3 grad_G(const LineSegment& seg, const Vec3& x) {
  const Local l = decompose(seg, x);
  const Vec3& g = seg.tangent();
  // Gradients of ln(r + s) and ln(r - s) about either endpoint.
  auto plus = [&](double r, double s) -> Vec3 { return l.d / (r * (r + s)) + g / r; };
  auto minus = [&](double r, double s) -> Vec3 { return l.d / (r * (r - s)) - g / r; };

  Vec3 grad;
  if (l.s_b > 0.0) {
    grad = plus(l.r_a, l.s_a) - plus(l.r_b, l.s_b);
  } else if (l.s_a <= 0.0) {
    grad = minus(l.r_b, l.s_b) - minus(l.r_a, l.s_a);
  } else {
    grad = minus(l.r_b, l.s_b) + plus(l.r_a, l.s_a) - 2.0 * l.d / l.rho2;
  }
  return kInvFourPi * grad;
}

double eval_G(const LineSourceNetwork& network, const Vec3& x) {
  double sum = 0.0;
  for (const auto& seg : network.segments) sum += eval_G(seg, x);
  return sum;
}

Vec3 grad_G(const LineSourceNetwork& network, const Vec3& x) {
  Vec3 sum = Vec3::Zero();
  for (const auto& seg : network.segments) sum += grad_G(seg, x);
  return sum;
}

double eval_ps(const LineSourceNetwork& network, const Vec3& x, double t, double kappa) {
  const double f = network.intensity(x, t);
  if (f == 0.0) return 0.0;
  return f * eval_G(network, x) / kappa;
}

Vec3 eval_ws(const LineSourceNetwork& network, const Vec3& x, double t, double kappa) {
  (void)kappa;  // cancels for constant kappa
  const double f = network.intensity(x, t);
  const Vec3 grad_f = network.intensity_grad ? network.intensity_grad(x, t) : Vec3::Zero().eval();
  if (f == 0.0 && grad_f.isZero(0.0)) return Vec3::Zero();
  Vec3 w = -f * grad_G(network, x);
  if (!grad_f.isZero(0.0)) w -= eval_G(network, x) * grad_f;
  return w;
}

double eval_psi_r(const LineSourceNetwork& network, const Vec3& x, double t, double kappa, double biot_modulus,
                  const ScalarField& psi) {
  double value = psi ? psi(x, t) : 0.0;
  const double df_dt = network.intensity_dt ? network.intensity_dt(x, t) : 0.0;
  const double lap_f = network.intensity_laplacian ? network.intensity_laplacian(x, t) : 0.0;
  const Vec3 grad_f = network.intensity_grad ? network.intensity_grad(x, t) : Vec3::Zero().eval();
  if (network.segments.empty() || (df_dt == 0.0 && lap_f == 0.0 && grad_f.isZero(0.0))) return value;

  const double G = eval_G(network, x);
  value += -df_dt * G / (kappa * biot_modulus) + G * lap_f;
  if (!grad_f.isZero(0.0)) value += 2.0 * grad_G(network, x).dot(grad_f);
  return value;
}

namespace {

std::vector<double> axis_breakpoints(const LineSourceNetwork& network, int axis, int subdivisions) {
  std::vector<double> coarse = {0.0, 1.0};
  for (const auto& seg : network.segments) {
    for (double c : {seg.a()[axis], seg.b()[axis]}) {
      if (c > 0.0 && c < 1.0) coarse.push_back(c);
    }
  }
  std::sort(coarse.begin(), coarse.end());
  coarse.erase(std::unique(coarse.begin(), coarse.end(), [](double p, double q) { return std::abs(p - q) < 1e-14; }),
               coarse.end());
  std::vector<double> fine;
  for (size_t i = 0; i + 1 < coarse.size(); ++i) {
    for (int k = 0; k < subdivisions; ++k) {
      fine.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * k / subdivisions);
    }
  }
  fine.push_back(1.0);
  return fine;
}

struct SingularEdge {
  int axis = -1;
  double c1 = 0.0;  // corner coordinates in the two perpendicular axes
  double c2 = 0.0;
};

// Finds an axis-parallel segment running along an edge of the box.
SingularEdge find_singular_edge(const LineSourceNetwork& network, const Vec3& lo, const Vec3& hi) {
  constexpr double tol = 1e-12;
  for (const auto& seg : network.segments) {
    for (int axis = 0; axis < 3; ++axis) {
      if (std::abs(std::abs(seg.tangent()[axis]) - 1.0) > 1e-14) continue;
      const int k1 = (axis + 1) % 3, k2 = (axis + 2) % 3;
      const double p1 = seg.a()[k1], p2 = seg.a()[k2];
      const bool on1 = std::abs(p1 - lo[k1]) < tol || std::abs(p1 - hi[k1]) < tol;
      const bool on2 = std::abs(p2 - lo[k2]) < tol || std::abs(p2 - hi[k2]) < tol;
      const double s_lo = std::min(seg.a()[axis], seg.b()[axis]);
      const double s_hi = std::max(seg.a()[axis], seg.b()[axis]);
      const bool overlaps = std::min(s_hi, hi[axis]) - std::max(s_lo, lo[axis]) > tol;
      if (on1 && on2 && overlaps) return {axis, p1, p2};
    }
  }
  return {};
}

}  // namespace

WeakLaplacianResult verify_weak_laplacian(const LineSourceNetwork& network, const TestFunction& v,
                                          const WeakLaplacianQuadrature& quadrature) {
  if (quadrature.order < 1 || quadrature.subdivisions < 1) {
    throw std::invalid_argument("weak Laplacian quadrature needs order >= 1 and subdivisions >= 1");
  }
  const quad::LineRule g = quad::gauss_legendre(quadrature.order);
  const int m = quadrature.order;
  auto integrand = [&](const Vec3& x) { return grad_G(network, x).dot(v.gradient(x)); };

  std::array<std::vector<double>, 3> bp;
  for (int k = 0; k < 3; ++k) bp[k] = axis_breakpoints(network, k, quadrature.subdivisions);

  WeakLaplacianResult result;
  for (size_t i = 0; i + 1 < bp[0].size(); ++i) {
    for (size_t j = 0; j + 1 < bp[1].size(); ++j) {
      for (size_t k = 0; k + 1 < bp[2].size(); ++k) {
        const Vec3 lo(bp[0][i], bp[1][j], bp[2][k]);
        const Vec3 hi(bp[0][i + 1], bp[1][j + 1], bp[2][k + 1]);
        const SingularEdge edge = find_singular_edge(network, lo, hi);
        double box_sum = 0.0;

        if (edge.axis < 0) {
          const Vec3 ext = hi - lo;
          for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
              for (int c = 0; c < m; ++c) {
                const Vec3 x = lo + Vec3(g.points[a] * ext[0], g.points[b] * ext[1], g.points[c] * ext[2]);
                box_sum += g.weights[a] * g.weights[b] * g.weights[c] * integrand(x);
              }
            }
          }
          box_sum *= ext.prod();
        } else {
          // Two triangles with apex at the singular corner, each Duffy-mapped
          // from the unit square: p = c + xi (A - c + eta (B - A)).
          const int ax = edge.axis, k1 = (ax + 1) % 3, k2 = (ax + 2) % 3;
          const Eigen::Vector2d c(edge.c1, edge.c2);
          const Eigen::Vector2d far(std::abs(c[0] - lo[k1]) < 1e-12 ? hi[k1] : lo[k1],
                                  std::abs(c[1] - lo[k2]) < 1e-12 ? hi[k2] : lo[k2]);
          const Eigen::Vector2d adj1(far[0], c[1]);
          const Eigen::Vector2d adj2(c[0], far[1]);
          const double axial_len = hi[ax] - lo[ax];
          for (const auto& [A, B] : {std::pair{adj1, far}, std::pair{far, adj2}}) {
            const Eigen::Vector2d e1 = A - c, e2 = B - A;
            const double det = std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
            for (int a = 0; a < m; ++a) {
              for (int b = 0; b < m; ++b) {
                const double xi = g.points[a], eta = g.points[b];
                const Eigen::Vector2d p = c + xi * (e1 + eta * e2);
                const double w2 = g.weights[a] * g.weights[b] * xi * det;
                for (int s = 0; s < m; ++s) {
                  Vec3 x;
                  x[ax] = lo[ax] + g.points[s] * axial_len;
                  x[k1] = p[0];
                  x[k2] = p[1];
                  box_sum += w2 * g.weights[s] * axial_len * integrand(x);
                }
              }
            }
          }
        }
        result.volume_term += box_sum;
      }
    }
  }

  for (const auto& seg : network.segments) {
    const int parts = quadrature.subdivisions;
    for (int p = 0; p < parts; ++p) {
      for (int q = 0; q < m; ++q) {
        const double s = (p + g.points[q]) / parts;
        result.line_term += seg.length() * g.weights[q] / parts * v.value(seg.a() + s * (seg.b() - seg.a()));
      }
    }
  }
  result.residual = std::abs(result.volume_term - result.line_term);
  return result;
}

}  // namespace biotline
