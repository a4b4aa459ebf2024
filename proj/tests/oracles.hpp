// Independent reference computations used by the tests. Nothing here calls
// the closed forms under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "biotline/greens.hpp"

namespace oracle {

using biotline::Vec3;

// (1 / 4 pi) * integral over [a, b] of ds / |x - y(s)|, adaptive Gauss-Kronrod.
inline double single_layer(const Vec3& a, const Vec3& b, const Vec3& x) {
  const Vec3 d = b - a;
  auto f = [&](double s) { return 1.0 / (x - a - s * d).norm(); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 30, 1e-14);
  return d.norm() * integral / (4.0 * std::numbers::pi);
}

inline Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return g;
}

// Standard 7-point Laplacian, second order.
inline double fd_laplacian7(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  double lap = -6.0 * f(x);
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    lap += f(x + e) + f(x - e);
  }
  return lap / (h * h);
}

// 13-point Laplacian, fourth order.
inline double fd_laplacian13(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  double lap = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    lap += -f(x + 2 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2 * e);
  }
  return lap / (12.0 * h * h);
}

inline double fd_divergence(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double h) {
  double div = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    div += (f(x + e)[i] - f(x - e)[i]) / (2.0 * h);
  }
  return div;
}

// Uniform points in the unit cube whose distance from [a, b] is at least min_dist.
inline std::vector<Vec3> points_away_from(const Vec3& a, const Vec3& b, int count, double min_dist, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> out;
  const Vec3 d = b - a;
  while (static_cast<int>(out.size()) < count) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const double s = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    if ((x - a - s * d).norm() >= min_dist) out.push_back(x);
  }
  return out;
}

inline double bubble(const Vec3& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]); }

inline Vec3 bubble_gradient(const Vec3& x) {
  const Vec3 s(x[0] * (1 - x[0]), x[1] * (1 - x[1]), x[2] * (1 - x[2]));
  return {(1 - 2 * x[0]) * s[1] * s[2], s[0] * (1 - 2 * x[1]) * s[2], s[0] * s[1] * (1 - 2 * x[2])};
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace oracle
