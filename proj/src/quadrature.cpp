#include "biotline/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

namespace biotline::quad {

LineRule gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1, got " + std::to_string(m));
  // legendre_p_zeros returns the non-negative roots only.
  const auto zeros = boost::math::legendre_p_zeros<double>(m);
  std::vector<double> nodes;
  for (double z : zeros) {
    nodes.push_back(z);
    if (z != 0.0) nodes.push_back(-z);
  }
  std::sort(nodes.begin(), nodes.end());

  LineRule rule;
  for (double x : nodes) {
    const double dp = boost::math::legendre_p_prime(m, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  }
  return rule;
}

namespace {

TetRule tabulated_tet(int degree) {
  TetRule r;
  r.degree = degree;
  auto add = [&r](double a, double b, double c, double d, double w) {
    r.points.push_back({a, b, c, d});
    r.weights.push_back(w);
  };
  auto add_orbit4 = [&add](double a, double w) {
    const double b = 1.0 - 3.0 * a;
    add(b, a, a, a, w);
    add(a, b, a, a, w);
    add(a, a, b, a, w);
    add(a, a, a, b, w);
  };
  auto add_orbit6 = [&add](double a, double w) {
    const double b = 0.5 - a;
    add(a, a, b, b, w);
    add(a, b, a, b, w);
    add(a, b, b, a, w);
    add(b, a, a, b, w);
    add(b, a, b, a, w);
    add(b, b, a, a, w);
  };
  switch (degree) {
    case 1:
      add(0.25, 0.25, 0.25, 0.25, 1.0);
      break;
    case 2:
      add_orbit4((5.0 - std::sqrt(5.0)) / 20.0, 0.25);
      break;
    case 5:
      // 14-point rule, all weights positive.
      add_orbit4(0.0927352503108912264, 0.0734930431163619496);
      add_orbit4(0.310885919263300610, 0.112687925718015850);
      add_orbit6(0.0455037041256496494, 0.0425460207770814665);
      break;
    default:
      break;
  }
  return r;
}

TetRule collapsed_tet(int degree) {
  // x = u, y = (1-u) v, z = (1-u)(1-v) w with Jacobian (1-u)^2 (1-v).
  const int m = (degree + 4) / 2;
  const LineRule g = gauss_legendre(m);
  TetRule r;
  r.degree = degree;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double u = g.points[i], v = g.points[j], w = g.points[k];
        const double x = u, y = (1.0 - u) * v, z = (1.0 - u) * (1.0 - v) * w;
        const double weight = 6.0 * g.weights[i] * g.weights[j] * g.weights[k] * (1.0 - u) * (1.0 - u) * (1.0 - v);
        r.points.push_back({1.0 - x - y - z, x, y, z});
        r.weights.push_back(weight);
      }
    }
  }
  return r;
}

TriangleRule tabulated_triangle(int degree) {
  TriangleRule r;
  r.degree = degree;
  auto add_orbit3 = [&r](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({b, a, a});
    r.points.push_back({a, b, a});
    r.points.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  };
  switch (degree) {
    case 1:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(1.0);
      break;
    case 2:
      add_orbit3(1.0 / 6.0, 1.0 / 3.0);
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(9.0 / 40.0);
      add_orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      add_orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      break;
    }
    default:
      break;
  }
  return r;
}

TriangleRule collapsed_triangle(int degree) {
  const int m = (degree + 3) / 2;
  const LineRule g = gauss_legendre(m);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = g.points[i], v = g.points[j];
      const double x = u, y = (1.0 - u) * v;
      r.points.push_back({1.0 - x - y, x, y});
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return r;
}

template <class Rule, class Make>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int degree, Make make) {
  if (degree < 1) throw std::invalid_argument("quadrature degree must be >= 1, got " + std::to_string(degree));
  std::lock_guard lock(mu);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

}  // namespace

const TetRule& tet_rule(int degree) {
  static std::map<int, TetRule> cache;
  static std::mutex mu;
  return cached(cache, mu, degree, [](int d) {
    TetRule r = tabulated_tet(d);
    return r.points.empty() ? collapsed_tet(d) : r;
  });
}

const TriangleRule& triangle_rule(int degree) {
  static std::map<int, TriangleRule> cache;
  static std::mutex mu;
  return cached(cache, mu, degree, [](int d) {
    TriangleRule r = tabulated_triangle(d);
    return r.points.empty() ? collapsed_triangle(d) : r;
  });
}

}  // namespace biotline::quad
