#include <cmath>

#include "biotline/quadrature.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace biotline;

TEST_CASE("Gauss-Legendre is exact to degree 2m - 1 on [0, 1]") {
  for (int m = 1; m <= 12; ++m) {
    const quad::LineRule r = quad::gauss_legendre(m);
    REQUIRE(static_cast<int>(r.points.size()) == m);
    for (int k = 0; k <= 2 * m - 1; ++k) {
      double s = 0.0;
      for (int q = 0; q < m; ++q) s += r.weights[q] * std::pow(r.points[q], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(quad::gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("tetrahedron rules integrate monomials exactly") {
  for (int degree = 1; degree <= 8; ++degree) {
    CAPTURE(degree);
    const quad::TetRule& r = quad::tet_rule(degree);
    double wsum = 0.0;
    for (size_t q = 0; q < r.points.size(); ++q) {
      wsum += r.weights[q];
      CHECK(r.weights[q] > 0.0);
      for (double l : r.points[q]) CHECK(l > 0.0);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        for (int c = 0; a + b + c <= degree; ++c) {
          double s = 0.0;
          for (size_t q = 0; q < r.points.size(); ++q) {
            const auto& l = r.points[q];
            s += r.weights[q] * std::pow(l[1], a) * std::pow(l[2], b) * std::pow(l[3], c);
          }
          const double exact = oracle::factorial(a) * oracle::factorial(b) * oracle::factorial(c) /
                               oracle::factorial(a + b + c + 3);
          CHECK(s / 6.0 == doctest::Approx(exact).epsilon(1e-12));
        }
      }
    }
  }
  CHECK_THROWS_AS(quad::tet_rule(0), std::invalid_argument);
}

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int degree = 1; degree <= 8; ++degree) {
    CAPTURE(degree);
    const quad::TriangleRule& r = quad::triangle_rule(degree);
    for (size_t q = 0; q < r.points.size(); ++q) {
      CHECK(r.weights[q] > 0.0);
      for (double l : r.points[q]) CHECK(l > 0.0);
    }
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (size_t q = 0; q < r.points.size(); ++q) {
          s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
        }
        const double exact = oracle::factorial(a) * oracle::factorial(b) / oracle::factorial(a + b + 2);
        CHECK(s / 2.0 == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
}
