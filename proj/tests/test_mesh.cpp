#include <map>
#include <set>

#include "biotline/mesh.hpp"
#include "doctest.h"

using namespace biotline;

TEST_CASE("counts for n = 1 and n = 2") {
  const Mesh m1 = build_structured_tet_mesh(1);
  CHECK(m1.num_vertices() == 8);
  CHECK(m1.num_cells() == 6);
  double vol = 0.0;
  for (int c = 0; c < m1.num_cells(); ++c) vol += m1.cell_volume(c);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));

  const Mesh m2 = build_structured_tet_mesh(2);
  CHECK(m2.num_vertices() == 27);
  CHECK(m2.num_cells() == 48);
}

TEST_CASE("invalid subdivision counts are rejected") {
  CHECK_THROWS_AS(build_structured_tet_mesh(0), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_tet_mesh(-3), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_tet_mesh(kMaxSubdivisions + 1), std::invalid_argument);
  const Mesh m = build_structured_tet_mesh(1);
  CHECK_THROWS_AS(cell_geometry(m, 6), std::out_of_range);
  CHECK_THROWS_AS(cell_geometry(m, -1), std::out_of_range);
}

TEST_CASE("faces are conforming for n = 8") {
  const int n = 8;
  const Mesh m = build_structured_tet_mesh(n);
  // 4 faces per cell, boundary faces counted once: 2 per boundary square.
  CHECK(static_cast<int>(m.boundary_faces().size()) == 12 * n * n);
  CHECK(m.num_faces() == (4 * m.num_cells() + 12 * n * n) / 2);

  std::map<int, int> uses;
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int f : m.cell_faces(c)) ++uses[f];
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    CHECK(uses[f] == (m.is_boundary_face(f) ? 1 : 2));
  }

  // Every face key is a distinct vertex triple.
  std::set<std::array<int, 3>> keys;
  for (int f = 0; f < m.num_faces(); ++f) keys.insert(m.face(f));
  CHECK(static_cast<int>(keys.size()) == m.num_faces());
}

TEST_CASE("interior faces carry opposite signs in their two cells") {
  const Mesh m = build_structured_tet_mesh(4);
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto fc = m.face_cells(f);
    auto sign_in = [&](int c) {
      for (int i = 0; i < 4; ++i) {
        if (m.cell_faces(c)[i] == f) return static_cast<int>(m.cell_face_signs(c)[i]);
      }
      return 0;
    };
    if (fc.second >= 0) {
      CHECK(sign_in(fc.first) == -sign_in(fc.second));
    } else {
      CHECK(sign_in(fc.first) != 0);
    }
  }
}

TEST_CASE("face signs agree with geometry") {
  const Mesh m = build_structured_tet_mesh(3);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int i = 0; i < 4; ++i) {
      const int f = m.cell_faces(c)[i];
      const double outward = m.face_normal(f).dot(m.face_centroid(f) - m.cell_centroid(c));
      CHECK((outward > 0 ? 1 : -1) == m.cell_face_signs(c)[i]);
      // The face opposite local vertex i does not contain it.
      for (int v : m.face(f)) CHECK(v != m.cell(c)[i]);
    }
  }
  // Global normal from the sorted triple.
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto& t = m.face(f);
    CHECK(t[0] < t[1]);
    CHECK(t[1] < t[2]);
    const Vec3 n = (m.vertex(t[1]) - m.vertex(t[0])).cross(m.vertex(t[2]) - m.vertex(t[0]));
    CHECK((n.normalized() - m.face_normal(f)).norm() < 1e-14);
    CHECK(0.5 * n.norm() == doctest::Approx(m.face_area(f)).epsilon(1e-14));
  }
}

TEST_CASE("boundary normals point out of the cube") {
  const Mesh m = build_structured_tet_mesh(2);
  for (int f : m.boundary_faces()) {
    const int c = m.face_cells(f).first;
    int sign = 0;
    for (int i = 0; i < 4; ++i) {
      if (m.cell_faces(c)[i] == f) sign = m.cell_face_signs(c)[i];
    }
    const Vec3 out = sign * m.face_normal(f);
    const Vec3 x = m.face_centroid(f);
    // Outward normal of the cube face the triangle lies on.
    Vec3 expect = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      if (std::abs(x[k]) < 1e-14) expect[k] = -1;
      if (std::abs(x[k] - 1) < 1e-14) expect[k] = 1;
    }
    CHECK((out - expect).norm() < 1e-14);
  }
}

TEST_CASE("cell geometry") {
  SUBCASE("unit-cube tetrahedra have volume 1/6 and det J = 6 |K|") {
    const Mesh m = build_structured_tet_mesh(1);
    for (int c = 0; c < 6; ++c) {
      const CellGeometry g = cell_geometry(m, c);
      CHECK(g.volume == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
      CHECK(g.jacobian.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("n = 8 cells all have volume 1 / (6 * 8^3)") {
    const Mesh m = build_structured_tet_mesh(8);
    double total = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
      CHECK(m.cell_volume(c) == doctest::Approx(1.0 / (6.0 * 512.0)).epsilon(1e-12));
      total += m.cell_volume(c);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  SUBCASE("closed surface and barycentric gradients") {
    const Mesh m = build_structured_tet_mesh(3);
    for (int c = 0; c < m.num_cells(); ++c) {
      const CellGeometry g = cell_geometry(m, c);
      Vec3 s = Vec3::Zero();
      Vec3 gsum = Vec3::Zero();
      double area_scale = 0.0;
      for (int i = 0; i < 4; ++i) {
        s += g.face_areas[i] * g.outward_normals[i];
        area_scale += g.face_areas[i];
        gsum += g.basis_gradients[i];
        CHECK(g.face_areas[i] == doctest::Approx(m.face_area(m.cell_faces(c)[i])).epsilon(1e-13));
        for (int j = 0; j < 4; ++j) {
          const double lam = g.basis_gradients[i].dot(m.vertex(m.cell(c)[j]) - m.vertex(m.cell(c)[0]));
          CHECK(lam == doctest::Approx((i == j ? 1.0 : 0.0) - (i == 0 ? 1.0 : 0.0)).epsilon(1e-13));
        }
      }
      CHECK(s.norm() <= 1e-12 * area_scale);
      CHECK(gsum.norm() < 1e-12 / m.h());
      CHECK(g.volume > 0.0);
    }
  }
}

TEST_CASE("boundary vertices") {
  const Mesh m = build_structured_tet_mesh(4);
  int count = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec3& x = m.vertex(v);
    const bool on = x.minCoeff() < 1e-14 || x.maxCoeff() > 1 - 1e-14;
    CHECK(on == m.is_boundary_vertex(v));
    count += on;
  }
  CHECK(count == 125 - 27);
}
