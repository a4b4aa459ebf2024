#include "biotline/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace biotline {

namespace {

struct FaceRecord {
  std::array<int, 3> key;
  int cell;
  int local;
};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

Vec3 Mesh::cell_centroid(int c) const {
  const auto& vs = cells_[c];
  return 0.25 * (vertices_[vs[0]] + vertices_[vs[1]] + vertices_[vs[2]] + vertices_[vs[3]]);
}

Vec3 Mesh::face_centroid(int f) const {
  const auto& vs = faces_[f];
  return (vertices_[vs[0]] + vertices_[vs[1]] + vertices_[vs[2]]) / 3.0;
}

Mesh build_structured_tet_mesh(int n) {
  if (n < 1) {
    throw std::invalid_argument("mesh subdivisions must be >= 1, got " + std::to_string(n));
  }
  if (n > kMaxSubdivisions) {
    throw std::invalid_argument("mesh subdivisions " + std::to_string(n) + " exceed the supported maximum " +
                                std::to_string(kMaxSubdivisions));
  }

  Mesh mesh;
  mesh.n_ = n;
  const int np = n + 1;
  const double h = 1.0 / n;

  mesh.vertices_.reserve(static_cast<size_t>(np) * np * np);
  mesh.boundary_vertex_.reserve(mesh.vertices_.capacity());
  for (int k = 0; k < np; ++k) {
    for (int j = 0; j < np; ++j) {
      for (int i = 0; i < np; ++i) {
        mesh.vertices_.emplace_back(i * h, j * h, k * h);
        const bool on_boundary = i == 0 || j == 0 || k == 0 || i == n || j == n || k == n;
        mesh.boundary_vertex_.push_back(on_boundary ? 1 : 0);
      }
    }
  }

  mesh.cells_.reserve(6 * static_cast<size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int v0 = (k * np + j) * np + i;
        const int v1 = v0 + 1;
        const int v2 = v0 + np;
        const int v3 = v1 + np;
        const int v4 = v0 + np * np;
        const int v5 = v1 + np * np;
        const int v6 = v2 + np * np;
        const int v7 = v3 + np * np;
        const std::array<std::array<int, 4>, 6> tets = {{{v0, v1, v3, v7},
                                                         {v0, v1, v7, v5},
                                                         {v0, v5, v7, v4},
                                                         {v0, v3, v2, v7},
                                                         {v0, v6, v4, v7},
                                                         {v0, v2, v6, v7}}};
        for (auto t : tets) {
          const auto& x = mesh.vertices_;
          if (signed_volume(x[t[0]], x[t[1]], x[t[2]], x[t[3]]) < 0.0) std::swap(t[2], t[3]);
          mesh.cells_.push_back(t);
        }
      }
    }
  }

  // Faces: collect (sorted vertex triple, cell, local index) and merge equal keys.
  std::vector<FaceRecord> records;
  records.reserve(4 * mesh.cells_.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells_[c];
    for (int local = 0; local < 4; ++local) {
      std::array<int, 3> key{};
      int m = 0;
      for (int v = 0; v < 4; ++v) {
        if (v != local) key[m++] = t[v];
      }
      std::sort(key.begin(), key.end());
      records.push_back({key, c, local});
    }
  }
  std::sort(records.begin(), records.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return a.key < b.key || (a.key == b.key && a.cell < b.cell);
  });

  mesh.cell_faces_.assign(mesh.cells_.size(), {-1, -1, -1, -1});
  mesh.cell_face_signs_.assign(mesh.cells_.size(), {0, 0, 0, 0});
  for (size_t r = 0; r < records.size();) {
    size_t end = r + 1;
    while (end < records.size() && records[end].key == records[r].key) ++end;
    if (end - r > 2) throw std::logic_error("non-manifold face in structured mesh");

    const int f = static_cast<int>(mesh.faces_.size());
    const auto& key = records[r].key;
    mesh.faces_.push_back(key);
    const Vec3& x0 = mesh.vertices_[key[0]];
    const Vec3 cross = (mesh.vertices_[key[1]] - x0).cross(mesh.vertices_[key[2]] - x0);
    const double norm = cross.norm();
    mesh.face_normals_.push_back(cross / norm);
    mesh.face_areas_.push_back(0.5 * norm);

    Mesh::FaceCells fc;
    fc.first = records[r].cell;
    if (end - r == 2) fc.second = records[r + 1].cell;
    mesh.face_cells_.push_back(fc);
    if (fc.second < 0) mesh.boundary_faces_.push_back(f);

    const Vec3 centroid = (x0 + mesh.vertices_[key[1]] + mesh.vertices_[key[2]]) / 3.0;
    for (size_t q = r; q < end; ++q) {
      const int c = records[q].cell;
      const int local = records[q].local;
      const Vec3& opposite = mesh.vertices_[mesh.cells_[c][local]];
      mesh.cell_faces_[c][local] = f;
      mesh.cell_face_signs_[c][local] = mesh.face_normals_[f].dot(centroid - opposite) > 0.0 ? 1 : -1;
    }
    r = end;
  }

  mesh.cell_volumes_.resize(mesh.cells_.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells_[c];
    const auto& x = mesh.vertices_;
    mesh.cell_volumes_[c] = signed_volume(x[t[0]], x[t[1]], x[t[2]], x[t[3]]);
  }
  return mesh;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.num_cells()) {
    throw std::out_of_range("cell id " + std::to_string(cell) + " out of range [0, " +
                            std::to_string(mesh.num_cells()) + ")");
  }
  const auto& t = mesh.cell(cell);
  const Vec3& x0 = mesh.vertex(t[0]);

  CellGeometry g;
  for (int k = 0; k < 3; ++k) g.jacobian.col(k) = mesh.vertex(t[k + 1]) - x0;
  g.volume = g.jacobian.determinant() / 6.0;

  // Rows of J^{-1} are the gradients of barycentric coordinates 1..3.
  const Eigen::Matrix3d inv = g.jacobian.inverse();
  g.basis_gradients[0] = -(inv.row(0) + inv.row(1) + inv.row(2)).transpose();
  for (int k = 0; k < 3; ++k) g.basis_gradients[k + 1] = inv.row(k).transpose();

  for (int i = 0; i < 4; ++i) {
    const double len = g.basis_gradients[i].norm();
    g.outward_normals[i] = -g.basis_gradients[i] / len;
    g.face_areas[i] = 3.0 * g.volume * len;
  }
  return g;
}

}  // namespace biotline
