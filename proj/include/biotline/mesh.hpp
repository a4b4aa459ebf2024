#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace biotline {

using Vec3 = Eigen::Vector3d;

/// Structured tetrahedral mesh of the unit cube (coordinates in mm).
///
/// Every face carries one global unit normal, fixed by its sorted vertex
/// triple (v0 < v1 < v2): n = (x1 - x0) x (x2 - x0) / |...|. A cell sees
/// local face i (the face opposite local vertex i) with sign +1 when that
/// global normal points out of the cell, -1 otherwise.
///
/// Immutable after construction; safe for concurrent reads.
class Mesh {
 public:
  struct FaceCells {
    int first = -1;
    int second = -1;  // -1 on the boundary
  };

  int subdivisions() const { return n_; }
  double h() const { return 1.0 / n_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  const Vec3& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::array<int, 4>& cell(int c) const { return cells_[c]; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }

  /// Face ids of cell c, indexed by the opposite local vertex.
  const std::array<int, 4>& cell_faces(int c) const { return cell_faces_[c]; }
  const std::array<int8_t, 4>& cell_face_signs(int c) const { return cell_face_signs_[c]; }

  const FaceCells& face_cells(int f) const { return face_cells_[f]; }
  const Vec3& face_normal(int f) const { return face_normals_[f]; }
  double face_area(int f) const { return face_areas_[f]; }
  double cell_volume(int c) const { return cell_volumes_[c]; }
  Vec3 cell_centroid(int c) const;
  Vec3 face_centroid(int f) const;

  bool is_boundary_face(int f) const { return face_cells_[f].second < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  const std::vector<int>& boundary_faces() const { return boundary_faces_; }

 private:
  friend Mesh build_structured_tet_mesh(int n);
  Mesh() = default;

  int n_ = 0;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 4>> cell_faces_;
  std::vector<std::array<int8_t, 4>> cell_face_signs_;
  std::vector<FaceCells> face_cells_;
  std::vector<Vec3> face_normals_;
  std::vector<double> face_areas_;
  std::vector<double> cell_volumes_;
  std::vector<int> boundary_faces_;
  std::vector<uint8_t> boundary_vertex_;
};

/// Largest accepted subdivision count; keeps 6 n^3 inside 32-bit ids.
inline constexpr int kMaxSubdivisions = 512;

/// Unit cube split into n^3 sub-cubes, each cut into 6 tetrahedra sharing
/// the sub-cube's main diagonal (Kuhn decomposition). Throws
/// std::invalid_argument for n < 1 or n > kMaxSubdivisions.
Mesh build_structured_tet_mesh(int n);

struct CellGeometry {
  double volume = 0.0;
  /// Columns are x1 - x0, x2 - x0, x3 - x0.
  Eigen::Matrix3d jacobian;
  /// Gradients of the barycentric coordinates (P1 basis functions).
  std::array<Vec3, 4> basis_gradients;
  /// Outward unit normals and areas of the faces opposite each vertex.
  std::array<Vec3, 4> outward_normals;
  std::array<double, 4> face_areas{};
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

}  // namespace biotline
