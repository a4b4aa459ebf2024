#include "biotline/fem.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>

#include "biotline/quadrature.hpp"

namespace biotline {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::atomic<long> g_collisions{0};

// Quadrature points never sit on edges, but a segment running through a
// cell interior may still hit one; such points are moved by 1e-12 h.
template <class Field, class... Args>
auto sample(const Field& f, const Vec3& x, const Vec3& toward, double h, Args... args) {
  try {
    return f(x, args...);
  } catch (const OnSegmentError&) {
    Vec3 dir = toward - x;
    if (dir.norm() == 0.0) dir = Vec3(1.0, 1.0, 1.0);
    const Vec3 moved = x + 1e-12 * h * dir.normalized();
    if (g_collisions.fetch_add(1) == 0) {
      std::cerr << "warning: quadrature point on a line segment, perturbed by 1e-12 h\n";
    }
    return f(moved, args...);
  }
}

Vec3 map_point(const Mesh& mesh, int c, const std::array<double, 4>& bary) {
  const auto& t = mesh.cell(c);
  Vec3 x = Vec3::Zero();
  for (int k = 0; k < 4; ++k) x += bary[k] * mesh.vertex(t[k]);
  return x;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// Local 12x12 elasticity matrix, ordered (vertex a, component i) -> 3 a + i.
Eigen::Matrix<double, 12, 12> local_elasticity(const CellGeometry& g, double mu, double lambda) {
  Eigen::Matrix<double, 12, 12> k;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Vec3& ga = g.basis_gradients[a];
      const Vec3& gb = g.basis_gradients[b];
      const double dot = ga.dot(gb);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double v = mu * ((i == j ? dot : 0.0) + ga[j] * gb[i]) + lambda * ga[i] * gb[j];
          k(3 * a + i, 3 * b + j) = g.volume * v;
        }
      }
    }
  }
  return k;
}

template <class DofOf>
SparseMatrix elasticity_impl(const Mesh& mesh, const MaterialParams& params, int size, DofOf dof_of) {
  const double mu = params.mu();
  const double lambda = params.lambda();
  Triplets trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 144);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto k = local_elasticity(g, mu, lambda);
    const auto& t = mesh.cell(c);
    for (int a = 0; a < 4; ++a) {
      const int ra = dof_of(t[a]);
      if (ra < 0) continue;
      for (int b = 0; b < 4; ++b) {
        const int rb = dof_of(t[b]);
        if (rb < 0) continue;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) trips.emplace_back(ra + i, rb + j, k(3 * a + i, 3 * b + j));
        }
      }
    }
  }
  return from_triplets(size, size, trips);
}

template <class DofOf>
SparseMatrix coupling_impl(const Mesh& mesh, double alpha, int cols, DofOf dof_of) {
  Triplets trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 12);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& t = mesh.cell(c);
    for (int a = 0; a < 4; ++a) {
      const int col = dof_of(t[a]);
      if (col < 0) continue;
      for (int i = 0; i < 3; ++i) trips.emplace_back(c, col + i, alpha * g.volume * g.basis_gradients[a][i]);
    }
  }
  return from_triplets(mesh.num_cells(), cols, trips);
}

// Unscaled RT0 shape function of local face i: s_i (x - x_i) / (3 |K|).
Vec3 rt0_shape(const Mesh& mesh, int c, int i, const Vec3& x) {
  const double s = mesh.cell_face_signs(c)[i];
  return s * (x - mesh.vertex(mesh.cell(c)[i])) / (3.0 * mesh.cell_volume(c));
}

}  // namespace

void MaterialParams::validate() const {
  std::ostringstream bad;
  if (!(kappa > 0.0)) bad << " kappa=" << kappa;
  if (!(biot_modulus > 0.0)) bad << " M=" << biot_modulus;
  if (!(alpha > 0.0)) bad << " alpha=" << alpha;
  if (!(youngs_modulus > 0.0)) bad << " E=" << youngs_modulus;
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) bad << " nu=" << poisson_ratio;
  if (bad.str().empty() && !(mu() > 0.0 && lambda() > 0.0)) bad << " mu=" << mu() << " lambda=" << lambda();
  if (!bad.str().empty()) throw std::invalid_argument("material parameters must be positive:" + bad.str());
}

DofMaps DofMaps::build(const Mesh& mesh) {
  DofMaps d;
  d.vertex_dof.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary_vertex(v)) {
      d.vertex_dof[v] = d.num_u;
      d.num_u += 3;
    }
  }
  d.num_p = mesh.num_cells();
  d.num_w = mesh.num_faces();
  return d;
}

long quadrature_collisions() { return g_collisions.load(); }

SparseMatrix assemble_elasticity(const Mesh& mesh, const DofMaps& dofs, const MaterialParams& params) {
  return elasticity_impl(mesh, params, dofs.num_u, [&](int v) { return dofs.vertex_dof[v]; });
}

SparseMatrix assemble_elasticity_unconstrained(const Mesh& mesh, const MaterialParams& params) {
  return elasticity_impl(mesh, params, 3 * mesh.num_vertices(), [](int v) { return 3 * v; });
}

SparseMatrix assemble_p_mass(const Mesh& mesh, double coefficient) {
  Triplets trips;
  trips.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) trips.emplace_back(c, c, coefficient * mesh.cell_volume(c));
  return from_triplets(mesh.num_cells(), mesh.num_cells(), trips);
}

SparseMatrix assemble_rt0_mass(const Mesh& mesh, double inv_kappa) {
  const quad::TetRule& rule = quad::tet_rule(2);
  Triplets trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 16);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double vol = mesh.cell_volume(c);
    Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 x = map_point(mesh, c, rule.points[q]);
      std::array<Vec3, 4> phi;
      for (int i = 0; i < 4; ++i) phi[i] = rt0_shape(mesh, c, i, x);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) local(i, j) += rule.weights[q] * vol * phi[i].dot(phi[j]);
      }
    }
    const auto& faces = mesh.cell_faces(c);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) trips.emplace_back(faces[i], faces[j], inv_kappa * local(i, j));
    }
  }
  return from_triplets(mesh.num_faces(), mesh.num_faces(), trips);
}

SparseMatrix assemble_div(const Mesh& mesh) {
  Triplets trips;
  trips.reserve(static_cast<size_t>(mesh.num_cells()) * 4);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 4; ++i) trips.emplace_back(c, mesh.cell_faces(c)[i], mesh.cell_face_signs(c)[i]);
  }
  return from_triplets(mesh.num_cells(), mesh.num_faces(), trips);
}

SparseMatrix assemble_coupling_div_u(const Mesh& mesh, const DofMaps& dofs, double alpha) {
  return coupling_impl(mesh, alpha, dofs.num_u, [&](int v) { return dofs.vertex_dof[v]; });
}

SparseMatrix assemble_coupling_div_u_unconstrained(const Mesh& mesh, double alpha) {
  return coupling_impl(mesh, alpha, 3 * mesh.num_vertices(), [](int v) { return 3 * v; });
}

Vector assemble_load_p0(const Mesh& mesh, const ScalarField& f, double t, int degree) {
  Vector load = interpolate_p0(mesh, f, t, degree);
  for (int c = 0; c < mesh.num_cells(); ++c) load[c] *= mesh.cell_volume(c);
  return load;
}

Vector assemble_load_p1(const Mesh& mesh, const DofMaps& dofs, const VectorField& f, double t, int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  Vector load = Vector::Zero(dofs.num_u);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& tv = mesh.cell(c);
    const Vec3 centroid = mesh.cell_centroid(c);
    const double vol = mesh.cell_volume(c);
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 x = map_point(mesh, c, rule.points[q]);
      const Vec3 fx = sample(f, x, centroid, mesh.h(), t);
      for (int a = 0; a < 4; ++a) {
        const int dof = dofs.vertex_dof[tv[a]];
        if (dof < 0) continue;
        load.segment<3>(dof) += rule.weights[q] * vol * rule.points[q][a] * fx;
      }
    }
  }
  return load;
}

Vector assemble_load_p1_div(const Mesh& mesh, const DofMaps& dofs, const ScalarField& s, double t, int degree) {
  const Vector cell_integrals = assemble_load_p0(mesh, s, t, degree);
  Vector load = Vector::Zero(dofs.num_u);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& tv = mesh.cell(c);
    for (int a = 0; a < 4; ++a) {
      const int dof = dofs.vertex_dof[tv[a]];
      if (dof >= 0) load.segment<3>(dof) += cell_integrals[c] * g.basis_gradients[a];
    }
  }
  return load;
}

Vector assemble_load_rt0(const Mesh& mesh, const VectorField& f, double t, int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  Vector load = Vector::Zero(mesh.num_faces());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 centroid = mesh.cell_centroid(c);
    const double vol = mesh.cell_volume(c);
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 x = map_point(mesh, c, rule.points[q]);
      const Vec3 fx = sample(f, x, centroid, mesh.h(), t);
      if (fx.isZero(0.0)) continue;
      for (int i = 0; i < 4; ++i) {
        load[mesh.cell_faces(c)[i]] += rule.weights[q] * vol * fx.dot(rt0_shape(mesh, c, i, x));
      }
    }
  }
  return load;
}

Vector assemble_boundary_pressure_load(const Mesh& mesh, const ScalarField& p, double t, int degree) {
  const quad::TriangleRule& rule = quad::triangle_rule(degree);
  Vector load = Vector::Zero(mesh.num_faces());
  for (int f : mesh.boundary_faces()) {
    const int c = mesh.face_cells(f).first;
    int local = 0;
    while (mesh.cell_faces(c)[local] != f) ++local;
    const double sign = mesh.cell_face_signs(c)[local];
    const auto& fv = mesh.face(f);
    const Vec3 centroid = mesh.face_centroid(f);
    // The RT0 basis has normal component sign / |F| on its face.
    double mean = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec3 x = b[0] * mesh.vertex(fv[0]) + b[1] * mesh.vertex(fv[1]) + b[2] * mesh.vertex(fv[2]);
      mean += rule.weights[q] * sample(p, x, centroid, mesh.h(), t);
    }
    load[f] = sign * mean;
  }
  return load;
}

Vector interpolate_p0(const Mesh& mesh, const ScalarField& f, double t, int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  Vector out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 centroid = mesh.cell_centroid(c);
    double avg = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      avg += rule.weights[q] * sample(f, map_point(mesh, c, rule.points[q]), centroid, mesh.h(), t);
    }
    out[c] = avg;
  }
  return out;
}

Vector interpolate_rt0(const Mesh& mesh, const VectorField& f, double t, int degree) {
  const quad::TriangleRule& rule = quad::triangle_rule(degree);
  Vector out(mesh.num_faces());
  for (int face = 0; face < mesh.num_faces(); ++face) {
    const auto& fv = mesh.face(face);
    // Nudge toward an adjacent cell centroid if needed.
    const Vec3 toward = mesh.cell_centroid(mesh.face_cells(face).first);
    double flux = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec3 x = b[0] * mesh.vertex(fv[0]) + b[1] * mesh.vertex(fv[1]) + b[2] * mesh.vertex(fv[2]);
      flux += rule.weights[q] * sample(f, x, toward, mesh.h(), t).dot(mesh.face_normal(face));
    }
    out[face] = flux * mesh.face_area(face);
  }
  return out;
}

Vector interpolate_p1(const Mesh& mesh, const DofMaps& dofs, const VectorField& f, double t) {
  Vector out = Vector::Zero(dofs.num_u);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (dofs.vertex_dof[v] >= 0) out.segment<3>(dofs.vertex_dof[v]) = f(mesh.vertex(v), t);
  }
  return out;
}

Vector interpolate_ps_p0(const Mesh& mesh, const LineSourceNetwork& network, double t, double kappa, int degree) {
  if (network.segments.empty()) return Vector::Zero(mesh.num_cells());
  return interpolate_p0(
      mesh, [&](const Vec3& x, double time) { return eval_ps(network, x, time, kappa); }, t, degree);
}

Vector interpolate_ws_rt0(const Mesh& mesh, const LineSourceNetwork& network, double t, double kappa, int degree) {
  if (network.segments.empty()) return Vector::Zero(mesh.num_faces());
  return interpolate_rt0(
      mesh, [&](const Vec3& x, double time) { return eval_ws(network, x, time, kappa); }, t, degree);
}

Vec3 eval_rt0(const Mesh& mesh, const Vector& coeffs, int cell, const Vec3& x) {
  Vec3 w = Vec3::Zero();
  for (int i = 0; i < 4; ++i) w += coeffs[mesh.cell_faces(cell)[i]] * rt0_shape(mesh, cell, i, x);
  return w;
}

Vec3 rt0_cell_average(const Mesh& mesh, const Vector& coeffs, int cell) {
  return eval_rt0(mesh, coeffs, cell, mesh.cell_centroid(cell));
}

Eigen::MatrixX3d p1_nodal_values(const Mesh& mesh, const DofMaps& dofs, const Vector& u) {
  Eigen::MatrixX3d out = Eigen::MatrixX3d::Zero(mesh.num_vertices(), 3);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (dofs.vertex_dof[v] >= 0) out.row(v) = u.segment<3>(dofs.vertex_dof[v]).transpose();
  }
  return out;
}

double l2_error_p0(const Mesh& mesh, const Vector& coeffs, const ScalarField& exact, double t, int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 centroid = mesh.cell_centroid(c);
    double local = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const double e = coeffs[c] - sample(exact, map_point(mesh, c, rule.points[q]), centroid, mesh.h(), t);
      local += rule.weights[q] * e * e;
    }
    sum += mesh.cell_volume(c) * local;
  }
  return std::sqrt(sum);
}

double l2_error_rt0(const Mesh& mesh, const Vector& coeffs, const VectorField& exact, double t, int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 centroid = mesh.cell_centroid(c);
    double local = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 x = map_point(mesh, c, rule.points[q]);
      local += rule.weights[q] * (eval_rt0(mesh, coeffs, c, x) - sample(exact, x, centroid, mesh.h(), t)).squaredNorm();
    }
    sum += mesh.cell_volume(c) * local;
  }
  return std::sqrt(sum);
}

double l2_error_p1(const Mesh& mesh, const DofMaps& dofs, const Vector& coeffs, const VectorField& exact, double t,
                   int degree) {
  const quad::TetRule& rule = quad::tet_rule(degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& tv = mesh.cell(c);
    std::array<Vec3, 4> nodal;
    for (int a = 0; a < 4; ++a) {
      const int dof = dofs.vertex_dof[tv[a]];
      nodal[a] = dof < 0 ? Vec3::Zero() : Vec3(coeffs.segment<3>(dof));
    }
    const Vec3 centroid = mesh.cell_centroid(c);
    double local = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec3 uh = b[0] * nodal[0] + b[1] * nodal[1] + b[2] * nodal[2] + b[3] * nodal[3];
      local += rule.weights[q] * (uh - sample(exact, map_point(mesh, c, b), centroid, mesh.h(), t)).squaredNorm();
    }
    sum += mesh.cell_volume(c) * local;
  }
  return std::sqrt(sum);
}

}  // namespace biotline
