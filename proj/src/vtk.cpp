#include "biotline/vtk.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace biotline {

namespace {

void check_size(const std::string& name, Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    throw std::invalid_argument("VTK field '" + name + "' has " + std::to_string(got) + " entries, expected " +
                                std::to_string(want));
  }
}

void write_vectors(std::ostream& out, const VtkVectorField& f) {
  out << "VECTORS " << f.name << " double\n";
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    out << f.values(i, 0) << ' ' << f.values(i, 1) << ' ' << f.values(i, 2) << '\n';
  }
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<VtkCellScalar>& cell_scalars,
               const std::vector<VtkVectorField>& cell_vectors, const std::vector<VtkVectorField>& point_vectors) {
  for (const auto& f : cell_scalars) check_size(f.name, f.values.size(), mesh.num_cells());
  for (const auto& f : cell_vectors) check_size(f.name, f.values.rows(), mesh.num_cells());
  for (const auto& f : point_vectors) check_size(f.name, f.values.rows(), mesh.num_vertices());

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out.precision(12);

  out << "# vtk DataFile Version 3.0\n"
      << "biotline fields\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& x = mesh.vertex(v);
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  out << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cell(c);
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "10\n";

  if (!cell_scalars.empty() || !cell_vectors.empty()) {
    out << "CELL_DATA " << mesh.num_cells() << '\n';
    for (const auto& f : cell_scalars) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < f.values.size(); ++i) out << f.values[i] << '\n';
    }
    for (const auto& f : cell_vectors) write_vectors(out, f);
  }
  if (!point_vectors.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const auto& f : point_vectors) write_vectors(out, f);
  }
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void export_fields(const std::string& path, const BiotSolver& solver, const DiscreteState& state) {
  const Mesh& mesh = solver.mesh();
  const FullFields full = solver.reconstruct_full(state);
  Eigen::MatrixX3d flux(mesh.num_cells(), 3);
  Vector magnitude(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 w = rt0_cell_average(mesh, full.w, c);
    flux.row(c) = w.transpose();
    magnitude[c] = w.norm();
  }
  write_vtk(path, mesh, {{"pressure", full.p}, {"flux_magnitude", magnitude}}, {{"flux", flux}},
            {{"displacement", p1_nodal_values(mesh, solver.dofs(), state.u)}});
}

}  // namespace biotline
