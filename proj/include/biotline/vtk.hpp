#pragma once

#include <string>
#include <vector>

#include "biotline/biot.hpp"

namespace biotline {

struct VtkCellScalar {
  std::string name;
  Vector values;  // one per cell
};

struct VtkVectorField {
  std::string name;
  Eigen::MatrixX3d values;  // one row per cell or per vertex
};

/// Legacy ASCII VTK unstructured grid of linear tetrahedra (cell type 10).
/// Throws std::runtime_error if the file cannot be written.
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<VtkCellScalar>& cell_scalars,
               const std::vector<VtkVectorField>& cell_vectors, const std::vector<VtkVectorField>& point_vectors);

/// Writes the reconstructed full pressure, the full flux (cell averages and
/// their magnitude) and the displacement of a solver state.
void export_fields(const std::string& path, const BiotSolver& solver, const DiscreteState& state);

}  // namespace biotline
