#pragma once

#include <string>
#include <vector>

namespace biotline {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Green's function checks on the default segment: values against adaptive
/// quadrature of the single-layer integral, gradient against central
/// differences, harmonicity off the segment and the weak Laplacian identity.
std::vector<CheckResult> run_greens_checks();

/// Assembly checks on a small structured mesh: rigid-body kernel of the
/// elasticity matrix, symmetry, RT0/P0 exactness and the coupling transpose.
std::vector<CheckResult> run_fem_checks(int n = 4);

}  // namespace biotline
