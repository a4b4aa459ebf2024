#pragma once

#include <stdexcept>
#include <string>

#include "biotline/manufactured.hpp"

namespace biotline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed for a single run of the manufactured line-source case.
struct RunConfig {
  MaterialParams params;
  SolverConfig solver;
  ManufacturedCase mcase;
  int mesh_n = 8;
  std::string vtk_output;  // empty: no export
};

/// Parses a JSON document of the form
///
///   { "material": { "kappa", "biot_modulus", "alpha", "youngs_modulus",
///                   "poisson_ratio", "rho_f", "gravity": [gx, gy, gz] },
///     "solver":   { "tau", "final_time", "eps_a", "eps_r", "max_iters",
///                   "load_degree", "singularity_removal" },
///     "segment":  { "a": [x, y, z], "b": [x, y, z] },
///     "mesh":     { "n" },
///     "output":   { "vtk" } }
///
/// Every key is optional and defaults to the RunConfig defaults. Unknown keys,
/// wrong types and invalid values throw ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// The defaults as a JSON document accepted by parse_config.
std::string default_config_json();

}  // namespace biotline
