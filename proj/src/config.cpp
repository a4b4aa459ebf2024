#include "biotline/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace biotline {

namespace {

using nlohmann::json;

const json& section(const json& root, const std::string& name, const std::set<std::string>& allowed) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError("'" + name + "' must be an object");
  for (const auto& [key, value] : s.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + name + "." + key + "'");
  }
  return s;
}

void read_number(const json& s, const std::string& where, const char* key, double& out) {
  if (!s.contains(key)) return;
  if (!s.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  out = s.at(key).get<double>();
}

void read_int(const json& s, const std::string& where, const char* key, int& out) {
  if (!s.contains(key)) return;
  if (!s.at(key).is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
  out = s.at(key).get<int>();
}

void read_vec3(const json& s, const std::string& where, const char* key, Vec3& out) {
  if (!s.contains(key)) return;
  const json& v = s.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError("'" + where + "." + key + "' must be an array of 3 numbers");
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError("'" + where + "." + key + "' must be an array of 3 numbers");
    out[i] = v[i].get<double>();
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  const std::set<std::string> sections = {"material", "solver", "segment", "mesh", "output"};
  for (const auto& [key, value] : root.items()) {
    if (!sections.count(key)) throw ConfigError("unknown key '" + key + "'");
  }

  RunConfig cfg;
  const json& m = section(root, "material",
                          {"kappa", "biot_modulus", "alpha", "youngs_modulus", "poisson_ratio", "rho_f", "gravity"});
  read_number(m, "material", "kappa", cfg.params.kappa);
  read_number(m, "material", "biot_modulus", cfg.params.biot_modulus);
  read_number(m, "material", "alpha", cfg.params.alpha);
  read_number(m, "material", "youngs_modulus", cfg.params.youngs_modulus);
  read_number(m, "material", "poisson_ratio", cfg.params.poisson_ratio);
  read_number(m, "material", "rho_f", cfg.params.rho_f);
  read_vec3(m, "material", "gravity", cfg.params.gravity);

  const json& s = section(root, "solver",
                          {"tau", "final_time", "eps_a", "eps_r", "max_iters", "load_degree", "singularity_removal"});
  read_number(s, "solver", "tau", cfg.solver.tau);
  read_number(s, "solver", "final_time", cfg.solver.final_time);
  read_number(s, "solver", "eps_a", cfg.solver.eps_a);
  read_number(s, "solver", "eps_r", cfg.solver.eps_r);
  read_int(s, "solver", "max_iters", cfg.solver.max_iters);
  read_int(s, "solver", "load_degree", cfg.solver.load_degree);
  if (s.contains("singularity_removal")) {
    if (!s.at("singularity_removal").is_boolean()) throw ConfigError("'solver.singularity_removal' must be a boolean");
    cfg.solver.singularity_removal = s.at("singularity_removal").get<bool>();
  }

  const json& seg = section(root, "segment", {"a", "b"});
  read_vec3(seg, "segment", "a", cfg.mcase.a);
  read_vec3(seg, "segment", "b", cfg.mcase.b);

  const json& mesh = section(root, "mesh", {"n"});
  read_int(mesh, "mesh", "n", cfg.mesh_n);

  const json& out = section(root, "output", {"vtk"});
  if (out.contains("vtk")) {
    if (!out.at("vtk").is_string()) throw ConfigError("'output.vtk' must be a string");
    cfg.vtk_output = out.at("vtk").get<std::string>();
  }

  try {
    cfg.params.validate();
    cfg.solver.validate();
    LineSegment(cfg.mcase.a, cfg.mcase.b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.mesh_n < 1 || cfg.mesh_n > kMaxSubdivisions) {
    throw ConfigError("'mesh.n' must lie in [1, " + std::to_string(kMaxSubdivisions) + "]");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string default_config_json() {
  const RunConfig d;
  const json j = {
      {"material",
       {{"kappa", d.params.kappa},
        {"biot_modulus", d.params.biot_modulus},
        {"alpha", d.params.alpha},
        {"youngs_modulus", d.params.youngs_modulus},
        {"poisson_ratio", d.params.poisson_ratio},
        {"rho_f", d.params.rho_f},
        {"gravity", {d.params.gravity[0], d.params.gravity[1], d.params.gravity[2]}}}},
      {"solver",
       {{"tau", d.solver.tau},
        {"final_time", d.solver.final_time},
        {"eps_a", d.solver.eps_a},
        {"eps_r", d.solver.eps_r},
        {"max_iters", d.solver.max_iters},
        {"load_degree", d.solver.load_degree},
        {"singularity_removal", d.solver.singularity_removal}}},
      {"segment", {{"a", {d.mcase.a[0], d.mcase.a[1], d.mcase.a[2]}}, {"b", {d.mcase.b[0], d.mcase.b[1], d.mcase.b[2]}}}},
      {"mesh", {{"n", d.mesh_n}}},
      {"output", {{"vtk", d.vtk_output}}}};
  return j.dump(2);
}

}  // namespace biotline
