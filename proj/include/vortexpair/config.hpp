#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortexpair/evolution.hpp"
#include "vortexpair/field.hpp"
#include "vortexpair/maximizer.hpp"
#include "vortexpair/rearrange.hpp"
#include "vortexpair/stability.hpp"

namespace vortexpair {

// JSON run configuration:
//
//   {
//     "grid":      {"x1_min", "x1_max", "x2_max", "nx", "ny"}  or  {"x1_min", "h", "nx", "ny"},
//     "profile":   {"kind": "patch", "value", "area"}
//                | {"kind": "bump", "amplitude", "radius"}
//                | {"kind": "ladder", "path"},          path relative to the config file
//     "solver":    {"lambda", "max_iters", "tol_objective", "tol_field", "steiner_every",
//                   "recenter", "curtail", "vertical_search", "swap_limit", "seed_placement",
//                   "seed_field", "seed_height", "seed_x1", "edge_margin", "green"},
//     "evolution": {"dt", "T", "cfl", "p", "audit_every"},
//     "stability": {"kind", "magnitude" | "relative_magnitude", "area_budget"},
//     "output":    "dir",
//     "rng_seed":  1
//   }
//
// Only "grid" and "profile" are required; every other field has the default of
// the corresponding module struct.
struct ProfileConfig {
  std::string kind = "patch";
  double value = 1.0;
  double area = 0.0;
  double amplitude = 1.0;
  double radius = 0.0;
  std::string path;  // resolved against the config file's directory
};

struct StabilityConfig {
  PerturbationKind kind = PerturbationKind::rearranged_noise;
  std::optional<double> magnitude;           // absolute dist_Y target
  double relative_magnitude = 0.01;          // fraction of ||zeta_star||_2, used when magnitude is unset
  std::optional<double> area_budget;         // default: twice the profile area
};

struct RunConfig {
  GridSpec grid;
  ProfileConfig profile;
  MaximizerConfig solver;
  std::string seed_field_path;
  EvolutionConfig evolution;
  StabilityConfig stability;
  std::string output;
  std::uint64_t rng_seed = 1;
  nlohmann::json source;  // the document as read
  std::string base_dir;

  RearrangementProfile build_profile() const;
  PerturbationSpec perturbation(const ScalarField& zeta_star) const;
};

// Every violated invariant of the document, one message each, naming the
// offending field. Also checks the window height against support_height_z of
// the seed the solver would start from.
std::vector<std::string> validate_config(const nlohmann::json& doc, const std::string& base_dir);
std::vector<std::string> validate_config_file(const std::string& path);

// Throws ValidationError listing all violations.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);
RunConfig load_config(const std::string& path);

}  // namespace vortexpair
