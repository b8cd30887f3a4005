#include "vortexpair/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "vortexpair/errors.hpp"

namespace vortexpair {

using nlohmann::json;

namespace {

// Reads one JSON object, recording every problem instead of stopping at the first.
class Block {
 public:
  Block(const json* obj, std::string name, std::vector<std::string>& errors)
      : obj_(obj), name_(std::move(name)), errors_(errors) {}

  bool present() const { return obj_ != nullptr; }
  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_->at(key);
    if (!v.is_number()) {
      fail(key, "expected a number");
      return fallback;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_->at(key);
    if (!v.is_number_integer()) {
      fail(key, "expected an integer");
      return fallback;
    }
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_->at(key);
    if (!v.is_boolean()) {
      fail(key, "expected true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = obj_->at(key);
    if (!v.is_string()) {
      fail(key, "expected a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  void require(const std::string& key) {
    if (!has(key)) fail(key, "is required");
  }

  void fail(const std::string& key, const std::string& why) { errors_.push_back(name_ + "." + key + " " + why); }

  void check(bool ok, const std::string& key, const std::string& why) {
    if (!ok) fail(key, why);
  }

  // Unknown keys are reported so typos do not silently fall back to defaults.
  void finish() {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!seen_.count(it.key())) errors_.push_back(name_ + "." + it.key() + " is not a recognised field");
    }
  }

 private:
  const json* obj_;
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

const json* member(const json& doc, const char* key, std::vector<std::string>& errors, bool required) {
  if (!doc.contains(key)) {
    if (required) errors.push_back(std::string(key) + " block is required");
    return nullptr;
  }
  if (!doc.at(key).is_object()) {
    errors.push_back(std::string(key) + " must be a JSON object");
    return nullptr;
  }
  return &doc.at(key);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p.string() : (std::filesystem::path(base_dir) / p).string();
}

GreenMethod green_from_string(const std::string& s, Block& b) {
  if (s == "automatic") return GreenMethod::automatic;
  if (s == "direct") return GreenMethod::direct;
  if (s == "fft") return GreenMethod::fft;
  b.fail("green", "must be automatic, direct or fft");
  return GreenMethod::automatic;
}

// Fills cfg as far as possible; returns all problems found.
std::vector<std::string> collect(const json& doc, const std::string& base_dir, RunConfig& cfg) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"config must be a JSON object"};
  cfg.source = doc;
  cfg.base_dir = base_dir;

  static const std::set<std::string> top_keys = {"grid",   "profile", "solver",  "evolution",
                                                 "stability", "output", "rng_seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!top_keys.count(it.key())) errors.push_back(it.key() + " is not a recognised block");
  }

  bool grid_ok = false;
  {
    Block b(member(doc, "grid", errors, true), "grid", errors);
    if (b.present()) {
      const double x1_min = b.number("x1_min", 0.0);
      const long long nx = b.integer("nx", 0);
      const long long ny = b.integer("ny", 0);
      b.require("x1_min");
      b.require("nx");
      b.require("ny");
      b.check(nx >= 1, "nx", "must be >= 1");
      b.check(ny >= 1, "ny", "must be >= 1");
      const std::size_t before = errors.size();
      try {
        if (b.has("h")) {
          const double h = b.number("h", 0.0);
          b.check(h > 0.0, "h", "must be > 0");
          if (errors.size() == before) cfg.grid = GridSpec::from_spacing(x1_min, h, static_cast<int>(nx), static_cast<int>(ny));
        } else {
          const double x1_max = b.number("x1_max", 0.0);
          const double x2_max = b.number("x2_max", 0.0);
          b.require("x1_max");
          b.require("x2_max");
          b.check(x1_max > x1_min, "x1_max", "must exceed x1_min");
          b.check(x2_max > 0.0, "x2_max", "must be > 0");
          if (errors.size() == before) {
            cfg.grid = GridSpec::from_window(x1_min, x1_max, x2_max, static_cast<int>(nx), static_cast<int>(ny));
          }
        }
      } catch (const Error& e) {
        errors.push_back(std::string("grid: ") + e.what());
      }
      grid_ok = errors.size() == before;
      b.finish();
    }
  }

  bool profile_ok = false;
  {
    Block b(member(doc, "profile", errors, true), "profile", errors);
    if (b.present()) {
      const std::size_t before = errors.size();
      ProfileConfig& p = cfg.profile;
      p.kind = b.text("kind", "patch");
      if (p.kind == "patch") {
        p.value = b.number("value", 1.0);
        p.area = b.number("area", 0.0);
        b.require("area");
        b.check(p.value > 0.0, "value", "must be > 0");
        b.check(p.area > 0.0, "area", "must be > 0");
      } else if (p.kind == "bump") {
        p.amplitude = b.number("amplitude", 1.0);
        p.radius = b.number("radius", 0.0);
        b.require("radius");
        b.check(p.amplitude > 0.0, "amplitude", "must be > 0");
        b.check(p.radius > 0.0, "radius", "must be > 0");
      } else if (p.kind == "ladder") {
        p.path = resolve(base_dir, b.text("path", ""));
        b.require("path");
        b.check(p.path.empty() || std::filesystem::exists(p.path), "path", "does not exist: " + p.path);
      } else {
        b.fail("kind", "must be patch, bump or ladder");
      }
      profile_ok = errors.size() == before;
      b.finish();
    }
  }

  bool solver_ok = false;
  {
    Block b(member(doc, "solver", errors, false), "solver", errors);
    const std::size_t before = errors.size();
    MaximizerConfig& s = cfg.solver;
    s.lambda = b.number("lambda", s.lambda);
    s.max_iters = static_cast<int>(b.integer("max_iters", s.max_iters));
    s.tol_objective = b.number("tol_objective", s.tol_objective);
    s.tol_field = b.number("tol_field", s.tol_field);
    s.steiner_every = static_cast<int>(b.integer("steiner_every", s.steiner_every));
    s.recenter = b.boolean("recenter", s.recenter);
    s.curtail = b.boolean("curtail", s.curtail);
    s.vertical_search = b.boolean("vertical_search", s.vertical_search);
    s.swap_limit = static_cast<int>(b.integer("swap_limit", s.swap_limit));
    s.seed_height = b.number("seed_height", s.seed_height);
    s.seed_x1 = b.number("seed_x1", s.seed_x1);
    s.edge_margin = static_cast<int>(b.integer("edge_margin", s.edge_margin));
    s.green = green_from_string(b.text("green", "automatic"), b);
    try {
      s.seed_placement = seed_placement_from_string(b.text("seed_placement", "disk"));
    } catch (const Error& e) {
      b.fail("seed_placement", "must be disk, strip or given-field");
    }
    cfg.seed_field_path = resolve(base_dir, b.text("seed_field", ""));
    b.check(s.lambda > 0.0, "lambda", "must be > 0");
    b.check(s.max_iters >= 1, "max_iters", "must be >= 1");
    b.check(s.tol_objective > 0.0, "tol_objective", "must be > 0");
    b.check(s.tol_field > 0.0, "tol_field", "must be > 0");
    b.check(s.steiner_every >= 0, "steiner_every", "must be >= 0");
    b.check(s.seed_height >= 0.0, "seed_height", "must be >= 0");
    b.check(s.edge_margin >= 0, "edge_margin", "must be >= 0");
    b.check(s.swap_limit >= 0, "swap_limit", "must be >= 0");
    if (s.seed_placement == SeedPlacement::given_field) {
      if (cfg.seed_field_path.empty()) {
        b.fail("seed_field", "is required for seed_placement given-field");
      } else if (!std::filesystem::exists(cfg.seed_field_path)) {
        b.fail("seed_field", "does not exist: " + cfg.seed_field_path);
      } else {
        try {
          s.seed_field = read_field_csv(cfg.seed_field_path);
          if (grid_ok && !s.seed_field->grid().matches(cfg.grid)) b.fail("seed_field", "grid differs from the grid block");
        } catch (const Error& e) {
          b.fail("seed_field", std::string("unreadable: ") + e.what());
        }
      }
    }
    solver_ok = errors.size() == before;
    b.finish();
  }

  {
    Block b(member(doc, "evolution", errors, false), "evolution", errors);
    EvolutionConfig& e = cfg.evolution;
    e.dt = b.number("dt", e.dt);
    e.T = b.number("T", e.T);
    e.cfl = b.number("cfl", e.cfl);
    e.p = b.number("p", e.p);
    e.audit_every = static_cast<int>(b.integer("audit_every", e.audit_every));
    b.check(e.dt > 0.0, "dt", "must be > 0");
    b.check(e.T >= 0.0, "T", "must be >= 0");
    b.check(e.cfl > 0.0, "cfl", "must be > 0");
    b.check(e.p > 2.0, "p", "must be > 2");
    b.check(e.audit_every >= 1, "audit_every", "must be >= 1");
    b.finish();
  }

  {
    Block b(member(doc, "stability", errors, false), "stability", errors);
    StabilityConfig& s = cfg.stability;
    try {
      s.kind = perturbation_kind_from_string(b.text("kind", "rearranged-noise"));
    } catch (const Error&) {
      b.fail("kind", "must be rearranged-noise, additive-nonnegative or smooth-bump");
    }
    if (b.has("magnitude")) {
      s.magnitude = b.number("magnitude", 0.0);
      b.check(*s.magnitude >= 0.0, "magnitude", "must be >= 0");
      b.check(!b.has("relative_magnitude"), "relative_magnitude", "conflicts with magnitude");
    }
    s.relative_magnitude = b.number("relative_magnitude", s.relative_magnitude);
    b.check(s.relative_magnitude >= 0.0, "relative_magnitude", "must be >= 0");
    if (b.has("area_budget")) {
      s.area_budget = b.number("area_budget", 0.0);
      b.check(*s.area_budget > 0.0, "area_budget", "must be > 0");
    }
    b.finish();
  }

  if (doc.contains("output")) {
    if (doc.at("output").is_string()) {
      cfg.output = doc.at("output").get<std::string>();
    } else {
      errors.push_back("output must be a string");
    }
  }
  if (doc.contains("rng_seed")) {
    if (doc.at("rng_seed").is_number_unsigned()) {
      cfg.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    } else {
      errors.push_back("rng_seed must be a nonnegative integer");
    }
  }

  // Checks that need a consistent grid and profile.
  if (grid_ok && profile_ok) {
    try {
      const RearrangementProfile profile = cfg.build_profile();
      if (profile.empty()) errors.push_back("profile: rounds to zero cells on this grid");
      if (static_cast<std::size_t>(profile.total_cells()) > cfg.grid.size()) {
        errors.push_back("profile: needs more cells than the grid has");
      }
      if (cfg.stability.area_budget && !(*cfg.stability.area_budget > profile.total_area())) {
        errors.push_back("stability.area_budget must exceed the profile area " + format_real(profile.total_area()));
      }
      if (solver_ok && !profile.empty()) {
        const ScalarField seed = seed_field(profile, cfg.grid, cfg.solver);
        const double z = support_height_z(norms(seed), cfg.solver.lambda);
        if (cfg.grid.x2_max() < z) {
          errors.push_back("support_height_z: window top x2_max = " + format_real(cfg.grid.x2_max()) +
                           " is below Z = " + format_real(z) + " for the seed at lambda = " +
                           format_real(cfg.solver.lambda));
        }
      }
    } catch (const Error& e) {
      errors.push_back(std::string("profile: ") + e.what());
    }
  }
  return errors;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
}

std::string directory_of(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

}  // namespace

RearrangementProfile RunConfig::build_profile() const {
  const double h = grid.h();
  if (profile.kind == "patch") return patch_profile(profile.value, profile.area, h);
  if (profile.kind == "bump") return bump_profile(profile.amplitude, profile.radius, h);
  if (profile.kind == "ladder") {
    RearrangementProfile p = read_profile_csv(profile.path);
    if (std::abs(p.h() - h) > 1e-12 * h) {
      throw ValidationError("ladder h = " + format_real(p.h()) + " differs from grid h = " + format_real(h));
    }
    return p;
  }
  throw ValidationError("profile.kind must be patch, bump or ladder");
}

PerturbationSpec RunConfig::perturbation(const ScalarField& zeta_star) const {
  PerturbationSpec spec;
  spec.kind = stability.kind;
  spec.magnitude = stability.magnitude ? *stability.magnitude : stability.relative_magnitude * lp_norm(zeta_star, 2.0);
  spec.area_budget = stability.area_budget ? *stability.area_budget : 2.0 * build_profile().total_area();
  spec.rng_seed = rng_seed;
  return spec;
}

std::vector<std::string> validate_config(const json& doc, const std::string& base_dir) {
  RunConfig cfg;
  return collect(doc, base_dir, cfg);
}

std::vector<std::string> validate_config_file(const std::string& path) {
  return validate_config(read_json(path), directory_of(path));
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  RunConfig cfg;
  const std::vector<std::string> errors = collect(doc, base_dir, cfg);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_json(path), directory_of(path)); }

}  // namespace vortexpair
