#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "vortexpair/config.hpp"
#include "vortexpair/errors.hpp"

using namespace vortexpair;
using nlohmann::json;

namespace {

json reference() {
  return json::parse(R"({
    "grid": {"x1_min": -6.8, "x1_max": 6.8, "x2_max": 13.6, "nx": 64, "ny": 64},
    "profile": {"kind": "patch", "value": 1.0, "area": 0.7853981633974483},
    "solver": {"lambda": 0.05},
    "rng_seed": 1
  })");
}

bool mentions(const std::vector<std::string>& errors, const std::string& text) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("the shipped configs are valid") {
  for (const char* name : {"reference_patch.json", "bump_pair.json", "bump_pair_fine.json"}) {
    CAPTURE(name);
    const std::string path = std::string(VORTEXPAIR_CONFIG_DIR) + "/" + name;
    CHECK(validate_config_file(path).empty());
    CHECK_NOTHROW(load_config(path));
  }
}

TEST_CASE("defaults and parsed values") {
  const RunConfig c = parse_config(reference(), ".");
  CHECK(c.grid.nx() == 64);
  CHECK(c.grid.h() == doctest::Approx(0.2125));
  CHECK(c.solver.lambda == 0.05);
  CHECK(c.solver.max_iters == MaximizerConfig{}.max_iters);
  CHECK(c.evolution.dt == EvolutionConfig{}.dt);
  CHECK(c.build_profile().total_cells() == 17);
  CHECK(c.rng_seed == 1u);

  json d = reference();
  d["grid"] = {{"x1_min", -1.0}, {"h", 0.25}, {"nx", 8}, {"ny", 60}};
  d["profile"] = {{"kind", "bump"}, {"amplitude", 2.0}, {"radius", 0.5}};
  d["solver"]["lambda"] = 1.0;
  const RunConfig b = parse_config(d, ".");
  CHECK(b.grid.h() == 0.25);
  CHECK(b.build_profile().max_value() < 2.0);
}

TEST_CASE("every violation is reported, naming its field") {
  json d = reference();
  d["solver"]["lambda"] = -1.0;
  d["solver"]["max_iters"] = 0;
  d["solver"]["frobnicate"] = true;
  d["evolution"] = {{"p", 2.0}, {"dt", 0.0}};
  d["stability"] = {{"kind", "gaussian"}};
  d["extra"] = 1;
  const std::vector<std::string> errors = validate_config(d, ".");
  CHECK(mentions(errors, "solver.lambda must be > 0"));
  CHECK(mentions(errors, "solver.max_iters must be >= 1"));
  CHECK(mentions(errors, "solver.frobnicate is not a recognised field"));
  CHECK(mentions(errors, "evolution.p must be > 2"));
  CHECK(mentions(errors, "evolution.dt must be > 0"));
  CHECK(mentions(errors, "stability.kind"));
  CHECK(mentions(errors, "extra is not a recognised block"));
  CHECK(errors.size() == 7);
  CHECK_THROWS_AS(parse_config(d, "."), ValidationError);

  json g = reference();
  g["grid"]["ny"] = 63;
  CHECK_FALSE(validate_config(g, ".").empty());
  json missing = reference();
  missing.erase("profile");
  CHECK(mentions(validate_config(missing, "."), "profile block is required"));
  json typed = reference();
  typed["grid"]["nx"] = "64";
  CHECK(mentions(validate_config(typed, "."), "grid.nx expected an integer"));
  CHECK(mentions(validate_config(json::array(), "."), "config must be a JSON object"));
}

TEST_CASE("a window below the support height bound is a validation error") {
  json d = reference();
  d["solver"]["lambda"] = 0.01;
  const std::vector<std::string> errors = validate_config(d, ".");
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].rfind("support_height_z:", 0) == 0);
}

TEST_CASE("stability settings") {
  json d = reference();
  d["stability"] = {{"kind", "smooth-bump"}, {"magnitude", 0.01}, {"relative_magnitude", 0.1}};
  CHECK(mentions(validate_config(d, "."), "relative_magnitude conflicts with magnitude"));
  d["stability"] = {{"kind", "additive-nonnegative"}, {"area_budget", 0.1}};
  CHECK(mentions(validate_config(d, "."), "stability.area_budget must exceed the profile area"));

  d["stability"] = {{"kind", "additive-nonnegative"}, {"relative_magnitude", 0.5}};
  const RunConfig c = parse_config(d, ".");
  const GridSpec& g = c.grid;
  std::vector<double> v(g.size(), 0.0);
  v[g.index(3, 3)] = 2.0;
  const PerturbationSpec s = c.perturbation(ScalarField(g, v));
  CHECK(s.kind == PerturbationKind::additive_nonnegative);
  CHECK(s.magnitude == doctest::Approx(0.5 * 2.0 * g.h()));
  CHECK(s.area_budget == doctest::Approx(2.0 * 17 * g.cell_area()));
  CHECK(s.rng_seed == 1u);
}

TEST_CASE("ladder profiles resolve against the config directory") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "vortexpair_config_test";
  std::filesystem::create_directories(dir);
  json d = reference();
  d["profile"] = {{"kind", "ladder"}, {"path", "ladder.csv"}};
  CHECK(mentions(validate_config(d, dir.string()), "profile.path does not exist"));

  const double h = 0.2125;
  {
    std::ofstream out(dir / "ladder.csv");
    write_profile_csv(out, RearrangementProfile({{2.0, 4}, {1.0, 8}}, h));
  }
  const RunConfig c = parse_config(d, dir.string());
  CHECK(c.build_profile().total_cells() == 12);
  {
    std::ofstream out(dir / "ladder.csv");
    write_profile_csv(out, RearrangementProfile({{2.0, 4}}, 0.3));
  }
  CHECK(mentions(validate_config(d, dir.string()), "differs from grid h"));
  std::filesystem::remove_all(dir);
}
