// Command-line front end: solve, evolve, stability, sweep and validate.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <string>

#include "vortexpair/config.hpp"
#include "vortexpair/errors.hpp"
#include "vortexpair/run.hpp"

namespace {

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vortexpair::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady vortex pairs in the half-plane: variational solver, time evolution and stability runs"};
  app.set_version_flag("--version", vortexpair::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string state;
  std::string lambdas;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default ./runs/<timestamp>)");
  };

  CLI::App* solve = app.add_subcommand("solve", "maximize E - lambda I over the rearrangement class");
  add_common(solve);
  CLI::App* evolve = app.add_subcommand("evolve", "evolve a vorticity field dump and audit conserved quantities");
  add_common(evolve);
  evolve->add_option("--state", state, "field CSV to evolve")->required()->check(CLI::ExistingFile);
  CLI::App* stability = app.add_subcommand("stability", "solve, perturb, evolve and track the orbit distance");
  add_common(stability);
  CLI::App* sweep = app.add_subcommand("sweep", "solve for a list of lambda values");
  add_common(sweep);
  sweep->add_option("--lambdas", lambdas, "comma-separated ascending lambda values")->required();
  CLI::App* validate = app.add_subcommand("validate", "list every problem in a configuration");
  validate->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (validate->parsed()) {
    return guarded([&] {
      const auto problems = vortexpair::validate_config_file(config);
      for (const std::string& p : problems) std::cout << p << '\n';
      if (!problems.empty()) throw vortexpair::ValidationError(std::to_string(problems.size()) + " problem(s) found");
    });
  }

  return guarded([&] {
    const vortexpair::RunConfig cfg = vortexpair::load_config(config);
    const std::string dir = !out.empty() ? out : !cfg.output.empty() ? cfg.output : vortexpair::default_output_dir();
    if (solve->parsed()) {
      vortexpair::run_solve(cfg, dir, std::cerr);
    } else if (evolve->parsed()) {
      vortexpair::run_evolve(cfg, state, dir, std::cerr);
    } else if (stability->parsed()) {
      vortexpair::run_stability_workflow(cfg, dir, std::cerr);
    } else if (sweep->parsed()) {
      vortexpair::run_sweep(cfg, vortexpair::parse_lambda_list(lambdas), dir, std::cerr);
    }
    std::cout << dir << '\n';
  });
}
