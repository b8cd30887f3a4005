#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "vortexpair/config.hpp"

namespace vortexpair {

inline constexpr const char* kVersion = "1.0.0";

// Process exit status for a failure: 2 validation, 3 window exhaustion, 4 numeric
// failure, 1 anything else.
int exit_code_for(const std::exception& e);

// Each workflow writes its artifacts into out_dir (created if needed) together
// with metadata.json, and logs progress lines to `log`.
//
//   solve      zeta_star.csv psi_star.csv profile.csv trace.csv
//   evolve     zeta_initial.csv zeta_final.csv audit.csv
//   stability  zeta_star.csv trace.csv omega_initial.csv stability.csv
//   sweep      sweep.csv
void run_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
void run_evolve(const RunConfig& cfg, const std::string& state_path, const std::string& out_dir, std::ostream& log);
void run_stability_workflow(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
void run_sweep(const RunConfig& cfg, const std::vector<double>& lambdas, const std::string& out_dir, std::ostream& log);

// Parses "0.01,0.02,..." into a list; throws ValidationError naming the bad entry.
std::vector<double> parse_lambda_list(const std::string& text);

// ./runs/<UTC timestamp>
std::string default_output_dir();

}  // namespace vortexpair
