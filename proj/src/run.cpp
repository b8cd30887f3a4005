#include "vortexpair/run.hpp"

#include <fftw3.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vortexpair/errors.hpp"
#include "vortexpair/parallel.hpp"
#include "vortexpair/random.hpp"

namespace vortexpair {

using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const WindowExhaustion*>(&e)) return 3;
  if (dynamic_cast<const NumericFailure*>(&e)) return 4;
  return 1;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string prepare(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ValidationError("--out: cannot create " + out_dir + ": " + ec.message());
  return out_dir;
}

std::string path_in(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

json metadata(const char* subcommand, const RunConfig& cfg, Clock::time_point started) {
  const SupBoundConstants c = sup_bound_constants();
  json m;
  m["subcommand"] = subcommand;
  m["config"] = cfg.source;
  m["config_base_dir"] = cfg.base_dir;
  m["rng"] = {{"generator", Rng::kName}, {"seed", cfg.rng_seed}};
  m["threads"] = thread_budget();
  m["sup_bound_constants"] = {{"c_log", c.c_log},
                              {"c_imp", c.c_imp},
                              {"c_l2", c.c_l2},
                              {"bound", "sup|G zeta| <= (c_log ||zeta||_1 + c_imp I(|zeta|) + c_l2 ||zeta||_2) / (4 pi)"}};
  m["versions"] = {{"vortexpair", kVersion}, {"fftw", std::string(fftw_version)}, {"compiler", std::string(__VERSION__)}};
  m["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - started).count();
  return m;
}

void write_metadata(const std::string& dir, const json& m) {
  std::ofstream out = open_out(path_in(dir, "metadata.json"));
  out << m.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out = open_out(path);
  out << "iter,objective,delta_l2,support_area,best_ball_mass_R1\n";
  for (const TraceRow& r : trace) {
    out << r.iter << ',' << format_real(r.objective) << ',' << format_real(r.delta_l2) << ','
        << format_real(r.support_area) << ',' << format_real(r.best_ball_mass_r1) << '\n';
  }
}

json summary(const MaximizerResult& r) {
  return {{"lambda", r.lambda},
          {"s_lambda", r.s_lambda},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"full_rearrangement", r.full_rearrangement},
          {"comonotonicity_residual", r.comonotonicity_residual},
          {"degenerate", r.s_lambda <= 0.0}};
}

MaximizerResult solve_into(const RunConfig& cfg, const std::string& dir, std::ostream& log) {
  const RearrangementProfile profile = cfg.build_profile();
  log << "solve: " << profile.total_cells() << " profile cells on a " << cfg.grid.nx() << " x " << cfg.grid.ny()
      << " grid, lambda = " << format_real(cfg.solver.lambda) << '\n';
  MaximizerResult r = maximize(profile, cfg.grid, cfg.solver);
  log << "solve: " << r.iterations << " iterations, S_lambda = " << format_real(r.s_lambda)
      << (r.converged ? ", converged" : ", NOT converged") << '\n';
  if (r.s_lambda <= 0.0) {
    log << "WARNING: the maximized objective is " << format_real(r.s_lambda)
        << " <= 0; zero is then a maximizer and the vortex pair is degenerate\n";
  }
  write_field_csv(path_in(dir, "zeta_star.csv"), r.zeta_star);
  write_trace_csv(path_in(dir, "trace.csv"), r.trace);
  return r;
}

}  // namespace

void run_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const auto started = Clock::now();
  const std::string dir = prepare(out_dir);
  const MaximizerResult r = solve_into(cfg, dir, log);
  write_field_csv(path_in(dir, "psi_star.csv"), r.psi_star);
  write_profile_csv(path_in(dir, "profile.csv"), cfg.build_profile());
  json m = metadata("solve", cfg, started);
  m["Z"] = r.z_height;
  m["result"] = summary(r);
  write_metadata(dir, m);
}

void run_evolve(const RunConfig& cfg, const std::string& state_path, const std::string& out_dir, std::ostream& log) {
  const auto started = Clock::now();
  const ScalarField zeta0 = read_field_csv(state_path);
  if (!zeta0.grid().matches(cfg.grid)) throw ValidationError("--state: field grid differs from the config grid");
  const std::string dir = prepare(out_dir);
  const EvolutionConfig& e = cfg.evolution;
  e.validate();
  const Evolver evolver(cfg.grid, cfg.solver.lambda, e.cfl, cfg.solver.green);
  const EvolutionState start = evolver.initial_state(zeta0, e.p);
  log << "evolve: T = " << format_real(e.T) << ", dt = " << format_real(e.dt) << '\n';
  const EvolveResult r = evolver.evolve(start, e.T, e.dt, e.audit_every);
  write_field_csv(path_in(dir, "zeta_initial.csv"), zeta0);
  write_field_csv(path_in(dir, "zeta_final.csv"), r.final_state.zeta);
  write_audit_csv(path_in(dir, "audit.csv"), r.series);
  json m = metadata("evolve", cfg, started);
  m["state"] = state_path;
  m["Z"] = support_height_z(norms(zeta0), cfg.solver.lambda);
  m["final_time"] = r.final_state.t;
  m["clipped_mass"] = r.final_state.clipped_mass;
  write_metadata(dir, m);
}

void run_stability_workflow(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const auto started = Clock::now();
  const EvolutionConfig& e = cfg.evolution;
  e.validate();
  const std::string dir = prepare(out_dir);
  // The window guard runs on the seed before any compute, then on the maximizer.
  check_stability_window(seed_field(cfg.build_profile(), cfg.grid, cfg.solver), cfg.solver.lambda, e.T);
  const MaximizerResult r = solve_into(cfg, dir, log);
  check_stability_window(r.zeta_star, cfg.solver.lambda, e.T);
  const PerturbationSpec spec = cfg.perturbation(r.zeta_star);
  const ScalarField omega0 = perturb(r.zeta_star, cfg.solver.lambda, spec, cfg.solver.green);
  log << "stability: " << to_string(spec.kind) << " perturbation, dist_Y = " << format_real(dist_y(omega0, r.zeta_star))
      << " (target " << format_real(spec.magnitude) << ")\n";
  const StabilityReport rep = track_orbit(omega0, r.zeta_star, cfg.solver.lambda, e, cfg.solver.green);
  log << "stability: peak orbit dist2 = " << format_real(rep.peak_dist2) << " (initial "
      << format_real(rep.initial_dist2) << "), peak orbit dist_Y = " << format_real(rep.peak_dist_y) << " (initial "
      << format_real(rep.initial_dist_y) << ")\n";
  write_field_csv(path_in(dir, "omega_initial.csv"), omega0);
  write_stability_csv(path_in(dir, "stability.csv"), rep);
  json m = metadata("stability", cfg, started);
  m["Z"] = r.z_height;
  m["result"] = summary(r);
  m["perturbation"] = {{"kind", to_string(spec.kind)},
                       {"magnitude", spec.magnitude},
                       {"area_budget", spec.area_budget},
                       {"rng_seed", spec.rng_seed}};
  m["orbit_distance"] = {{"initial_dist2", rep.initial_dist2},
                         {"initial_dist_y", rep.initial_dist_y},
                         {"peak_dist2", rep.peak_dist2},
                         {"peak_dist_y", rep.peak_dist_y}};
  write_metadata(dir, m);
}

void run_sweep(const RunConfig& cfg, const std::vector<double>& lambdas, const std::string& out_dir,
               std::ostream& log) {
  const auto started = Clock::now();
  const std::string dir = prepare(out_dir);
  const std::vector<SweepRow> rows = lambda_sweep(cfg.build_profile(), cfg.grid, lambdas, cfg.solver);
  std::ofstream out = open_out(path_in(dir, "sweep.csv"));
  out << "lambda,s_lambda,full_rearrangement,converged,iterations,support_top,Z\n";
  for (const SweepRow& r : rows) {
    out << format_real(r.lambda) << ',' << format_real(r.s_lambda) << ',' << (r.full_rearrangement ? 1 : 0) << ','
        << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << format_real(r.support_top) << ','
        << format_real(r.z_height) << '\n';
    log << "sweep: lambda = " << format_real(r.lambda) << ", S_lambda = " << format_real(r.s_lambda)
        << (r.full_rearrangement ? "" : ", support curtailed") << '\n';
  }
  json m = metadata("sweep", cfg, started);
  m["lambdas"] = lambdas;
  write_metadata(dir, m);
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("--lambdas: '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("--lambdas: empty list");
  return out;
}

std::string default_output_dir() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
  return (std::filesystem::path("runs") / buf).string();
}

}  // namespace vortexpair
