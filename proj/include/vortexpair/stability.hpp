#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vortexpair/evolution.hpp"
#include "vortexpair/field.hpp"
#include "vortexpair/greens.hpp"

namespace vortexpair {

enum class OrbitMetric { l2, y };

struct OrbitDistance {
  double distance = 0.0;
  int shift = 0;  // columns by which zeta_star was moved
};

// Distance from omega to the x1-orbit of zeta_star: the minimum over every
// integer column shift that keeps zeta_star's support inside the window. Ties
// go to the shift of smallest magnitude, then the negative one.
OrbitDistance dist_to_orbit(const ScalarField& omega, const ScalarField& zeta_star, OrbitMetric metric);

enum class PerturbationKind {
  rearranged_noise,      // zeta_star's values reshuffled along a noisy stream function
  additive_nonnegative,  // zeta_star plus a nonnegative bump at the support edge
  smooth_bump,           // zeta_star times (1 + eps s) with a smooth |s| <= 1
};

std::string to_string(PerturbationKind k);
PerturbationKind perturbation_kind_from_string(const std::string& s);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::rearranged_noise;
  double magnitude = 0.0;    // target dist_Y(omega(0), zeta_star)
  double area_budget = 0.0;  // bound on the support area of omega(0)
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// omega(0) with dist_Y to zeta_star within 10% of spec.magnitude, support area at
// most spec.area_budget and omega(0) >= 0 (>= zeta_star for the additive kind).
// Magnitude 0 returns zeta_star. Throws ValidationError when the construction
// cannot reach the magnitude.
ScalarField perturb(const ScalarField& zeta_star, double lambda, const PerturbationSpec& spec,
                    GreenMethod method = GreenMethod::automatic);

struct StabilityRow {
  double t = 0.0;
  double dist2 = 0.0;   // orbit distance in L2
  double dist_y = 0.0;  // orbit distance in the L2 + |impulse| metric
  int best_shift = 0;
  ConservationAudit audit;
};

struct StabilityReport {
  std::vector<StabilityRow> series;  // starts at t = 0
  double initial_dist2 = 0.0;
  double initial_dist_y = 0.0;
  double peak_dist2 = 0.0;
  double peak_dist_y = 0.0;
};

// Throws WindowExhaustion unless the window leaves lambda*T of travel plus the
// edge margin downstream of zeta_star's support.
void check_stability_window(const ScalarField& zeta_star, double lambda, double T, int margin = 3);

// Evolves omega0 to time T and tracks its distance to the orbit of zeta_star at
// every audit time.
StabilityReport track_orbit(const ScalarField& omega0, const ScalarField& zeta_star, double lambda,
                            const EvolutionConfig& evo, GreenMethod method = GreenMethod::automatic);

StabilityReport run_stability(const ScalarField& zeta_star, double lambda, const PerturbationSpec& spec,
                              const EvolutionConfig& evo, GreenMethod method = GreenMethod::automatic);

// CSV columns t,dist2,dist_y,best_shift followed by the audit columns.
void write_stability_csv(std::ostream& out, const StabilityReport& report);
void write_stability_csv(const std::string& path, const StabilityReport& report);

}  // namespace vortexpair
