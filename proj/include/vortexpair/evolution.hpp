#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vortexpair/field.hpp"
#include "vortexpair/greens.hpp"
#include "vortexpair/rearrange.hpp"

namespace vortexpair {

struct EvolutionConfig {
  double dt = 0.1;
  double T = 1.0;
  double cfl = 8.0;  // semi-Lagrangian steps may cross several cells
  double p = 4.0;    // L^p index audited alongside L^1 and L^2; must exceed 2
  int audit_every = 1;

  void validate() const;
};

struct EvolutionState {
  ScalarField zeta;
  double t = 0.0;
  double lambda = 0.0;
  double p = 4.0;
  NormReport reference_norms;
  double reference_energy = 0.0;
  RearrangementProfile reference_profile;
  double clipped_mass = 0.0;  // cumulative mass added by clipping negative samples
};

struct ConservationAudit {
  double t = 0.0;
  double e_drift = 0.0;  // |E(t) - E(0)| / E(0), and likewise below
  double i_drift = 0.0;
  double l1_drift = 0.0;
  double l2_drift = 0.0;
  double lp_drift = 0.0;
  double rearr_drift = 0.0;  // distribution-function distance to the t = 0 profile, relative to ||zeta(0)||_1
  double clipped_mass = 0.0;
};

struct StepOutcome {
  EvolutionState state;
  double unclipped_mass = 0.0;  // signed integral of the interpolated field before clipping
  double clipped = 0.0;         // mass restored by clipping in this step
};

struct EvolveResult {
  EvolutionState final_state;
  std::vector<ConservationAudit> series;
};

// Time integration of d_t zeta + div(zeta u) = 0, u = lambda e1 + perp-grad G zeta,
// by a semi-Lagrangian scheme: the velocity of the current field is frozen for
// the step, characteristics are traced back from each cell centre with the
// two-stage midpoint rule, and zeta is sampled at the foot point by bilinear
// interpolation. Below the wall zeta is continued as an odd function of x2 and
// u as the matching even/odd pair; outside the side and top edges zeta is zero.
class Evolver {
 public:
  using VelocityOverride = std::function<Velocity(const ScalarField& zeta)>;

  Evolver(const GridSpec& grid, double lambda, double cfl, GreenMethod method = GreenMethod::automatic);

  // Replaces the induced velocity, for transport tests with a prescribed flow.
  void override_velocity(VelocityOverride v) { override_ = std::move(v); }

  // Fraction of max zeta tolerated in the 3-cell band along the side and top edges
  // before a step reports WindowExhaustion.
  void set_edge_tolerance(double tol) { edge_tolerance_ = tol; }

  const GridSpec& grid() const { return op_.grid(); }
  double lambda() const { return lambda_; }

  EvolutionState initial_state(const ScalarField& zeta, double p) const;

  Velocity velocity(const ScalarField& zeta) const;
  double max_speed(const Velocity& u) const;

  // Throws NumericFailure on a CFL violation (dt > cfl h / max|u|) and
  // WindowExhaustion when vorticity reaches the edge band.
  StepOutcome step_detailed(const EvolutionState& state, double dt) const;
  EvolutionState step(const EvolutionState& state, double dt) const { return step_detailed(state, dt).state; }

  ConservationAudit audit(const EvolutionState& state) const;

  // Steps to time state.t + T (the last step is shortened to land on it) and audits
  // every `audit_every` steps and at the end. T = 0 returns the state unchanged and
  // an empty series.
  EvolveResult evolve(const EvolutionState& state, double T, double dt, int audit_every,
                      const std::function<void(const EvolutionState&)>& on_audit = {}) const;

 private:
  GreenOperator op_;
  double lambda_;
  double cfl_;
  double edge_tolerance_ = 1e-9;
  VelocityOverride override_;
};

// Sample of zeta at an arbitrary point with the odd wall continuation and zero
// exterior. Exact for constant fields inside the window.
double interpolate_vorticity(const ScalarField& zeta, Point x);

// CSV columns t,E_drift,I_drift,l1_drift,l2_drift,lp_drift,rearr_drift,clipped_mass.
void write_audit_csv(std::ostream& out, const std::vector<ConservationAudit>& series);
void write_audit_csv(const std::string& path, const std::vector<ConservationAudit>& series);

}  // namespace vortexpair
