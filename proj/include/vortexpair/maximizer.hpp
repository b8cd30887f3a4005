#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vortexpair/field.hpp"
#include "vortexpair/greens.hpp"
#include "vortexpair/rearrange.hpp"

namespace vortexpair {

enum class SeedPlacement { disk, strip, given_field };

std::string to_string(SeedPlacement s);
SeedPlacement seed_placement_from_string(const std::string& s);

struct MaximizerConfig {
  double lambda = 0.05;
  int max_iters = 500;
  double tol_objective = 1e-10;  // relative change of E - lambda I between iterates
  double tol_field = 1e-10;      // ||zeta_{k+1} - zeta_k||_2 / ||zeta_k||_2
  int steiner_every = 0;         // 0 disables Steiner symmetrization
  bool recenter = true;
  bool curtail = true;
  bool vertical_search = true;  // try whole-row translates of each iterate
  int swap_limit = 1024;        // exact cell exchanges at fixed points, for supports up to this many cells
  SeedPlacement seed_placement = SeedPlacement::disk;
  std::optional<ScalarField> seed_field;  // used by SeedPlacement::given_field
  double seed_height = 0.0;               // centre height of disk/strip seeds; 0 selects the default
  double seed_x1 = 0.0;
  int edge_margin = 3;  // support must stay this many cells away from the side and top edges
  GreenMethod green = GreenMethod::automatic;
  std::function<void(int iter, const ScalarField& zeta)> on_iterate;  // called with the seed and every iterate

  // Throws ValidationError naming the first bad field.
  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double delta_l2 = 0.0;
  double support_area = 0.0;
  double best_ball_mass_r1 = 0.0;
};

struct MaximizerResult {
  ScalarField zeta_star;
  ScalarField psi_star;  // G zeta_star - lambda x2
  double lambda = 0.0;
  double s_lambda = 0.0;
  std::vector<TraceRow> trace;
  bool converged = false;
  bool full_rearrangement = false;
  double comonotonicity_residual = 0.0;
  double z_height = 0.0;  // support_height_z of the seed
  int iterations = 0;
};

// Default centre height of disk and strip seeds: the larger of the equivalent
// radius a and the height Gamma/(4 pi lambda) at which a point vortex and its
// image drift at speed lambda, clamped to keep the seed inside the window.
double default_seed_height(const RearrangementProfile& profile, const GridSpec& grid, double lambda, int margin);

ScalarField seed_field(const RearrangementProfile& profile, const GridSpec& grid, const MaximizerConfig& cfg);

// One linearise-and-rearrange step: psi = G zeta - lambda x2, then the profile is
// placed in descending psi order on {psi > 0}. The output maximizes sum zeta psi
// over R_+(profile), so E - lambda I does not decrease. Throws WindowExhaustion
// if the result reaches within `margin` cells of a side or top edge.
ScalarField ascend_once(const ScalarField& zeta, const RearrangementProfile& profile, double lambda,
                        const GreenOperator& op, int margin = 3);
ScalarField ascend_once(const ScalarField& zeta, const RearrangementProfile& profile, double lambda);

// Integer-cell x1 shift putting the mass centroid within h/2 of x1 = 0.
ScalarField recenter_x1(const ScalarField& zeta);

MaximizerResult maximize(const RearrangementProfile& profile, const GridSpec& grid, const MaximizerConfig& cfg);

// Sum over support pairs with zeta(a) > zeta(b) of max(0, psi(b) - psi(a)) (zeta(a) - zeta(b)) h^4,
// divided by ||zeta||_2^2 h^2. Zero iff zeta is nondecreasing in psi on its support.
double comonotonicity_residual(const ScalarField& zeta, const ScalarField& psi);

struct SweepRow {
  double lambda = 0.0;
  double s_lambda = 0.0;
  bool full_rearrangement = false;
  bool converged = false;
  int iterations = 0;
  double support_top = 0.0;  // highest x2 reached by the support (cell top edge)
  double z_height = 0.0;
};

std::vector<SweepRow> lambda_sweep(const RearrangementProfile& profile, const GridSpec& grid,
                                   const std::vector<double>& lambdas, const MaximizerConfig& cfg);

// For each radius R, the largest mass sum zeta h^2 over cells whose centres lie in
// a disc of radius R centred at some cell centre.
std::vector<double> concentration_diagnostics(const ScalarField& zeta, const std::vector<double>& radii);

}  // namespace vortexpair
