#include "vortexpair/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "vortexpair/errors.hpp"
#include "vortexpair/random.hpp"
#include "vortexpair/rearrange.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

OrbitDistance dist_to_orbit(const ScalarField& omega, const ScalarField& zeta_star, OrbitMetric metric) {
  throw_if_mismatched(omega, zeta_star, "dist_to_orbit");
  const GridSpec& g = omega.grid();
  const double impulse_gap = metric == OrbitMetric::y ? std::abs(impulse(omega) - impulse(zeta_star)) : 0.0;
  const SupportBox box = support_box(zeta_star);
  if (box.empty()) return {lp_norm(omega, 2.0) + impulse_gap, 0};

  // Squared distance for every admissible shift from the expansion
  // |w|^2 + |z|^2 - 2 <w, z_s>, with the correlation taken over zeta_star's support.
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < zeta_star.size(); ++k) {
    if (zeta_star[k] != 0.0) support.push_back(k);
  }
  double ww = 0.0;
  double zz = 0.0;
  {
    CompensatedSum a;
    CompensatedSum b;
    for (double v : omega.values()) a.add(v * v);
    for (std::size_t k : support) b.add(zeta_star[k] * zeta_star[k]);
    ww = a.value();
    zz = b.value();
  }
  const int lo = -box.i_min;
  const int hi = g.nx() - 1 - box.i_max;
  std::vector<double> approx(static_cast<std::size_t>(hi - lo + 1));
  for (int s = lo; s <= hi; ++s) {
    CompensatedSum c;
    for (std::size_t k : support) c.add(zeta_star[k] * omega[k + static_cast<std::size_t>(s)]);
    approx[static_cast<std::size_t>(s - lo)] = std::max(0.0, ww + zz - 2.0 * c.value());
  }
  const double best = *std::min_element(approx.begin(), approx.end());
  const double slack = 1e-9 * (ww + zz);

  // Near-minimal shifts are re-measured directly so exact orbit points give 0.
  OrbitDistance out{std::numeric_limits<double>::infinity(), 0};
  for (int s = lo; s <= hi; ++s) {
    if (approx[static_cast<std::size_t>(s - lo)] > best + slack) continue;
    const double d = dist2(omega, shift_x1(zeta_star, s)) + impulse_gap;
    const bool better = d < out.distance ||
                        (d == out.distance && (std::abs(s) < std::abs(out.shift) ||
                                               (std::abs(s) == std::abs(out.shift) && s < out.shift)));
    if (better) out = {d, s};
  }
  return out;
}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::rearranged_noise:
      return "rearranged-noise";
    case PerturbationKind::additive_nonnegative:
      return "additive-nonnegative";
    case PerturbationKind::smooth_bump:
      return "smooth-bump";
  }
  return "rearranged-noise";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  if (s == "rearranged-noise") return PerturbationKind::rearranged_noise;
  if (s == "additive-nonnegative") return PerturbationKind::additive_nonnegative;
  if (s == "smooth-bump") return PerturbationKind::smooth_bump;
  throw ValidationError("perturbation kind: expected rearranged-noise, additive-nonnegative or smooth-bump, got '" +
                        s + "'");
}

void PerturbationSpec::validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw ValidationError("magnitude must be >= 0");
  if (!(area_budget > 0.0)) throw ValidationError("area_budget must be > 0");
}

namespace {

// Sum of a few plane waves with random directions and phases, wavelengths
// comparable to the support size; values in [-1, 1].
ScalarField smooth_noise(const GridSpec& g, double length, Rng& rng) {
  constexpr int modes = 6;
  double k1[modes];
  double k2[modes];
  double phase[modes];
  for (int m = 0; m < modes; ++m) {
    const double kk = rng.uniform(1.0, 3.0) / length;
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    k1[m] = kk * std::cos(angle);
    k2[m] = kk * std::sin(angle);
    phase[m] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  std::vector<double> v(g.size());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (int m = 0; m < modes; ++m) s += std::cos(k1[m] * g.x1(i) + k2[m] * g.x2(j) + phase[m]);
      v[g.index(i, j)] = s / modes;
    }
  }
  return ScalarField(g, std::move(v));
}

double support_area(const ScalarField& f) {
  return static_cast<double>(support_cells(f)) * f.grid().cell_area();
}

double support_length(const ScalarField& zeta) {
  return std::max(std::sqrt(support_area(zeta) / std::numbers::pi), 2.0 * zeta.grid().h());
}

ScalarField perturb_rearranged(const ScalarField& zeta_star, double lambda, const PerturbationSpec& spec,
                               GreenMethod method, Rng& rng) {
  const GridSpec& g = zeta_star.grid();
  const RearrangementProfile profile = decreasing_rearrangement(zeta_star);
  const ScalarField psi = total_stream(GreenOperator(g, method).apply(zeta_star), lambda);
  double range = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (zeta_star[k] > 0.0) range = std::max(range, std::abs(psi[k]));
  }
  const ScalarField noise = smooth_noise(g, support_length(zeta_star), rng);
  const double target = spec.magnitude;

  auto build = [&](double eps) {
    return rearrange_along(profile, linear_combination(1.0, psi, eps * range, noise));
  };
  auto accept = [&](const ScalarField& w, double d) {
    return std::abs(d - target) <= 0.1 * target && support_area(w) <= spec.area_budget;
  };

  double lo = 0.0;
  double hi = 1e-3;
  for (;;) {
    const ScalarField w = build(hi);
    const double d = dist_y(w, zeta_star);
    if (accept(w, d)) return w;
    if (d >= target) break;
    hi *= 2.0;
    if (hi > 1e6) throw ValidationError("magnitude: rearranged-noise cannot reach the requested distance");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const ScalarField w = build(mid);
    const double d = dist_y(w, zeta_star);
    if (accept(w, d)) return w;
    (d < target ? lo : hi) = mid;
  }
  throw ValidationError("magnitude: rearranged-noise cannot land within 10% of the requested distance on this grid");
}

ScalarField perturb_additive(const ScalarField& zeta_star, const PerturbationSpec& spec, Rng& rng) {
  const GridSpec& g = zeta_star.grid();
  // Support cells with an empty 4-neighbour are edge cells; pick one as the bump centre.
  std::vector<std::size_t> edge;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (zeta_star.at(i, j) == 0.0) continue;
      const bool open = i == 0 || i == g.nx() - 1 || j == g.ny() - 1 || (j > 0 && zeta_star.at(i, j - 1) == 0.0) ||
                        zeta_star.at(i - 1, j) == 0.0 || zeta_star.at(i + 1, j) == 0.0 ||
                        zeta_star.at(i, j + 1) == 0.0;
      if (open) edge.push_back(g.index(i, j));
    }
  }
  if (edge.empty()) throw ValidationError("magnitude: additive perturbation needs a nonzero zeta_star");
  const std::size_t c = edge[static_cast<std::size_t>(rng.bits() % edge.size())];
  const Point centre = g.center(g.column_of(c), g.row_of(c));
  const double rho = std::max(0.25 * support_length(zeta_star), 2.0 * g.h());
  std::vector<double> b(g.size(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double r2 = (std::pow(g.x1(i) - centre.x1, 2) + std::pow(g.x2(j) - centre.x2, 2)) / (rho * rho);
      if (r2 < 1.0) b[g.index(i, j)] = (1.0 - r2) * (1.0 - r2);
    }
  }
  const ScalarField bump(g, std::move(b));
  const double unit = lp_norm(bump, 2.0) + impulse(bump);
  const ScalarField w = linear_combination(1.0, zeta_star, spec.magnitude / unit, bump);
  if (support_area(w) > spec.area_budget) {
    throw ValidationError("area_budget: additive perturbation needs support area " + format_real(support_area(w)));
  }
  return w;
}

ScalarField perturb_smooth(const ScalarField& zeta_star, const PerturbationSpec& spec, Rng& rng) {
  const GridSpec& g = zeta_star.grid();
  const ScalarField s = smooth_noise(g, support_length(zeta_star), rng);
  std::vector<double> zs(g.size());
  for (std::size_t k = 0; k < zs.size(); ++k) zs[k] = zeta_star[k] * s[k];
  const ScalarField direction(g, std::move(zs));
  const double unit = lp_norm(direction, 2.0) + std::abs(impulse(direction));
  if (!(unit > 0.0)) throw ValidationError("magnitude: smooth perturbation needs a nonzero zeta_star");
  const double eps = spec.magnitude / unit;
  if (eps >= 1.0) throw ValidationError("magnitude: smooth perturbation would make omega negative");
  return linear_combination(1.0, zeta_star, eps, direction);
}

}  // namespace

ScalarField perturb(const ScalarField& zeta_star, double lambda, const PerturbationSpec& spec, GreenMethod method) {
  spec.validate();
  if (!zeta_star.is_nonnegative()) throw ValidationError("perturb: zeta_star must be nonnegative");
  if (!(spec.area_budget > support_area(zeta_star))) {
    throw ValidationError("area_budget must exceed the support area of zeta_star (" +
                          format_real(support_area(zeta_star)) + ")");
  }
  if (spec.magnitude == 0.0) return zeta_star;
  Rng rng(spec.rng_seed);
  switch (spec.kind) {
    case PerturbationKind::rearranged_noise:
      return perturb_rearranged(zeta_star, lambda, spec, method, rng);
    case PerturbationKind::additive_nonnegative:
      return perturb_additive(zeta_star, spec, rng);
    case PerturbationKind::smooth_bump:
      return perturb_smooth(zeta_star, spec, rng);
  }
  return zeta_star;
}

void check_stability_window(const ScalarField& zeta_star, double lambda, double T, int margin) {
  const GridSpec& g = zeta_star.grid();
  const SupportBox box = support_box(zeta_star);
  if (box.empty()) return;
  const double room = g.x1_max() - (g.x1_min() + (box.i_max + 1) * g.h());
  const double need = lambda * T + margin * g.h();
  if (room < need) {
    throw WindowExhaustion("window: " + format_real(room) + " downstream of the support, " + format_real(need) +
                           " needed for lambda*T of travel plus the edge margin");
  }
}

StabilityReport track_orbit(const ScalarField& omega0, const ScalarField& zeta_star, double lambda,
                            const EvolutionConfig& evo, GreenMethod method) {
  evo.validate();
  throw_if_mismatched(omega0, zeta_star, "track_orbit");
  check_stability_window(zeta_star, lambda, evo.T);
  check_stability_window(omega0, lambda, evo.T);

  StabilityReport report;
  auto record = [&](const EvolutionState& s, const ConservationAudit& a) {
    const OrbitDistance d2 = dist_to_orbit(s.zeta, zeta_star, OrbitMetric::l2);
    const OrbitDistance dy = dist_to_orbit(s.zeta, zeta_star, OrbitMetric::y);
    report.series.push_back({s.t, d2.distance, dy.distance, d2.shift, a});
  };

  const Evolver evolver(omega0.grid(), lambda, evo.cfl, method);
  const EvolutionState start = evolver.initial_state(omega0, evo.p);
  record(start, evolver.audit(start));
  evolver.evolve(start, evo.T, evo.dt, evo.audit_every,
                 [&](const EvolutionState& s) { record(s, evolver.audit(s)); });

  report.initial_dist2 = report.series.front().dist2;
  report.initial_dist_y = report.series.front().dist_y;
  for (const StabilityRow& r : report.series) {
    report.peak_dist2 = std::max(report.peak_dist2, r.dist2);
    report.peak_dist_y = std::max(report.peak_dist_y, r.dist_y);
  }
  return report;
}

StabilityReport run_stability(const ScalarField& zeta_star, double lambda, const PerturbationSpec& spec,
                              const EvolutionConfig& evo, GreenMethod method) {
  evo.validate();
  check_stability_window(zeta_star, lambda, evo.T);
  return track_orbit(perturb(zeta_star, lambda, spec, method), zeta_star, lambda, evo, method);
}

void write_stability_csv(std::ostream& out, const StabilityReport& report) {
  out << "t,dist2,dist_y,best_shift,E_drift,I_drift,l1_drift,l2_drift,lp_drift,rearr_drift,clipped_mass\n";
  for (const StabilityRow& r : report.series) {
    const ConservationAudit& a = r.audit;
    out << format_real(r.t) << ',' << format_real(r.dist2) << ',' << format_real(r.dist_y) << ',' << r.best_shift
        << ',' << format_real(a.e_drift) << ',' << format_real(a.i_drift) << ',' << format_real(a.l1_drift) << ','
        << format_real(a.l2_drift) << ',' << format_real(a.lp_drift) << ',' << format_real(a.rearr_drift) << ','
        << format_real(a.clipped_mass) << '\n';
  }
}

void write_stability_csv(const std::string& path, const StabilityReport& report) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write stability report " + path);
  write_stability_csv(out, report);
}

}  // namespace vortexpair
