#include "vortexpair/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "vortexpair/errors.hpp"
#include "vortexpair/parallel.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("evolution dt must be > 0");
  if (!(T >= 0.0)) throw ValidationError("evolution T must be >= 0");
  if (!(cfl > 0.0)) throw ValidationError("evolution cfl must be > 0");
  if (!(p > 2.0)) throw ValidationError("evolution p must be > 2");
  if (audit_every < 1) throw ValidationError("evolution audit_every must be >= 1");
}

namespace {

struct Stencil {
  int i0;
  int j0;
  double a;  // weight toward i0 + 1
  double b;  // weight toward j0 + 1
};

Stencil locate(const GridSpec& g, Point x) {
  const double fi = (x.x1 - g.x1_min()) / g.h() - 0.5;
  const double fj = x.x2 / g.h() - 0.5;
  const double i0 = std::floor(fi);
  const double j0 = std::floor(fj);
  return {static_cast<int>(i0), static_cast<int>(j0), fi - i0, fj - j0};
}

double lerp2(double v00, double v10, double v01, double v11, double a, double b) {
  const double lo = v00 + a * (v10 - v00);
  const double hi = v01 + a * (v11 - v01);
  return lo + b * (hi - lo);
}

// Bilinear sample of a cell-centred field. `wall_sign` continues row -1 as
// wall_sign * row 0; points outside the side/top edges read zero when
// `zero_exterior`, else the nearest edge value.
double sample(const ScalarField& f, Point x, double wall_sign, bool zero_exterior) {
  const GridSpec& g = f.grid();
  const Stencil s = locate(g, x);
  auto value = [&](int i, int j) {
    if (zero_exterior && (i < 0 || i >= g.nx() || j >= g.ny())) return 0.0;
    i = std::clamp(i, 0, g.nx() - 1);
    if (j >= g.ny()) j = g.ny() - 1;
    if (j < 0) return wall_sign * f.at(i, -1 - j);
    return f.at(i, j);
  };
  return lerp2(value(s.i0, s.j0), value(s.i0 + 1, s.j0), value(s.i0, s.j0 + 1), value(s.i0 + 1, s.j0 + 1), s.a, s.b);
}

double relative_change(double now, double ref) {
  const double d = std::abs(now - ref);
  return ref != 0.0 ? d / std::abs(ref) : d;
}

}  // namespace

double interpolate_vorticity(const ScalarField& zeta, Point x) {
  if (x.x2 < 0.0) return -sample(zeta, {x.x1, -x.x2}, -1.0, true);
  return sample(zeta, x, -1.0, true);
}

Evolver::Evolver(const GridSpec& grid, double lambda, double cfl, GreenMethod method)
    : op_(grid, method), lambda_(lambda), cfl_(cfl) {
  if (!(lambda >= 0.0)) throw ValidationError("evolution: lambda must be >= 0");
  if (!(cfl > 0.0)) throw ValidationError("evolution: cfl must be > 0");
}

EvolutionState Evolver::initial_state(const ScalarField& zeta, double p) const {
  if (!zeta.grid().matches(grid())) throw ValidationError("evolution: initial field grid mismatch");
  if (!zeta.is_nonnegative()) throw ValidationError("evolution: initial vorticity must be nonnegative");
  if (!(p > 2.0)) throw ValidationError("evolution: p must be > 2");
  EvolutionState s;
  s.zeta = zeta;
  s.lambda = lambda_;
  s.p = p;
  s.reference_norms = norms(zeta, p);
  s.reference_energy = energy_with_stream(zeta, op_.apply(zeta));
  s.reference_profile = decreasing_rearrangement(zeta);
  return s;
}

Velocity Evolver::velocity(const ScalarField& zeta) const {
  if (override_) return override_(zeta);
  return velocity_from_stream(op_.apply(zeta), lambda_);
}

double Evolver::max_speed(const Velocity& u) const {
  double m = 0.0;
  for (std::size_t k = 0; k < u.u1.size(); ++k) m = std::max(m, std::hypot(u.u1[k], u.u2[k]));
  return m;
}

StepOutcome Evolver::step_detailed(const EvolutionState& state, double dt) const {
  const GridSpec& g = grid();
  if (!(dt > 0.0)) throw ValidationError("step: dt must be > 0");
  if (!state.zeta.grid().matches(g)) throw ValidationError("step: state grid mismatch");

  // Window guard: the zero exterior is only exact while the edge band is empty.
  {
    const double top = lp_norm(state.zeta, std::numeric_limits<double>::infinity());
    double edge = 0.0;
    constexpr int band = 3;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        if (i < band || i >= g.nx() - band || j >= g.ny() - band) edge = std::max(edge, std::abs(state.zeta.at(i, j)));
      }
    }
    if (top > 0.0 && edge > edge_tolerance_ * top) {
      throw WindowExhaustion("step: vorticity reached the window edge at t = " + format_real(state.t));
    }
  }

  const Velocity u = velocity(state.zeta);
  const double speed = max_speed(u);
  if (speed > 0.0 && dt > cfl_ * g.h() / speed * (1.0 + 1e-12)) {
    throw NumericFailure("step: CFL violation, dt = " + format_real(dt) + " exceeds cfl*h/max|u| = " +
                         format_real(cfl_ * g.h() / speed));
  }

  auto velocity_at = [&](Point x) -> Point {
    if (x.x2 < 0.0) {
      const Point m{x.x1, -x.x2};
      return {sample(u.u1, m, 1.0, false), -sample(u.u2, m, -1.0, false)};
    }
    return {sample(u.u1, x, 1.0, false), sample(u.u2, x, -1.0, false)};
  };

  std::vector<double> next(g.size());
  parallel_for(static_cast<std::size_t>(g.ny()), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      const Point x = g.center(i, j);
      const Point mid{x.x1 - 0.5 * dt * u.u1[k], x.x2 - 0.5 * dt * u.u2[k]};
      const Point um = velocity_at(mid);
      const Point foot{x.x1 - dt * um.x1, x.x2 - dt * um.x2};
      next[k] = interpolate_vorticity(state.zeta, foot);
    }
  });

  StepOutcome out;
  out.unclipped_mass = ordered_sum(next) * g.cell_area();
  CompensatedSum clipped;
  for (double& v : next) {
    if (!std::isfinite(v)) throw NumericFailure("step: non-finite vorticity");
    if (v < 0.0) {
      clipped.add(-v);
      v = 0.0;
    }
  }
  out.clipped = clipped.value() * g.cell_area();
  out.state = state;
  out.state.zeta = ScalarField(g, std::move(next));
  out.state.t = state.t + dt;
  out.state.clipped_mass = state.clipped_mass + out.clipped;
  return out;
}

ConservationAudit Evolver::audit(const EvolutionState& state) const {
  const NormReport& ref = state.reference_norms;
  const NormReport now = norms(state.zeta, state.p);
  ConservationAudit a;
  a.t = state.t;
  a.e_drift = relative_change(energy_with_stream(state.zeta, op_.apply(state.zeta)), state.reference_energy);
  a.i_drift = relative_change(now.impulse, ref.impulse);
  a.l1_drift = relative_change(now.l1, ref.l1);
  a.l2_drift = relative_change(now.l2, ref.l2);
  a.lp_drift = relative_change(now.lp, ref.lp);
  a.rearr_drift = state.reference_profile.empty() && now.l1 == 0.0
                      ? 0.0
                      : is_rearrangement(state.zeta, state.reference_profile, 0.0).relative_drift;
  a.clipped_mass = state.clipped_mass;
  return a;
}

EvolveResult Evolver::evolve(const EvolutionState& state, double T, double dt, int audit_every,
                             const std::function<void(const EvolutionState&)>& on_audit) const {
  if (!(T >= 0.0)) throw ValidationError("evolve: T must be >= 0");
  if (!(dt > 0.0)) throw ValidationError("evolve: dt must be > 0");
  if (audit_every < 1) throw ValidationError("evolve: audit_every must be >= 1");
  EvolveResult r{state, {}};
  if (T == 0.0) return r;
  const double t0 = state.t;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double target = k == steps ? t0 + T : t0 + static_cast<double>(k) * dt;
    r.final_state = step(r.final_state, target - r.final_state.t);
    r.final_state.t = target;
    if (k % audit_every == 0 || k == steps) {
      r.series.push_back(audit(r.final_state));
      if (on_audit) on_audit(r.final_state);
    }
  }
  return r;
}

void write_audit_csv(std::ostream& out, const std::vector<ConservationAudit>& series) {
  out << "t,E_drift,I_drift,l1_drift,l2_drift,lp_drift,rearr_drift,clipped_mass\n";
  for (const ConservationAudit& a : series) {
    out << format_real(a.t) << ',' << format_real(a.e_drift) << ',' << format_real(a.i_drift) << ','
        << format_real(a.l1_drift) << ',' << format_real(a.l2_drift) << ',' << format_real(a.lp_drift) << ','
        << format_real(a.rearr_drift) << ',' << format_real(a.clipped_mass) << '\n';
  }
}

void write_audit_csv(const std::string& path, const std::vector<ConservationAudit>& series) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write audit series " + path);
  write_audit_csv(out, series);
}

}  // namespace vortexpair
