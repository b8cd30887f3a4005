#include "vortexpair/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "vortexpair/errors.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

std::string to_string(SeedPlacement s) {
  switch (s) {
    case SeedPlacement::disk:
      return "disk";
    case SeedPlacement::strip:
      return "strip";
    case SeedPlacement::given_field:
      return "given-field";
  }
  return "disk";
}

SeedPlacement seed_placement_from_string(const std::string& s) {
  if (s == "disk") return SeedPlacement::disk;
  if (s == "strip") return SeedPlacement::strip;
  if (s == "given-field") return SeedPlacement::given_field;
  throw ValidationError("seed_placement: expected disk, strip or given-field, got '" + s + "'");
}

void MaximizerConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be > 0");
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(tol_objective > 0.0)) throw ValidationError("tol_objective must be > 0");
  if (!(tol_field > 0.0)) throw ValidationError("tol_field must be > 0");
  if (steiner_every < 0) throw ValidationError("steiner_every must be >= 0");
  if (edge_margin < 0) throw ValidationError("edge_margin must be >= 0");
  if (swap_limit < 0) throw ValidationError("swap_limit must be >= 0");
  if (seed_height < 0.0) throw ValidationError("seed_height must be >= 0");
  if (seed_placement == SeedPlacement::given_field && !seed_field) {
    throw ValidationError("seed_placement given-field needs a seed field");
  }
}

double default_seed_height(const RearrangementProfile& profile, const GridSpec& grid, double lambda, int margin) {
  const double a = profile.equivalent_radius();
  const double balance = profile.l1() / (4.0 * std::numbers::pi * lambda);
  const double top = grid.x2_max() - a - (margin + 1) * grid.h();
  return std::max(a, std::min(balance, top));
}

ScalarField seed_field(const RearrangementProfile& profile, const GridSpec& grid, const MaximizerConfig& cfg) {
  if (cfg.seed_placement == SeedPlacement::given_field) {
    const ScalarField& given = *cfg.seed_field;
    if (!given.grid().matches(grid)) throw ValidationError("seed field: grid mismatch");
    if (!is_restricted_rearrangement(given, profile)) {
      throw ValidationError("seed field is not a restricted rearrangement of the profile");
    }
    return given;
  }
  const double c2 = cfg.seed_height > 0.0 ? cfg.seed_height
                                          : default_seed_height(profile, grid, cfg.lambda, cfg.edge_margin);
  const double c1 = cfg.seed_x1;
  std::vector<double> rank(grid.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double d1 = grid.x1(i) - c1;
      const double d2 = grid.x2(j) - c2;
      rank[grid.index(i, j)] = cfg.seed_placement == SeedPlacement::disk
                                   ? -(d1 * d1 + d2 * d2)
                                   : -std::max(std::abs(d1) / 4.0, std::abs(d2));
    }
  }
  return rearrange_along(profile, ScalarField(grid, std::move(rank)));
}

namespace {

std::vector<char> positive_mask(const ScalarField& psi) {
  std::vector<char> mask(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) mask[k] = psi[k] > 0.0 ? 1 : 0;
  return mask;
}

void check_window(const ScalarField& zeta, int margin, const char* where) {
  if (support_near_window_edge(zeta, margin)) {
    throw WindowExhaustion(std::string(where) + ": support within " + std::to_string(margin) +
                           " cells of a window edge; enlarge the window");
  }
}

bool same_values(const ScalarField& a, const ScalarField& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

// Whole-row shift away from (rows > 0) or toward the wall; empty when a nonzero
// cell would cross the wall or come within `margin` rows of the top.
std::optional<ScalarField> shift_rows(const ScalarField& f, int rows, int margin) {
  const GridSpec& g = f.grid();
  const SupportBox box = support_box(f);
  if (box.empty() || box.j_min + rows < 0 || box.j_max + rows > g.ny() - 1 - margin) return std::nullopt;
  std::vector<double> v(g.size(), 0.0);
  for (int j = box.j_min; j <= box.j_max; ++j) {
    for (int i = 0; i < g.nx(); ++i) v[g.index(i, j + rows)] = f.at(i, j);
  }
  return ScalarField(g, std::move(v));
}

struct Exchange {
  std::vector<std::pair<std::size_t, std::size_t>> swaps;  // cell pairs whose values trade places
  double gain = 0.0;
};

// Double exchanges are searched only while the candidate pair list is short.
constexpr std::size_t kMaxPairsForDouble = 6000;

// Best exchange of cell values by the exact change of E - lambda I. For one swap
// of a and b, with d = zeta(a) - zeta(b) > 0,
//   gain = d h^2 [psi(b) - psi(a) + (d h^2 / 2)(K_aa + K_bb - 2 K_ab)],
// and two disjoint swaps add the cross term
//   d1 d2 h^4 (K_b1b2 - K_b1a2 - K_a1b2 + K_a1a2).
// a ranges over the support, b over cells within two cells of it.
Exchange best_exchange(const ScalarField& zeta, const ScalarField& psi) {
  const GridSpec& g = zeta.grid();
  const SupportBox box = support_box(zeta);
  Exchange best;
  if (box.empty()) return best;
  std::vector<std::size_t> cells;  // support and its two-cell neighbourhood
  for (int j = std::max(0, box.j_min - 2); j <= std::min(g.ny() - 1, box.j_max + 2); ++j) {
    for (int i = std::max(0, box.i_min - 2); i <= std::min(g.nx() - 1, box.i_max + 2); ++i) {
      bool close = false;
      for (int dj = -2; dj <= 2 && !close; ++dj) {
        for (int di = -2; di <= 2 && !close; ++di) {
          const int ii = i + di;
          const int jj = j + dj;
          close = ii >= 0 && ii < g.nx() && jj >= 0 && jj < g.ny() && zeta.at(ii, jj) > 0.0;
        }
      }
      if (close) cells.push_back(g.index(i, j));
    }
  }
  const double w = g.cell_area();
  auto k = [&](std::size_t p, std::size_t q) {
    if (p == q) return diagonal_kernel(g, g.row_of(p));
    return kernel(g.center(g.column_of(p), g.row_of(p)), g.center(g.column_of(q), g.row_of(q)));
  };

  struct Pair {
    std::size_t a;  // local indices into cells
    std::size_t b;
    double d;
    double gain;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const std::size_t ca = cells[a];
    if (!(zeta[ca] > 0.0)) continue;
    const double kaa = k(ca, ca);
    for (std::size_t b = 0; b < cells.size(); ++b) {
      const std::size_t cb = cells[b];
      const double d = zeta[ca] - zeta[cb];
      if (!(d > 0.0)) continue;
      const double curvature = kaa + k(cb, cb) - 2.0 * k(ca, cb);
      const double gain = d * w * (psi[cb] - psi[ca] + 0.5 * d * w * curvature);
      pairs.push_back({a, b, d, gain});
      if (gain > best.gain) best = {{{ca, cb}}, gain};
    }
  }
  if (best.gain > 0.0 || pairs.size() > kMaxPairsForDouble) return best;

  const std::size_t n = cells.size();
  std::vector<double> km(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p; q < n; ++q) km[p * n + q] = km[q * n + p] = k(cells[p], cells[q]);
  }
  for (std::size_t x = 0; x < pairs.size(); ++x) {
    const Pair& p = pairs[x];
    for (std::size_t y = x + 1; y < pairs.size(); ++y) {
      const Pair& q = pairs[y];
      if (p.a == q.a || p.a == q.b || p.b == q.a || p.b == q.b) continue;
      const double cross = km[p.b * n + q.b] - km[p.b * n + q.a] - km[p.a * n + q.b] + km[p.a * n + q.a];
      const double gain = p.gain + q.gain + p.d * q.d * w * w * cross;
      if (gain > best.gain) best = {{{cells[p.a], cells[p.b]}, {cells[q.a], cells[q.b]}}, gain};
    }
  }
  return best;
}

ScalarField apply_exchange(const ScalarField& zeta, const Exchange& e) {
  std::vector<double> v = zeta.copy_values();
  for (const auto& [a, b] : e.swaps) std::swap(v[a], v[b]);
  return ScalarField(zeta.grid(), std::move(v));
}

}  // namespace

ScalarField ascend_once(const ScalarField& zeta, const RearrangementProfile& profile, double lambda,
                        const GreenOperator& op, int margin) {
  const ScalarField psi = total_stream(op.apply(zeta), lambda);
  const std::vector<char> mask = positive_mask(psi);
  ScalarField out = rearrange_along(profile, psi, &mask, Placement::partial);
  check_window(out, margin, "ascend_once");
  return out;
}

ScalarField ascend_once(const ScalarField& zeta, const RearrangementProfile& profile, double lambda) {
  return ascend_once(zeta, profile, lambda, GreenOperator(zeta.grid()));
}

ScalarField recenter_x1(const ScalarField& zeta) {
  const GridSpec& g = zeta.grid();
  CompensatedSum m;
  CompensatedSum mx;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      m.add(zeta.at(i, j));
      mx.add(zeta.at(i, j) * g.x1(i));
    }
  }
  if (!(m.value() > 0.0)) throw ValidationError("recenter_x1: field has no mass");
  const double centroid = mx.value() / m.value();
  const int shift = static_cast<int>(std::lround(centroid / g.h()));
  if (shift == 0) return zeta;
  const SupportBox box = support_box(zeta);
  if (box.i_min - shift < 0 || box.i_max - shift > g.nx() - 1) {
    throw WindowExhaustion("recenter_x1: shift of " + std::to_string(-shift) + " cells leaves the window");
  }
  return shift_x1(zeta, -shift);
}

double comonotonicity_residual(const ScalarField& zeta, const ScalarField& psi) {
  throw_if_mismatched(zeta, psi, "comonotonicity_residual");
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (zeta[k] > 0.0) support.push_back(k);
  }
  std::sort(support.begin(), support.end(),
            [&](std::size_t a, std::size_t b) { return zeta[a] > zeta[b] || (zeta[a] == zeta[b] && a < b); });
  CompensatedSum acc;
  for (std::size_t p = 0; p < support.size(); ++p) {
    const std::size_t a = support[p];
    for (std::size_t q = p + 1; q < support.size(); ++q) {
      const std::size_t b = support[q];
      if (!(zeta[a] > zeta[b])) continue;
      const double gap = psi[b] - psi[a];
      if (gap > 0.0) acc.add(gap * (zeta[a] - zeta[b]));
    }
  }
  const double h2 = zeta.grid().cell_area();
  const double l2 = lp_norm(zeta, 2.0);
  if (l2 == 0.0) return 0.0;
  return acc.value() * h2 * h2 / (l2 * l2 * h2);
}

std::vector<double> concentration_diagnostics(const ScalarField& zeta, const std::vector<double>& radii) {
  for (double r : radii) {
    if (!(r > 0.0)) throw ValidationError("concentration_diagnostics: radii must be > 0");
  }
  const GridSpec& g = zeta.grid();
  std::vector<double> best(radii.size(), 0.0);
  const SupportBox box = support_box(zeta);
  if (box.empty()) return best;

  // Row prefix sums: prefix[j][i] = sum of row j over columns < i.
  const int nx = g.nx();
  std::vector<double> prefix(static_cast<std::size_t>(g.ny()) * (nx + 1), 0.0);
  for (int j = box.j_min; j <= box.j_max; ++j) {
    double* row = &prefix[static_cast<std::size_t>(j) * (nx + 1)];
    for (int i = 0; i < nx; ++i) row[i + 1] = row[i] + zeta.at(i, j);
  }
  const double h = g.h();
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double rr = radii[r] / h;
    const int reach = static_cast<int>(std::floor(rr));
    std::vector<int> half(static_cast<std::size_t>(reach) + 1);
    for (int dy = 0; dy <= reach; ++dy) {
      half[static_cast<std::size_t>(dy)] = static_cast<int>(std::floor(std::sqrt(rr * rr - double(dy) * dy)));
    }
    const int cj0 = std::max(0, box.j_min - reach);
    const int cj1 = std::min(g.ny() - 1, box.j_max + reach);
    const int ci0 = std::max(0, box.i_min - reach);
    const int ci1 = std::min(nx - 1, box.i_max + reach);
    double top = 0.0;
    for (int cj = cj0; cj <= cj1; ++cj) {
      for (int ci = ci0; ci <= ci1; ++ci) {
        double s = 0.0;
        const int j0 = std::max(box.j_min, cj - reach);
        const int j1 = std::min(box.j_max, cj + reach);
        for (int j = j0; j <= j1; ++j) {
          const int w = half[static_cast<std::size_t>(std::abs(j - cj))];
          const int lo = std::max(0, ci - w);
          const int hi = std::min(nx - 1, ci + w);
          const double* row = &prefix[static_cast<std::size_t>(j) * (nx + 1)];
          s += row[hi + 1] - row[lo];
        }
        top = std::max(top, s);
      }
    }
    best[r] = top * g.cell_area();
  }
  // Larger balls contain smaller ones; enforce the ordering against round-off.
  for (std::size_t r = 1; r < radii.size(); ++r) {
    if (radii[r] >= radii[r - 1]) best[r] = std::max(best[r], best[r - 1]);
  }
  return best;
}

MaximizerResult maximize(const RearrangementProfile& profile, const GridSpec& grid, const MaximizerConfig& cfg) {
  cfg.validate();
  if (std::abs(profile.h() - grid.h()) > 1e-12 * grid.h()) {
    throw ValidationError("maximize: profile spacing differs from the grid spacing");
  }
  const GreenOperator op(grid, cfg.green);
  const double lambda = cfg.lambda;
  const double cell = grid.cell_area();

  ScalarField zeta = seed_field(profile, grid, cfg);
  check_window(zeta, cfg.edge_margin, "maximize seed");

  MaximizerResult result;
  result.lambda = lambda;
  result.z_height = support_height_z(norms(zeta), lambda);
  if (grid.x2_max() < result.z_height) {
    throw WindowExhaustion("maximize: window height x2_max = " + format_real(grid.x2_max()) +
                           " is below support_height_z = " + format_real(result.z_height));
  }

  ScalarField psi0 = op.apply(zeta);
  double obj = objective_with_stream(zeta, psi0, lambda);
  auto trace_row = [&](int iter, const ScalarField& z, double o, double delta) {
    result.trace.push_back({iter, o, delta, static_cast<double>(support_cells(z)) * cell,
                            concentration_diagnostics(z, {1.0})[0]});
  };
  trace_row(0, zeta, obj, 0.0);
  if (cfg.on_iterate) cfg.on_iterate(0, zeta);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const ScalarField psi = total_stream(psi0, lambda);
    const std::vector<char> mask = positive_mask(psi);
    ScalarField next = rearrange_along(profile, psi, &mask, Placement::partial);
    ScalarField next_psi0 = op.apply(next);

    auto replace = [&](ScalarField candidate) {
      if (same_values(candidate, next)) return;
      next = std::move(candidate);
      next_psi0 = op.apply(next);
    };
    if (cfg.curtail) replace(curtail_negative_stream(next, total_stream(next_psi0, lambda)));
    if (cfg.steiner_every > 0 && it % cfg.steiner_every == 0) replace(steiner_symmetrize(next));
    if (cfg.recenter && mass(next) > 0.0) replace(recenter_x1(next));
    check_window(next, cfg.edge_margin, "maximize");

    // The linearised step moves the support by whole cells only when the tilt
    // -lambda x2 outweighs the self-induced peak of psi, which on coarse grids can
    // freeze it at the wrong height. Vertical translates stay in the class, so
    // they are tried directly and kept while the objective strictly increases.
    if (cfg.vertical_search) {
      double best = objective_with_stream(next, next_psi0, lambda);
      for (int dir : {1, -1}) {
        bool moved = false;
        for (;;) {
          std::optional<ScalarField> cand = shift_rows(next, dir, cfg.edge_margin);
          if (!cand) break;
          ScalarField cand_psi0 = op.apply(*cand);
          const double o = objective_with_stream(*cand, cand_psi0, lambda);
          if (!(o > best + 1e-14 * std::abs(best))) break;
          next = std::move(*cand);
          next_psi0 = std::move(cand_psi0);
          best = o;
          moved = true;
        }
        if (moved) break;
      }
    }

    const double scale = std::max(lp_norm(zeta, 2.0), std::numeric_limits<double>::min());
    auto relative_change = [&](double o) {
      return std::abs(o - obj) / std::max(std::abs(o), std::numeric_limits<double>::min());
    };
    double next_obj = objective_with_stream(next, next_psi0, lambda);
    bool fixed = (relative_change(next_obj) < cfg.tol_objective || next_obj == 0.0) &&
                 dist2(next, zeta) / scale < cfg.tol_field;

    // At a fixed point of the linearised step an exact exchange of one or two
    // cell pairs may still raise the objective; it then becomes this iterate.
    if (fixed && cfg.swap_limit > 0 && support_cells(next) <= static_cast<std::size_t>(cfg.swap_limit)) {
      const Exchange ex = best_exchange(next, total_stream(next_psi0, lambda));
      if (ex.gain > 1e-12 * std::abs(next_obj)) {
        ScalarField swapped = apply_exchange(next, ex);
        ScalarField swapped_psi0 = op.apply(swapped);
        const double o = objective_with_stream(swapped, swapped_psi0, lambda);
        if (o > next_obj && !support_near_window_edge(swapped, cfg.edge_margin)) {
          next = std::move(swapped);
          next_psi0 = std::move(swapped_psi0);
          next_obj = o;
          fixed = false;
        }
      }
    }

    const double z = support_height_z(norms(next), lambda);
    if (grid.x2_max() < z) {
      throw WindowExhaustion("maximize: iterate " + std::to_string(it) + " has support_height_z = " +
                             format_real(z) + " above x2_max = " + format_real(grid.x2_max()));
    }
    if (!std::isfinite(next_obj)) throw NumericFailure("maximize: objective is not finite");
    if (next_obj < obj - 1e-10 * std::max(1.0, std::abs(obj))) {
      throw NumericFailure("maximize: objective decreased from " + format_real(obj) + " to " +
                           format_real(next_obj) + " at iteration " + std::to_string(it));
    }
    const double delta = dist2(next, zeta) / scale;
    trace_row(it, next, next_obj, delta);
    if (cfg.on_iterate) cfg.on_iterate(it, next);

    zeta = std::move(next);
    psi0 = std::move(next_psi0);
    obj = next_obj;
    result.iterations = it;
    if (fixed) {
      result.converged = true;
      break;
    }
  }

  result.psi_star = total_stream(psi0, lambda);
  result.s_lambda = obj;
  result.full_rearrangement = is_rearrangement(zeta, profile, 0.0).member;
  result.comonotonicity_residual = comonotonicity_residual(zeta, result.psi_star);
  result.zeta_star = std::move(zeta);
  return result;
}

std::vector<SweepRow> lambda_sweep(const RearrangementProfile& profile, const GridSpec& grid,
                                   const std::vector<double>& lambdas, const MaximizerConfig& cfg) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) throw ValidationError("lambda_sweep: lambdas must be positive");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw ValidationError("lambda_sweep: lambdas must ascend");
  }
  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    MaximizerConfig c = cfg;
    c.lambda = lambda;
    const MaximizerResult r = maximize(profile, grid, c);
    const SupportBox box = support_box(r.zeta_star);
    rows.push_back({lambda, r.s_lambda, r.full_rearrangement, r.converged, r.iterations,
                    box.empty() ? 0.0 : (box.j_max + 1) * grid.h(), r.z_height});
  }
  return rows;
}

}  // namespace vortexpair
