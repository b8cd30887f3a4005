#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "vortexpair/errors.hpp"
#include "vortexpair/greens.hpp"
#include "vortexpair/maximizer.hpp"

using namespace vortexpair;

namespace {

GridSpec patch_grid() { return GridSpec::from_window(-6.8, 6.8, 13.6, 64, 64); }

RearrangementProfile patch(const GridSpec& g) { return patch_profile(1.0, 0.7853981633974483, g.h()); }

// E - lambda I of a sparse field from pairwise kernel sums.
double sparse_objective(const ScalarField& z, double lambda) {
  const GridSpec& g = z.grid();
  std::vector<std::size_t> s;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] != 0.0) s.push_back(k);
  }
  long double e = 0.0L;
  for (std::size_t a : s) {
    for (std::size_t b : s) {
      const int ia = g.column_of(a), ja = g.row_of(a), ib = g.column_of(b), jb = g.row_of(b);
      const long double k = a == b ? oracle::cell_self_term(g, ja) : oracle::green(g.x1(ia), g.x2(ja), g.x1(ib), g.x2(jb));
      e += k * z[a] * z[b];
    }
  }
  const long double w = g.cell_area();
  return static_cast<double>(0.5L * e * w * w) - lambda * oracle::impulse(z);
}

}  // namespace

TEST_CASE("configuration validation") {
  MaximizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.swap_limit = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.seed_placement = SeedPlacement::given_field;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(seed_placement_from_string(to_string(SeedPlacement::strip)) == SeedPlacement::strip);
  CHECK_THROWS_AS(seed_placement_from_string("ring"), ValidationError);
}

TEST_CASE("one ascent step never lowers the objective") {
  Rng rng(3);
  const GridSpec g = patch_grid();
  const RearrangementProfile p = patch(g);
  const GreenOperator op(g);
  for (int n = 0; n < 15; ++n) {
    MaximizerConfig c;
    c.seed_placement = n % 2 ? SeedPlacement::disk : SeedPlacement::strip;
    c.seed_height = rng.uniform(0.6, 1.5);
    c.seed_x1 = rng.uniform(-2.0, 2.0);
    c.lambda = 0.05;
    const ScalarField seed = seed_field(p, g, c);
    CHECK(is_rearrangement(seed, p, 0.0).member);
    const ScalarField next = ascend_once(seed, p, c.lambda, op);
    CHECK(is_restricted_rearrangement(next, p));
    CHECK(objective(next, c.lambda) >= objective(seed, c.lambda) - 1e-14);
  }
}

TEST_CASE("the maximizer converges to a comonotone exchange-stable member of the class") {
  const GridSpec g = patch_grid();
  const RearrangementProfile p = patch(g);
  MaximizerConfig c;
  int calls = 0;
  c.on_iterate = [&](int, const ScalarField&) { ++calls; };
  const MaximizerResult r = maximize(p, g, c);
  REQUIRE(r.converged);
  CHECK(calls == r.iterations + 1);
  CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations + 1));
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].objective >= r.trace[k - 1].objective);
  CHECK(r.full_rearrangement);
  CHECK(r.comonotonicity_residual == 0.0);
  CHECK(r.s_lambda > 0.0);
  CHECK(r.s_lambda == doctest::Approx(sparse_objective(r.zeta_star, c.lambda)).epsilon(1e-10));
  CHECK(r.z_height <= g.x2_max());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (r.zeta_star[k] > 0.0) CHECK(r.psi_star[k] > 0.0);
  }

  // No single move of a support cell to any nearby empty cell does better.
  const SupportBox box = support_box(r.zeta_star);
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (r.zeta_star[a] == 0.0) continue;
    for (int j = std::max(0, box.j_min - 3); j <= box.j_max + 3; ++j) {
      for (int i = box.i_min - 3; i <= box.i_max + 3; ++i) {
        const std::size_t b = g.index(i, j);
        if (r.zeta_star[b] != 0.0) continue;
        std::vector<double> v = r.zeta_star.copy_values();
        std::swap(v[a], v[b]);
        CHECK(sparse_objective(ScalarField(g, v), c.lambda) <= r.s_lambda * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("different seeds reach the same maximizer") {
  const GridSpec g = patch_grid();
  const RearrangementProfile p = patch(g);
  MaximizerConfig a;
  MaximizerConfig b;
  b.seed_placement = SeedPlacement::strip;
  MaximizerConfig c;
  c.seed_height = 0.8;
  c.seed_x1 = 1.3;
  const double sa = maximize(p, g, a).s_lambda;
  CHECK(maximize(p, g, b).s_lambda == doctest::Approx(sa).epsilon(1e-10));
  CHECK(maximize(p, g, c).s_lambda == doctest::Approx(sa).epsilon(1e-10));
}

TEST_CASE("a window below the support height bound is refused") {
  const GridSpec g = GridSpec::from_window(-6.8, 6.8, 3.4, 64, 16);
  MaximizerConfig c;
  CHECK_THROWS_AS(maximize(patch(g), g, c), WindowExhaustion);
  CHECK_THROWS_AS(maximize(RearrangementProfile({{1.0, 4}}, 0.5), patch_grid(), c), ValidationError);
}

TEST_CASE("given seeds must belong to the restricted class") {
  const GridSpec g = patch_grid();
  const RearrangementProfile p = patch(g);
  MaximizerConfig c;
  c.seed_placement = SeedPlacement::given_field;
  std::vector<double> v(g.size(), 0.0);
  v[g.index(32, 5)] = 2.0;
  c.seed_field = ScalarField(g, v);
  CHECK_THROWS_AS(seed_field(p, g, c), ValidationError);
  v[g.index(32, 5)] = 1.0;
  c.seed_field = ScalarField(g, v);
  CHECK(seed_field(p, g, c).copy_values() == v);
}

TEST_CASE("recentering shifts by whole cells") {
  const GridSpec g = GridSpec::from_spacing(-2.0, 0.5, 8, 2);
  std::vector<double> v(g.size(), 0.0);
  v[g.index(6, 0)] = 1.0;
  v[g.index(7, 0)] = 1.0;
  const ScalarField r = recenter_x1(ScalarField(g, v));
  CHECK(r.at(3, 0) + r.at(4, 0) == 2.0);
  CHECK_THROWS_AS(recenter_x1(ScalarField(g)), ValidationError);
}

TEST_CASE("comonotonicity residual") {
  const GridSpec g = GridSpec::from_spacing(0.0, 1.0, 3, 1);
  const ScalarField z(g, {2.0, 1.0, 0.0});
  CHECK(comonotonicity_residual(z, ScalarField(g, {3.0, 1.0, 0.0})) == 0.0);
  // One inverted pair: (psi_b - psi_a)(z_a - z_b) h^4 / (||z||^2 h^2) = 2 * 1 / 5.
  CHECK(comonotonicity_residual(z, ScalarField(g, {1.0, 3.0, 0.0})) == doctest::Approx(0.4));
}

TEST_CASE("concentration diagnostics match a brute-force disc search") {
  Rng rng(19);
  const GridSpec g = GridSpec::from_spacing(-2.0, 0.25, 16, 12);
  for (int n = 0; n < 5; ++n) {
    const ScalarField z = oracle::random_blob(g, rng, 3, 12, 2, 8, 0.5);
    const std::vector<double> radii{0.3, 0.6, 1.0};
    const std::vector<double> got = concentration_diagnostics(z, radii);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      double best = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
          const double d1 = g.x1(g.column_of(k)) - g.x1(g.column_of(c));
          const double d2 = g.x2(g.row_of(k)) - g.x2(g.row_of(c));
          if (d1 * d1 + d2 * d2 <= radii[r] * radii[r] * (1.0 + 1e-12)) s += z[k];
        }
        best = std::max(best, s * g.cell_area());
      }
      CHECK(got[r] == doctest::Approx(best).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(concentration_diagnostics(ScalarField(g), {0.0}), ValidationError);
}

TEST_CASE("lambda sweep rejects unordered lists") {
  const GridSpec g = patch_grid();
  CHECK_THROWS_AS(lambda_sweep(patch(g), g, {0.05, 0.04}, {}), ValidationError);
  const std::vector<SweepRow> rows = lambda_sweep(patch(g), g, {0.05, 0.06}, {});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].s_lambda > rows[1].s_lambda);
  CHECK(rows[1].z_height < rows[0].z_height);
}
