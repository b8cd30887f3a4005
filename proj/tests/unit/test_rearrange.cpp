#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "vortexpair/errors.hpp"
#include "vortexpair/greens.hpp"
#include "vortexpair/rearrange.hpp"

using namespace vortexpair;

TEST_CASE("profiles are validated and summarised") {
  const RearrangementProfile p({{3.0, 2}, {1.0, 5}}, 0.5);
  CHECK(p.total_cells() == 7);
  CHECK(p.total_area() == doctest::Approx(1.75));
  CHECK(p.l1() == doctest::Approx((6.0 + 5.0) * 0.25));
  CHECK(p.lp(2.0) == doctest::Approx(std::sqrt((18.0 + 5.0) * 0.25)));
  CHECK(p.max_value() == 3.0);
  CHECK(p.expanded() == std::vector<double>{3, 3, 1, 1, 1, 1, 1});

  CHECK_THROWS_AS(RearrangementProfile({{1.0, 2}, {3.0, 1}}, 0.5), ValidationError);
  CHECK_THROWS_AS(RearrangementProfile({{1.0, 2}, {1.0, 1}}, 0.5), ValidationError);
  CHECK_THROWS_AS(RearrangementProfile({{-1.0, 2}}, 0.5), ValidationError);
  CHECK_THROWS_AS(RearrangementProfile({{1.0, 0}}, 0.5), ValidationError);
  CHECK_THROWS_AS(RearrangementProfile({{1.0, 1}}, 0.0), ValidationError);

  const RearrangementProfile patch = patch_profile(2.0, 1.0, 0.25);
  CHECK(patch.total_cells() == 16);
  CHECK(patch.levels().size() == 1);
  CHECK_THROWS_AS(patch_profile(1.0, 1e-4, 0.25), ValidationError);

  const RearrangementProfile bump = bump_profile(1.0, 3.0, 0.1875);
  CHECK(bump.max_value() < 1.0);
  CHECK(bump.equivalent_radius() == doctest::Approx(3.0).epsilon(0.02));
  // Mass of a (1 - r^2/a^2)^2 bump is pi a^2 / 3.
  CHECK(bump.l1() == doctest::Approx(std::numbers::pi * 9.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("decreasing rearrangement collects level sets") {
  const GridSpec g = GridSpec::from_spacing(0.0, 1.0, 3, 2);
  const ScalarField f(g, {0.0, 2.0, 1.0, 2.0, 0.0, 2.0});
  const RearrangementProfile p = decreasing_rearrangement(f);
  REQUIRE(p.levels().size() == 2);
  CHECK(p.levels()[0].value == 2.0);
  CHECK(p.levels()[0].cells == 3);
  CHECK(p.levels()[1].cells == 1);
  CHECK_THROWS_AS(decreasing_rearrangement(ScalarField(g, {0, 0, -1, 0, 0, 0})), ValidationError);
}

TEST_CASE("rearrange_along maximises the pairing over every permutation") {
  // Small integer data keeps every sum exact, so the brute force is a strict oracle.
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int nx = 2 + static_cast<int>(rng.uniform() * 3.0);  // 2..4
    const GridSpec g = GridSpec::from_spacing(0.0, 1.0, nx, 2);
    const std::size_t n = g.size();
    std::vector<double> psi_v(n);
    for (double& v : psi_v) v = std::floor(rng.uniform(-3.0, 4.0));
    std::vector<Level> levels;
    std::int64_t used = 0;
    for (double v = 4.0; v >= 1.0 && used < static_cast<std::int64_t>(n); v -= 1.0) {
      const auto c = std::min<std::int64_t>(1 + static_cast<std::int64_t>(rng.uniform() * 2.0),
                                            static_cast<std::int64_t>(n) - used);
      if (rng.uniform() < 0.7) {
        levels.push_back({v, c});
        used += c;
      }
    }
    if (levels.empty()) levels.push_back({1.0, 1});
    const RearrangementProfile profile(levels, 1.0);
    const ScalarField psi(g, psi_v);
    const ScalarField z = rearrange_along(profile, psi);

    std::vector<double> values = profile.expanded();
    values.resize(n, 0.0);
    std::sort(values.begin(), values.end());
    double best = -1e300;
    do {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += values[k] * psi_v[k];
      best = std::max(best, s);
    } while (std::next_permutation(values.begin(), values.end()));

    double got = 0.0;
    for (std::size_t k = 0; k < n; ++k) got += z[k] * psi_v[k];
    CHECK(got == best);
    CHECK(is_rearrangement(z, profile, 0.0).member);
  }
}

TEST_CASE("rearrange_along breaks ties by cell index and honours the mask") {
  const GridSpec g = GridSpec::from_spacing(0.0, 1.0, 4, 1);
  const ScalarField psi(g, {1.0, 2.0, 2.0, 0.5});
  const RearrangementProfile p({{5.0, 1}, {3.0, 1}}, 1.0);
  const ScalarField z = rearrange_along(p, psi);
  CHECK(z.copy_values() == std::vector<double>{0.0, 5.0, 3.0, 0.0});

  const std::vector<char> mask{1, 0, 1, 1};
  const ScalarField zm = rearrange_along(p, psi, &mask);
  CHECK(zm.copy_values() == std::vector<double>{3.0, 0.0, 5.0, 0.0});

  const std::vector<char> tight{0, 0, 1, 0};
  CHECK_THROWS_AS(rearrange_along(p, psi, &tight), WindowExhaustion);
  const ScalarField partial = rearrange_along(p, psi, &tight, Placement::partial);
  CHECK(partial.copy_values() == std::vector<double>{0.0, 0.0, 5.0, 0.0});
  CHECK(is_restricted_rearrangement(partial, p));
  CHECK_FALSE(is_rearrangement(partial, p, 0.0).member);

  const std::vector<char> wrong_size{1, 1};
  CHECK_THROWS_AS(rearrange_along(p, psi, &wrong_size), ValidationError);
  CHECK_THROWS_AS(rearrange_along(RearrangementProfile({{1.0, 1}}, 0.5), psi), ValidationError);
}

TEST_CASE("rearrangement drift is the L1 distance of decreasing rearrangements") {
  const GridSpec g = GridSpec::from_spacing(0.0, 0.5, 4, 2);
  const RearrangementProfile p({{2.0, 2}, {1.0, 2}}, 0.5);
  const ScalarField exact(g, {2, 2, 1, 1, 0, 0, 0, 0});
  CHECK(is_rearrangement(exact, p, 0.0).drift == 0.0);

  // One 1 raised to 1.5: the sorted sequences differ by 0.5 on one cell.
  const ScalarField bumped(g, {2, 2, 1.5, 1, 0, 0, 0, 0});
  const RearrangementCheck c = is_rearrangement(bumped, p, 0.0);
  CHECK(c.drift == doctest::Approx(0.5 * 0.25));
  CHECK(c.relative_drift == doctest::Approx(0.125 / p.l1()));
  CHECK_FALSE(c.member);
  CHECK(is_rearrangement(bumped, p, 0.1).member);
  CHECK_FALSE(is_restricted_rearrangement(bumped, p));

  // Against the sorted-sequence oracle on random data.
  Rng rng(13);
  for (int n = 0; n < 30; ++n) {
    const GridSpec r = GridSpec::from_spacing(0.0, 0.3, 6, 5);
    const ScalarField a = oracle::random_field(r, rng, 0.5);
    const ScalarField b = oracle::random_field(r, rng, 0.5);
    const RearrangementProfile pb = decreasing_rearrangement(b);
    std::vector<double> va = a.copy_values();
    std::vector<double> vb = b.copy_values();
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    double d = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) d += std::abs(va[k] - vb[k]);
    d *= r.cell_area();
    CHECK(is_rearrangement(a, pb, 0.0).drift == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("Steiner symmetrisation") {
  Rng rng(21);
  for (int n = 0; n < 10; ++n) {
    const GridSpec g = GridSpec::from_spacing(-2.0, 0.25, 16, 12);
    const ScalarField f = oracle::random_blob(g, rng, 1, 12, 2, 9, 0.6);
    const ScalarField s = steiner_symmetrize(f);
    CHECK(is_steiner_symmetric(s));
    CHECK(steiner_symmetrize(s).copy_values() == s.copy_values());
    CHECK(is_rearrangement(s, decreasing_rearrangement(f), 0.0).member);
    for (int j = 0; j < g.ny(); ++j) {
      std::vector<double> a;
      std::vector<double> b;
      for (int i = 0; i < g.nx(); ++i) {
        a.push_back(f.at(i, j));
        b.push_back(s.at(i, j));
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
    CHECK(impulse(s) == impulse(f));
    CHECK(energy(s) >= energy(f) * (1.0 - 1e-12));
  }
  // Placement order: x1 = 0.125 before -0.125 before 0.375.
  const GridSpec g = GridSpec::from_spacing(-1.0, 0.25, 8, 1);
  const ScalarField f(g, {3, 0, 0, 0, 0, 0, 1, 2});
  CHECK(steiner_symmetrize(f).copy_values() == std::vector<double>{0, 0, 0, 2, 3, 1, 0, 0});
  CHECK_FALSE(is_steiner_symmetric(f));
}

TEST_CASE("curtailment zeros vorticity where the stream is not positive") {
  const GridSpec g = GridSpec::from_spacing(0.0, 1.0, 4, 1);
  const ScalarField z(g, {1, 2, 3, 4});
  const ScalarField psi(g, {0.1, 0.0, -1.0, 2.0});
  CHECK(curtail_negative_stream(z, psi).copy_values() == std::vector<double>{1, 0, 0, 4});
  CHECK_THROWS_AS(curtail_negative_stream(z, ScalarField(GridSpec::from_spacing(0.0, 1.0, 5, 1))), ValidationError);
}

TEST_CASE("profile CSV round trip") {
  const RearrangementProfile p = bump_profile(1.3, 1.0, 0.1);
  std::stringstream ss;
  write_profile_csv(ss, p);
  const RearrangementProfile back = read_profile_csv(ss);
  CHECK(back == p);

  std::stringstream bad("# profile v1, h=0.5\n1.0,0.3\n");
  CHECK_THROWS_AS(read_profile_csv(bad), ValidationError);
  std::stringstream no_header("1.0,0.25\n");
  CHECK_THROWS_AS(read_profile_csv(no_header), ValidationError);
}
