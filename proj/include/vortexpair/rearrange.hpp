#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vortexpair/field.hpp"

namespace vortexpair {

struct Level {
  double value = 0.0;      // > 0
  std::int64_t cells = 0;  // area = cells * h^2

  bool operator==(const Level&) const = default;
};

// Decreasing rearrangement of a nonnegative field as a ladder of distinct
// positive values with their areas, strictly decreasing in value. The zero level
// is not stored.
class RearrangementProfile {
 public:
  RearrangementProfile() = default;
  // Throws ValidationError unless values are positive and strictly decreasing and
  // every count is positive.
  RearrangementProfile(std::vector<Level> levels, double h);

  const std::vector<Level>& levels() const { return levels_; }
  double h() const { return h_; }
  bool empty() const { return levels_.empty(); }
  std::int64_t total_cells() const;
  double total_area() const { return static_cast<double>(total_cells()) * h_ * h_; }
  double l1() const;
  double lp(double p) const;
  double max_value() const { return levels_.empty() ? 0.0 : levels_.front().value; }

  // Radius a of the disc with the same area as the support.
  double equivalent_radius() const;

  // Values in descending order, one entry per cell.
  std::vector<double> expanded() const;

  bool operator==(const RearrangementProfile& other) const = default;

 private:
  std::vector<Level> levels_;
  double h_ = 1.0;
};

// Profile of f. Throws ValidationError if f has negative values.
RearrangementProfile decreasing_rearrangement(const ScalarField& f);

// Uniform patch of the given value; area is rounded to whole cells.
RearrangementProfile patch_profile(double value, double area, double h);

// Smooth compactly supported bump amplitude * (1 - r^2/radius^2)^2 sampled at cell
// centres of a lattice of spacing h aligned with the disc centre on a cell corner.
RearrangementProfile bump_profile(double amplitude, double radius, double h);

struct RearrangementCheck {
  bool member = false;
  // Integral over alpha > 0 of | |{f > alpha}| - |{profile > alpha}| |, i.e. the
  // L1 distance between the two decreasing rearrangements.
  double drift = 0.0;
  double relative_drift = 0.0;  // drift / ||profile||_1
  // For each profile level k (same order as levels()): |{f >= v_k}| - |{profile >= v_k}|.
  std::vector<double> level_area_drift;
};

// Membership in R(profile): relative drift <= tol. tol = 0 demands the exact multiset.
RearrangementCheck is_rearrangement(const ScalarField& f, const RearrangementProfile& profile, double tol);

// Membership in R_+(profile): every positive value of f occurs in the profile, with
// no more cells than the profile holds at that value.
bool is_restricted_rearrangement(const ScalarField& f, const RearrangementProfile& profile);

enum class Placement {
  full,     // error if the unmasked cells cannot hold the whole ladder
  partial,  // place as much of the ladder as fits
};

// Places the ladder's values on unmasked cells in descending order of psi
// (largest value on largest psi), ties broken by ascending cell index. This is
// the maximizer of sum zeta * psi over fields equimeasurable with the profile on
// the unmasked region. `mask[k] != 0` marks cell k as available.
ScalarField rearrange_along(const RearrangementProfile& profile, const ScalarField& psi,
                            const std::vector<char>* mask = nullptr, Placement placement = Placement::full);

// Row-wise symmetric-decreasing rearrangement about x1 = 0: within each row the
// largest values go to the cells nearest x1 = 0, cells with x1 > 0 first on ties.
ScalarField steiner_symmetrize(const ScalarField& f);

// True when every row is already in Steiner order.
bool is_steiner_symmetric(const ScalarField& f);

// Zero zeta wherever psi_total <= 0.
ScalarField curtail_negative_stream(const ScalarField& zeta, const ScalarField& psi_total);

// Profile CSV: `# profile v1, h=<..>` then `value,area` lines, descending.
void write_profile_csv(std::ostream& out, const RearrangementProfile& profile);
void write_profile_csv(const std::string& path, const RearrangementProfile& profile);
RearrangementProfile read_profile_csv(std::istream& in);
RearrangementProfile read_profile_csv(const std::string& path);

}  // namespace vortexpair
