#include "vortexpair/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vortexpair/errors.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

RearrangementProfile::RearrangementProfile(std::vector<Level> levels, double h) : levels_(std::move(levels)), h_(h) {
  if (!(h_ > 0.0)) throw ValidationError("profile: h must be positive");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (!(levels_[k].value > 0.0) || !std::isfinite(levels_[k].value)) {
      throw ValidationError("profile: level values must be positive and finite");
    }
    if (levels_[k].cells <= 0) throw ValidationError("profile: level areas must be positive");
    if (k > 0 && !(levels_[k].value < levels_[k - 1].value)) {
      throw ValidationError("profile: level values must be strictly decreasing");
    }
  }
}

std::int64_t RearrangementProfile::total_cells() const {
  std::int64_t n = 0;
  for (const Level& l : levels_) n += l.cells;
  return n;
}

double RearrangementProfile::l1() const {
  CompensatedSum acc;
  for (const Level& l : levels_) acc.add(l.value * static_cast<double>(l.cells));
  return acc.value() * h_ * h_;
}

double RearrangementProfile::lp(double p) const {
  if (std::isinf(p)) return max_value();
  CompensatedSum acc;
  for (const Level& l : levels_) acc.add(std::pow(l.value, p) * static_cast<double>(l.cells));
  return std::pow(acc.value() * h_ * h_, 1.0 / p);
}

double RearrangementProfile::equivalent_radius() const { return std::sqrt(total_area() / std::numbers::pi); }

std::vector<double> RearrangementProfile::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total_cells()));
  for (const Level& l : levels_) out.insert(out.end(), static_cast<std::size_t>(l.cells), l.value);
  return out;
}

RearrangementProfile decreasing_rearrangement(const ScalarField& f) {
  std::map<double, std::int64_t, std::greater<>> counts;
  for (double v : f.values()) {
    if (v < 0.0 || std::isnan(v)) throw ValidationError("decreasing_rearrangement: field has negative values");
    if (v > 0.0) ++counts[v];
  }
  std::vector<Level> levels;
  levels.reserve(counts.size());
  for (const auto& [v, n] : counts) levels.push_back({v, n});
  return RearrangementProfile(std::move(levels), f.grid().h());
}

RearrangementProfile patch_profile(double value, double area, double h) {
  if (!(value > 0.0)) throw ValidationError("patch profile: value must be positive");
  if (!(area > 0.0)) throw ValidationError("patch profile: area must be positive");
  const auto cells = static_cast<std::int64_t>(std::llround(area / (h * h)));
  if (cells < 1) throw ValidationError("patch profile: area is below one cell");
  return RearrangementProfile({{value, cells}}, h);
}

RearrangementProfile bump_profile(double amplitude, double radius, double h) {
  if (!(amplitude > 0.0)) throw ValidationError("bump profile: amplitude must be positive");
  if (!(radius > 0.0)) throw ValidationError("bump profile: radius must be positive");
  const int n = static_cast<int>(std::ceil(radius / h)) + 1;
  std::map<double, std::int64_t, std::greater<>> counts;
  for (int j = -n; j < n; ++j) {
    for (int i = -n; i < n; ++i) {
      const double x = (i + 0.5) * h;
      const double y = (j + 0.5) * h;
      const double s = 1.0 - (x * x + y * y) / (radius * radius);
      if (s <= 0.0) continue;
      ++counts[amplitude * s * s];
    }
  }
  std::vector<Level> levels;
  for (const auto& [v, c] : counts) levels.push_back({v, c});
  if (levels.empty()) throw ValidationError("bump profile: radius is below one cell");
  return RearrangementProfile(std::move(levels), h);
}

namespace {

bool same_spacing(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

RearrangementCheck is_rearrangement(const ScalarField& f, const RearrangementProfile& profile, double tol) {
  if (!same_spacing(f.grid().h(), profile.h())) {
    throw ValidationError("is_rearrangement: profile spacing differs from the field grid");
  }
  const RearrangementProfile mine = decreasing_rearrangement(f);
  const auto& a = mine.levels();
  const auto& b = profile.levels();
  const double cell = profile.h() * profile.h();

  // Walk the merged value set from the top; between consecutive values both
  // distribution functions are constant.
  CompensatedSum drift;
  std::size_t ia = 0;
  std::size_t ib = 0;
  std::int64_t mu_a = 0;
  std::int64_t mu_b = 0;
  RearrangementCheck out;
  out.level_area_drift.assign(b.size(), 0.0);
  while (ia < a.size() || ib < b.size()) {
    double v = 0.0;
    if (ib >= b.size() || (ia < a.size() && a[ia].value > b[ib].value)) {
      v = a[ia].value;
    } else {
      v = b[ib].value;
    }
    const std::size_t level_b = ib;
    bool hit_b = false;
    if (ia < a.size() && a[ia].value == v) mu_a += a[ia++].cells;
    if (ib < b.size() && b[ib].value == v) {
      mu_b += b[ib++].cells;
      hit_b = true;
    }
    if (hit_b) out.level_area_drift[level_b] = static_cast<double>(mu_a - mu_b) * cell;
    double next = 0.0;
    if (ia < a.size()) next = std::max(next, a[ia].value);
    if (ib < b.size()) next = std::max(next, b[ib].value);
    if (mu_a != mu_b) drift.add(static_cast<double>(std::llabs(mu_a - mu_b)) * (v - next));
  }
  out.drift = drift.value() * cell;
  const double scale = profile.l1();
  out.relative_drift = scale > 0.0 ? out.drift / scale : out.drift;
  out.member = tol == 0.0 ? out.drift == 0.0 : out.relative_drift <= tol;
  return out;
}

bool is_restricted_rearrangement(const ScalarField& f, const RearrangementProfile& profile) {
  if (!same_spacing(f.grid().h(), profile.h())) return false;
  const RearrangementProfile mine = decreasing_rearrangement(f);
  std::size_t ib = 0;
  for (const Level& l : mine.levels()) {
    while (ib < profile.levels().size() && profile.levels()[ib].value > l.value) ++ib;
    if (ib >= profile.levels().size()) return false;
    const Level& p = profile.levels()[ib];
    if (p.value != l.value || l.cells > p.cells) return false;
  }
  return true;
}

ScalarField rearrange_along(const RearrangementProfile& profile, const ScalarField& psi, const std::vector<char>* mask,
                            Placement placement) {
  const GridSpec& g = psi.grid();
  if (!same_spacing(g.h(), profile.h())) {
    throw ValidationError("rearrange_along: profile spacing differs from the stream grid");
  }
  if (mask && mask->size() != psi.size()) throw ValidationError("rearrange_along: mask size mismatch");

  std::vector<std::size_t> order;
  order.reserve(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (!mask || (*mask)[k]) order.push_back(k);
  }
  const auto needed = static_cast<std::size_t>(profile.total_cells());
  if (placement == Placement::full && order.size() < needed) {
    throw WindowExhaustion("rearrange_along: profile needs " + std::to_string(needed) + " cells but only " +
                           std::to_string(order.size()) + " are available");
  }
  const std::size_t placed = std::min(needed, order.size());
  auto by_psi = [&](std::size_t a, std::size_t b) { return psi[a] > psi[b] || (psi[a] == psi[b] && a < b); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(placed), order.end(), by_psi);

  std::vector<double> out(psi.size(), 0.0);
  std::size_t k = 0;
  for (const Level& l : profile.levels()) {
    for (std::int64_t c = 0; c < l.cells && k < placed; ++c) out[order[k++]] = l.value;
  }
  return ScalarField(g, std::move(out));
}

namespace {

// Column visiting order for Steiner placement: ascending |x1|, x1 > 0 first on ties.
// Positions are compared on the half-cell lattice so mirror cells tie exactly.
std::vector<int> steiner_columns(const GridSpec& g) {
  std::vector<double> key(static_cast<std::size_t>(g.nx()));
  for (int i = 0; i < g.nx(); ++i) {
    const double q = 2.0 * g.x1(i) / g.h();
    const double r = std::round(q);
    key[static_cast<std::size_t>(i)] = std::abs(q - r) < 1e-6 ? r : q;
  }
  std::vector<int> cols(static_cast<std::size_t>(g.nx()));
  std::iota(cols.begin(), cols.end(), 0);
  std::sort(cols.begin(), cols.end(), [&](int a, int b) {
    const double ka = key[static_cast<std::size_t>(a)];
    const double kb = key[static_cast<std::size_t>(b)];
    if (std::abs(ka) != std::abs(kb)) return std::abs(ka) < std::abs(kb);
    if ((ka > 0) != (kb > 0)) return ka > 0;
    return a < b;
  });
  return cols;
}

}  // namespace

ScalarField steiner_symmetrize(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const std::vector<int> cols = steiner_columns(g);
  std::vector<double> out(f.size());
  std::vector<double> row(static_cast<std::size_t>(g.nx()));
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) row[static_cast<std::size_t>(i)] = f.at(i, j);
    std::sort(row.begin(), row.end(), std::greater<>());
    for (int r = 0; r < g.nx(); ++r) out[g.index(cols[static_cast<std::size_t>(r)], j)] = row[static_cast<std::size_t>(r)];
  }
  return ScalarField(g, std::move(out));
}

bool is_steiner_symmetric(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const std::vector<int> cols = steiner_columns(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (std::size_t r = 1; r < cols.size(); ++r) {
      if (f.at(cols[r], j) > f.at(cols[r - 1], j)) return false;
    }
  }
  return true;
}

ScalarField curtail_negative_stream(const ScalarField& zeta, const ScalarField& psi_total) {
  throw_if_mismatched(zeta, psi_total, "curtail_negative_stream");
  std::vector<double> out = zeta.copy_values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (psi_total[k] <= 0.0) out[k] = 0.0;
  }
  return ScalarField(zeta.grid(), std::move(out));
}

void write_profile_csv(std::ostream& out, const RearrangementProfile& profile) {
  out << "# profile v1, h=" << format_real(profile.h()) << '\n';
  const double cell = profile.h() * profile.h();
  for (const Level& l : profile.levels()) {
    out << format_real(l.value) << ',' << format_real(static_cast<double>(l.cells) * cell) << '\n';
  }
}

void write_profile_csv(const std::string& path, const RearrangementProfile& profile) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write profile " + path);
  write_profile_csv(out, profile);
}

RearrangementProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# profile v1", 0) != 0) {
    throw ValidationError("profile: missing '# profile v1' header");
  }
  const auto pos = line.find("h=");
  if (pos == std::string::npos) throw ValidationError("profile: header lacks h");
  const double h = std::stod(line.substr(pos + 2));
  std::vector<Level> levels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("profile: expected 'value,area' lines");
    const double value = std::stod(line.substr(0, comma));
    const double area = std::stod(line.substr(comma + 1));
    const auto cells = static_cast<std::int64_t>(std::llround(area / (h * h)));
    if (cells < 1 || std::abs(static_cast<double>(cells) * h * h - area) > 1e-6 * h * h) {
      throw ValidationError("profile: area " + format_real(area) + " is not a whole number of cells");
    }
    levels.push_back({value, cells});
  }
  return RearrangementProfile(std::move(levels), h);
}

RearrangementProfile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read profile " + path);
  return read_profile_csv(in);
}

}  // namespace vortexpair
