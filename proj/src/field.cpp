#include "vortexpair/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vortexpair/errors.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Per-row sums that do not depend on the order of cells within a row, so that
// row permutations (Steiner symmetrization) leave mass and impulse bit-identical.
template <class F>
std::vector<double> row_sums(const ScalarField& f, F&& transform) {
  const GridSpec& g = f.grid();
  std::vector<double> sums(static_cast<std::size_t>(g.ny()));
  std::vector<double> row(static_cast<std::size_t>(g.nx()));
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) row[static_cast<std::size_t>(i)] = transform(f.at(i, j));
    sums[static_cast<std::size_t>(j)] = multiset_sum(row);
  }
  return sums;
}

double weighted_by_height(const GridSpec& g, const std::vector<double>& sums) {
  CompensatedSum acc;
  for (int j = 0; j < g.ny(); ++j) acc.add(g.x2(j) * sums[static_cast<std::size_t>(j)]);
  return acc.value() * g.cell_area();
}

}  // namespace

GridSpec GridSpec::from_window(double x1_min, double x1_max, double x2_max, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ValidationError("grid: nx and ny must be >= 1");
  if (!(x1_max > x1_min)) throw ValidationError("grid: x1_max must exceed x1_min");
  if (!(x2_max > 0.0)) throw ValidationError("grid: x2_max must be positive");
  const double h1 = (x1_max - x1_min) / nx;
  const double h2 = x2_max / ny;
  if (!close_rel(h1, h2, 1e-12)) {
    throw ValidationError("grid: spacing must be uniform, (x1_max - x1_min)/nx = " + format_real(h1) +
                          " but x2_max/ny = " + format_real(h2));
  }
  return from_spacing(x1_min, h2, nx, ny);
}

GridSpec GridSpec::from_spacing(double x1_min, double h, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ValidationError("grid: nx and ny must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid: h must be positive");
  if (!std::isfinite(x1_min)) throw ValidationError("grid: x1_min must be finite");
  GridSpec g;
  g.x1_min_ = x1_min;
  g.h_ = h;
  g.nx_ = nx;
  g.ny_ = ny;
  return g;
}

bool GridSpec::matches(const GridSpec& other) const {
  return nx_ == other.nx_ && ny_ == other.ny_ && close_rel(h_, other.h_, 1e-12) &&
         std::abs(x1_min_ - other.x1_min_) <= 1e-12 * std::max(1.0, std::abs(x1_min_));
}

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ValidationError("field: expected " + std::to_string(grid_.size()) + " values, got " +
                          std::to_string(values_.size()));
  }
}

bool ScalarField::is_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

bool ScalarField::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double impulse(const ScalarField& f) {
  return weighted_by_height(f.grid(), row_sums(f, [](double v) { return v; }));
}

double mass(const ScalarField& f) {
  const auto sums = row_sums(f, [](double v) { return v; });
  return ordered_sum(sums) * f.grid().cell_area();
}

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw ValidationError("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  CompensatedSum acc;
  if (p == 1.0) {
    for (double v : f.values()) acc.add(std::abs(v));
  } else if (p == 2.0) {
    for (double v : f.values()) acc.add(v * v);
  } else {
    for (double v : f.values()) acc.add(std::pow(std::abs(v), p));
  }
  const double s = acc.value() * f.grid().cell_area();
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

NormReport norms(const ScalarField& f, double p) {
  NormReport r;
  r.p = p;
  r.l1 = lp_norm(f, 1.0);
  r.l2 = lp_norm(f, 2.0);
  r.lp = lp_norm(f, p);
  r.impulse = impulse(f);
  r.impulse_of_abs = weighted_by_height(f.grid(), row_sums(f, [](double v) { return std::abs(v); }));
  r.norm_x = r.l2 + r.impulse_of_abs;
  r.norm_y = r.l2 + std::abs(r.impulse);
  return r;
}

void throw_if_mismatched(const ScalarField& f, const ScalarField& g, const char* what) {
  if (!f.grid().matches(g.grid())) throw ValidationError(std::string(what) + ": grid mismatch");
}

double dist2(const ScalarField& f, const ScalarField& g) {
  throw_if_mismatched(f, g, "dist2");
  CompensatedSum acc;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double d = f[k] - g[k];
    acc.add(d * d);
  }
  return std::sqrt(acc.value() * f.grid().cell_area());
}

double dist_y(const ScalarField& f, const ScalarField& g) {
  return dist2(f, g) + std::abs(impulse(f) - impulse(g));
}

ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g) {
  throw_if_mismatched(f, g, "linear_combination");
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = a * f[k] + b * g[k];
  return ScalarField(f.grid(), std::move(out));
}

ScalarField shift_x1(const ScalarField& f, int cells) {
  const GridSpec& g = f.grid();
  std::vector<double> out(f.size(), 0.0);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int src = i - cells;
      if (src >= 0 && src < g.nx()) out[g.index(i, j)] = f.at(src, j);
    }
  }
  return ScalarField(g, std::move(out));
}

std::size_t support_cells(const ScalarField& f) {
  return static_cast<std::size_t>(
      std::count_if(f.values().begin(), f.values().end(), [](double v) { return v != 0.0; }));
}

SupportBox support_box(const ScalarField& f) {
  const GridSpec& g = f.grid();
  SupportBox box{g.nx(), -1, g.ny(), -1};
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (f.at(i, j) == 0.0) continue;
      box.i_min = std::min(box.i_min, i);
      box.i_max = std::max(box.i_max, i);
      box.j_min = std::min(box.j_min, j);
      box.j_max = std::max(box.j_max, j);
    }
  }
  if (box.i_max < 0) return SupportBox{};
  return box;
}

bool support_near_window_edge(const ScalarField& f, int margin) {
  const SupportBox box = support_box(f);
  if (box.empty()) return false;
  const GridSpec& g = f.grid();
  return box.i_min < margin || box.i_max > g.nx() - 1 - margin || box.j_max > g.ny() - 1 - margin;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& out, const ScalarField& f) {
  const GridSpec& g = f.grid();
  out << "# vortex-field v1, nx=" << g.nx() << ", ny=" << g.ny() << ", x1_min=" << format_real(g.x1_min())
      << ", h=" << format_real(g.h()) << '\n';
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) out << ',';
      out << format_real(f.at(i, j));
    }
    out << '\n';
  }
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write field dump " + path);
  write_field_csv(out, f);
}

namespace {

double header_number(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) throw ValidationError("field dump header lacks " + key);
  return std::stod(header.substr(pos + key.size() + 1));
}

}  // namespace

ScalarField read_field_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# vortex-field v1", 0) != 0) {
    throw ValidationError("field dump: missing '# vortex-field v1' header");
  }
  const int nx = static_cast<int>(header_number(header, "nx"));
  const int ny = static_cast<int>(header_number(header, "ny"));
  const GridSpec g = GridSpec::from_spacing(header_number(header, "x1_min"), header_number(header, "h"), nx, ny);
  std::vector<double> values;
  values.reserve(g.size());
  std::string line;
  for (int j = 0; j < ny; ++j) {
    if (!std::getline(in, line)) throw ValidationError("field dump: expected " + std::to_string(ny) + " rows");
    std::stringstream row(line);
    std::string cell;
    int count = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(std::stod(cell));
      ++count;
    }
    if (count != nx) throw ValidationError("field dump: row " + std::to_string(j) + " has wrong length");
  }
  return ScalarField(g, std::move(values));
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read field dump " + path);
  return read_field_csv(in);
}

}  // namespace vortexpair
