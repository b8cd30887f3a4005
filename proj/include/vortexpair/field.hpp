#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vortexpair {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

// Truncated window [x1_min, x1_max] x (0, x2_max] of the half-plane, split into
// nx * ny square cells of side h. The wall x2 = 0 is the bottom edge.
class GridSpec {
 public:
  GridSpec() = default;

  // Throws ValidationError unless nx, ny >= 1 and the window is consistent with a
  // single uniform spacing (x1_max - x1_min)/nx == x2_max/ny to 1e-12 relative.
  static GridSpec from_window(double x1_min, double x1_max, double x2_max, int nx, int ny);
  static GridSpec from_spacing(double x1_min, double h, int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  double x1_min() const { return x1_min_; }
  double x1_max() const { return x1_min_ + nx_ * h_; }
  double x2_max() const { return ny_ * h_; }
  double cell_area() const { return h_ * h_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

  double x1(int i) const { return x1_min_ + (i + 0.5) * h_; }
  double x2(int j) const { return (j + 0.5) * h_; }
  Point center(int i, int j) const { return {x1(i), x2(j)}; }

  // Row-major storage: j outer (j = 0 is the row nearest the wall), i inner.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  int column_of(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(nx_)); }
  int row_of(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(nx_)); }

  bool matches(const GridSpec& other) const;

 private:
  double x1_min_ = 0.0;
  double h_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
};

// Cell-centre samples of a vorticity or stream function. Immutable once built.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid);  // zero field
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }

  // Copy of the samples, for building a derived field.
  std::vector<double> copy_values() const { return values_; }

  bool is_nonnegative() const;
  bool is_finite() const;
  bool is_zero() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// Elementary functionals, all by midpoint quadrature.
struct NormReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double lp = 0.0;
  double p = 2.0;
  double impulse = 0.0;         // I(f), signed
  double impulse_of_abs = 0.0;  // I(|f|)
  double norm_x = 0.0;          // l2 + I(|f|)
  double norm_y = 0.0;          // l2 + |I(f)|
};

double impulse(const ScalarField& f);
double lp_norm(const ScalarField& f, double p);  // p = +inf gives max |f|
double mass(const ScalarField& f);               // signed integral
NormReport norms(const ScalarField& f, double p = 2.0);

double dist2(const ScalarField& f, const ScalarField& g);
double dist_y(const ScalarField& f, const ScalarField& g);

// a*f + b*g on a shared grid.
ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g);

// Integer shift of the samples by `cells` columns; cells shifted past an edge are
// dropped and vacated cells are zero.
ScalarField shift_x1(const ScalarField& f, int cells);

// Cells with nonzero value.
std::size_t support_cells(const ScalarField& f);

// Inclusive bounding box of the nonzero cells; empty() when f is identically zero.
struct SupportBox {
  int i_min = 0;
  int i_max = -1;
  int j_min = 0;
  int j_max = -1;
  bool empty() const { return i_max < i_min; }
};
SupportBox support_box(const ScalarField& f);

// True when the support comes within `margin` cells of the left, right or top
// window edge. The wall is not a window edge.
bool support_near_window_edge(const ScalarField& f, int margin);

void throw_if_mismatched(const ScalarField& f, const ScalarField& g, const char* what);

// Field dump:
//   # vortex-field v1, nx=<..>, ny=<..>, x1_min=<..>, h=<..>
// then ny lines of nx comma-separated values, row j = 0 first, 17 significant digits.
void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_csv(const std::string& path, const ScalarField& f);
ScalarField read_field_csv(std::istream& in);
ScalarField read_field_csv(const std::string& path);

// 17-significant-digit formatting used by every CSV artifact.
std::string format_real(double x);

}  // namespace vortexpair
