#pragma once

// Reference computations written straight from the definitions, kept apart from
// the library so the two can be compared.

#include <quadmath.h>

#include <cmath>
#include <algorithm>
#include <numbers>
#include <vector>

#include "vortexpair/field.hpp"
#include "vortexpair/random.hpp"

namespace oracle {

using vortexpair::GridSpec;
using vortexpair::Rng;
using vortexpair::ScalarField;

// Integral of log(x^2 + y^2) over the rectangle [0, a] x [0, b].
inline long double log_r2_rectangle(long double a, long double b) {
  return a * b * std::log(a * a + b * b) - 3.0L * a * b + a * a * std::atan(b / a) + b * b * std::atan(a / b);
}

// Mean of log|r| over a square cell of side h centred on the origin.
inline long double mean_log_distance(long double h) {
  const long double half = h / 2.0L;
  return 0.5L * 4.0L * log_r2_rectangle(half, half) / (h * h);
}

// (1/2pi) log(|x - y*| / |x - y|) with y* the mirror image of y.
inline long double green(long double x1, long double x2, long double y1, long double y2) {
  const long double d = (x1 - y1) * (x1 - y1) + (x2 - y2) * (x2 - y2);
  const long double di = (x1 - y1) * (x1 - y1) + (x2 + y2) * (x2 + y2);
  return std::log(di / d) / (4.0L * std::numbers::pi_v<long double>);
}

// The same log ratio in quad precision, accurate to well below 1e-12 relative
// even where the ratio is within 1e-10 of one.
inline double green_quad(double x1, double x2, double y1, double y2) {
  const __float128 a = static_cast<__float128>(x1) - y1;
  const __float128 b = static_cast<__float128>(x2) - y2;
  const __float128 c = static_cast<__float128>(x2) + y2;
  return static_cast<double>(logq((a * a + c * c) / (a * a + b * b)) / (4 * M_PIq));
}

// |a - b| measured against max(|a|, |b|, 1): relative for values of size one and
// above, absolute below.
inline double unit_scale_difference(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

inline long double cell_self_term(const GridSpec& g, int j) {
  const long double pi = std::numbers::pi_v<long double>;
  return -mean_log_distance(g.h()) / (2.0L * pi) + std::log(2.0L * g.x2(j)) / (2.0L * pi);
}

// Double sum over cells; singular cells use the cell average of the free-space part.
inline std::vector<double> apply_green(const ScalarField& zeta) {
  const GridSpec& g = zeta.grid();
  std::vector<double> out(g.size());
  const long double w = g.cell_area();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      long double s = 0.0L;
      for (int q = 0; q < g.ny(); ++q) {
        for (int p = 0; p < g.nx(); ++p) {
          const double z = zeta.at(p, q);
          if (z == 0.0) continue;
          const long double k = (p == i && q == j) ? cell_self_term(g, j) : green(g.x1(i), g.x2(j), g.x1(p), g.x2(q));
          s += k * z * w;
        }
      }
      out[g.index(i, j)] = static_cast<double>(s);
    }
  }
  return out;
}

inline double energy(const ScalarField& zeta) {
  const std::vector<double> psi = apply_green(zeta);
  long double s = 0.0L;
  for (std::size_t k = 0; k < psi.size(); ++k) s += static_cast<long double>(zeta[k]) * psi[k];
  return static_cast<double>(0.5L * s * zeta.grid().cell_area());
}

inline double impulse(const ScalarField& f) {
  const GridSpec& g = f.grid();
  long double s = 0.0L;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) s += static_cast<long double>(f.at(i, j)) * g.x2(j);
  }
  return static_cast<double>(s * g.cell_area());
}

// Nonnegative random field; each cell is nonzero with probability `fill`.
inline ScalarField random_field(const GridSpec& g, Rng& rng, double fill = 1.0, double scale = 1.0) {
  std::vector<double> v(g.size(), 0.0);
  for (double& x : v) {
    const double keep = rng.uniform();
    const double value = scale * rng.uniform();
    if (keep < fill) x = value;
  }
  return ScalarField(g, std::move(v));
}

// Same, restricted to a box of cells.
inline ScalarField random_blob(const GridSpec& g, Rng& rng, int i0, int i1, int j0, int j1, double fill = 1.0) {
  std::vector<double> v(g.size(), 0.0);
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const double keep = rng.uniform();
      const double value = rng.uniform();
      if (keep < fill) v[g.index(i, j)] = value;
    }
  }
  return ScalarField(g, std::move(v));
}

inline double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
