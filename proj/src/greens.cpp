#include "vortexpair/greens.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "vortexpair/errors.hpp"
#include "vortexpair/parallel.hpp"
#include "vortexpair/summation.hpp"

namespace vortexpair {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
constexpr double kInvFourPi = 0.25 / std::numbers::pi;
constexpr std::size_t kFftThreshold = 256;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
int fft_friendly(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace

double kernel(Point x, Point y) {
  const double d1 = x.x1 - y.x1;
  const double d2 = x.x2 - y.x2;
  const double rho2 = d1 * d1 + d2 * d2;
  if (rho2 == 0.0) throw ValidationError("kernel: coincident points");
  return kInvFourPi * std::log1p(4.0 * x.x2 * y.x2 / rho2);
}

double kernel_log_ratio(Point x, Point y) {
  const double d1 = x.x1 - y.x1;
  const double direct = d1 * d1 + (x.x2 - y.x2) * (x.x2 - y.x2);
  if (direct == 0.0) throw ValidationError("kernel_log_ratio: coincident points");
  const double image = d1 * d1 + (x.x2 + y.x2) * (x.x2 + y.x2);
  return kInvFourPi * std::log(image / direct);
}

double self_direct(double h) { return -kInvTwoPi * (std::log(h) + kUnitSquareMeanLog); }

double diagonal_kernel(const GridSpec& grid, int j) {
  return self_direct(grid.h()) + kInvTwoPi * std::log(2.0 * grid.x2(j));
}

ScalarField apply_green_direct(const ScalarField& zeta) {
  const GridSpec& g = zeta.grid();
  const double area = g.cell_area();
  std::vector<double> psi(g.size(), 0.0);

  std::vector<std::size_t> sources;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (zeta[k] != 0.0) sources.push_back(k);
  }

  parallel_for(static_cast<std::size_t>(g.ny()), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < g.nx(); ++i) {
      const Point x = g.center(i, j);
      const std::size_t target = g.index(i, j);
      CompensatedSum acc;
      for (std::size_t s : sources) {
        const double w = s == target ? diagonal_kernel(g, j)
                                     : kernel(x, g.center(g.column_of(s), g.row_of(s)));
        acc.add(w * zeta[s]);
      }
      psi[target] = acc.value() * area;
    }
  });
  return ScalarField(g, std::move(psi));
}

struct GreenOperator::FftState {
  int m1 = 0;  // x1 extent of the periodic box
  int m2 = 0;  // x2 extent
  int mc = 0;  // complex x1 extent, m1/2 + 1
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_complex* kernel_hat = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~FftState() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spectrum);
    fftw_free(kernel_hat);
  }
};

GreenOperator::GreenOperator(const GridSpec& grid, GreenMethod method) : grid_(grid), method_(method) {
  if (method_ == GreenMethod::automatic) {
    method_ = grid.size() > kFftThreshold ? GreenMethod::fft : GreenMethod::direct;
  }
  if (method_ != GreenMethod::fft) return;

  const int nx = grid.nx();
  const int ny = grid.ny();
  auto st = std::make_unique<FftState>();
  // Offsets needed: d1 in [-(nx-1), nx-1], d2 in [-(ny-1), 2ny-1].
  st->m1 = fft_friendly(2 * nx - 1);
  st->m2 = fft_friendly(3 * ny - 1);
  st->mc = st->m1 / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(st->m1) * st->m2;
  const std::size_t ncomplex = static_cast<std::size_t>(st->mc) * st->m2;
  st->real = fftw_alloc_real(nreal);
  st->spectrum = fftw_alloc_complex(ncomplex);
  st->kernel_hat = fftw_alloc_complex(ncomplex);
  {
    std::lock_guard lock(planner_mutex());
    st->forward = fftw_plan_dft_r2c_2d(st->m2, st->m1, st->real, st->spectrum, FFTW_ESTIMATE);
    st->backward = fftw_plan_dft_c2r_2d(st->m2, st->m1, st->spectrum, st->real, FFTW_ESTIMATE);
  }

  const double h = grid.h();
  std::fill(st->real, st->real + nreal, 0.0);
  for (int d2 = -(ny - 1); d2 <= 2 * ny - 1; ++d2) {
    const int e2 = (d2 % st->m2 + st->m2) % st->m2;
    for (int d1 = -(nx - 1); d1 <= nx - 1; ++d1) {
      const int e1 = (d1 % st->m1 + st->m1) % st->m1;
      const double r = h * std::hypot(static_cast<double>(d1), static_cast<double>(d2));
      st->real[static_cast<std::size_t>(e2) * st->m1 + e1] =
          (d1 == 0 && d2 == 0) ? self_direct(h) : -kInvTwoPi * std::log(r);
    }
  }
  fftw_execute_dft_r2c(st->forward, st->real, st->kernel_hat);
  fft_ = std::move(st);
}

GreenOperator::~GreenOperator() = default;
GreenOperator::GreenOperator(GreenOperator&&) noexcept = default;
GreenOperator& GreenOperator::operator=(GreenOperator&&) noexcept = default;

ScalarField GreenOperator::apply(const ScalarField& zeta) const {
  if (!zeta.grid().matches(grid_)) throw ValidationError("apply_green: grid mismatch");
  if (method_ == GreenMethod::direct) return apply_green_direct(zeta);

  FftState& st = *fft_;
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const std::size_t nreal = static_cast<std::size_t>(st.m1) * st.m2;
  std::fill(st.real, st.real + nreal, 0.0);
  // Odd extension: extended row e in [0, 2ny) holds x2 = (e - ny + 1/2) h.
  for (int j = 0; j < ny; ++j) {
    double* upper = st.real + static_cast<std::size_t>(ny + j) * st.m1;
    double* lower = st.real + static_cast<std::size_t>(ny - 1 - j) * st.m1;
    for (int i = 0; i < nx; ++i) {
      upper[i] = zeta.at(i, j);
      lower[i] = -zeta.at(i, j);
    }
  }
  fftw_execute_dft_r2c(st.forward, st.real, st.spectrum);
  const std::size_t ncomplex = static_cast<std::size_t>(st.mc) * st.m2;
  for (std::size_t k = 0; k < ncomplex; ++k) {
    const double ar = st.spectrum[k][0];
    const double ai = st.spectrum[k][1];
    const double br = st.kernel_hat[k][0];
    const double bi = st.kernel_hat[k][1];
    st.spectrum[k][0] = ar * br - ai * bi;
    st.spectrum[k][1] = ar * bi + ai * br;
  }
  fftw_execute_dft_c2r(st.backward, st.spectrum, st.real);

  const double scale = grid_.cell_area() / static_cast<double>(nreal);
  std::vector<double> psi(grid_.size());
  for (int j = 0; j < ny; ++j) {
    const double* row = st.real + static_cast<std::size_t>(ny + j) * st.m1;
    for (int i = 0; i < nx; ++i) psi[grid_.index(i, j)] = row[i] * scale;
  }
  return ScalarField(grid_, std::move(psi));
}

ScalarField apply_green(const ScalarField& zeta, GreenMethod method) {
  if (method == GreenMethod::direct) return apply_green_direct(zeta);
  return GreenOperator(zeta.grid(), method).apply(zeta);
}

double energy_with_stream(const ScalarField& zeta, const ScalarField& psi0) {
  throw_if_mismatched(zeta, psi0, "energy");
  CompensatedSum acc;
  for (std::size_t k = 0; k < zeta.size(); ++k) acc.add(zeta[k] * psi0[k]);
  return 0.5 * acc.value() * zeta.grid().cell_area();
}

double energy(const ScalarField& zeta) { return energy_with_stream(zeta, apply_green(zeta)); }

double interaction(const ScalarField& f, const ScalarField& g) {
  return 2.0 * energy_with_stream(f, apply_green(g));
}

double objective_with_stream(const ScalarField& zeta, const ScalarField& psi0, double lambda) {
  if (lambda < 0.0) throw ValidationError("objective: lambda must be >= 0");
  return energy_with_stream(zeta, psi0) - lambda * impulse(zeta);
}

double objective(const ScalarField& zeta, double lambda) {
  return objective_with_stream(zeta, apply_green(zeta), lambda);
}

ScalarField total_stream(const ScalarField& psi0, double lambda) {
  const GridSpec& g = psi0.grid();
  std::vector<double> out(psi0.size());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) out[g.index(i, j)] = psi0.at(i, j) - lambda * g.x2(j);
  }
  return ScalarField(g, std::move(out));
}

Velocity velocity_from_stream(const ScalarField& psi0, double lambda) {
  const GridSpec& g = psi0.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double inv2h = 0.5 / g.h();
  std::vector<double> u1(g.size());
  std::vector<double> u2(g.size());
  auto p = [&](int i, int j) { return j < 0 ? -psi0.at(i, -1 - j) : psi0.at(i, j); };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double d1 = 0.0;
      if (nx == 1) {
        d1 = 0.0;
      } else if (i == 0) {
        d1 = nx >= 3 ? (-3.0 * p(0, j) + 4.0 * p(1, j) - p(2, j)) * inv2h : (p(1, j) - p(0, j)) * 2.0 * inv2h;
      } else if (i == nx - 1) {
        d1 = nx >= 3 ? (3.0 * p(i, j) - 4.0 * p(i - 1, j) + p(i - 2, j)) * inv2h
                     : (p(i, j) - p(i - 1, j)) * 2.0 * inv2h;
      } else {
        d1 = (p(i + 1, j) - p(i - 1, j)) * inv2h;
      }

      double d2 = 0.0;
      if (j < ny - 1) {
        d2 = (p(i, j + 1) - p(i, j - 1)) * inv2h;  // j - 1 = -1 uses the odd reflection
      } else if (ny >= 3) {
        d2 = (3.0 * p(i, j) - 4.0 * p(i, j - 1) + p(i, j - 2)) * inv2h;
      } else {
        d2 = (p(i, j) - p(i, j - 1)) * 2.0 * inv2h;
      }
      u1[g.index(i, j)] = lambda - d2;
      u2[g.index(i, j)] = d1;
    }
  }
  return {ScalarField(g, std::move(u1)), ScalarField(g, std::move(u2))};
}

Velocity velocity(const ScalarField& zeta, double lambda) {
  return velocity_from_stream(apply_green(zeta), lambda);
}

SupBoundConstants sup_bound_constants() {
  return {std::log(216.0), 2.0, std::sqrt(2.0 * std::numbers::pi)};
}

double sup_bound(const NormReport& n) {
  const SupBoundConstants c = sup_bound_constants();
  return kInvFourPi * (c.c_log * n.l1 + c.c_imp * n.impulse_of_abs + c.c_l2 * n.l2);
}

double support_height_z(const NormReport& n, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("support_height_z: lambda must be > 0");
  return sup_bound(n) / lambda;
}

}  // namespace vortexpair
