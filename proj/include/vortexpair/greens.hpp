#pragma once

#include <memory>

#include "vortexpair/field.hpp"

namespace vortexpair {

// Half-plane Green's function of -Laplacian with a Dirichlet wall, by the method
// of images:
//   G(x, y) = (1/4pi) log(1 + 4 x2 y2 / |x - y|^2).
// Throws ValidationError for coincident points.
double kernel(Point x, Point y);

// Same function written as the log of the image/direct distance ratio.
double kernel_log_ratio(Point x, Point y);

// Mean of log|r| over the unit square centred on the origin.
inline constexpr double kUnitSquareMeanLog = -1.0611754268825244;  // (ln(1/2) - 3 + pi/2)/2

// Cell average of the free-space part -(1/2pi) log|x - y| over a square cell of
// side h, taken about the cell centre.
double self_direct(double h);

// Value used for the singular diagonal of row j: self_direct(h) plus the regular
// image part evaluated at the centre. Equals (1/2pi)(log(2j+1) - kUnitSquareMeanLog),
// independent of h and always positive.
double diagonal_kernel(const GridSpec& grid, int j);

enum class GreenMethod {
  automatic,  // FFT above a few hundred cells, direct otherwise
  direct,     // O(N^2) reference summation
  fft,
};

// psi0(x) = sum_y G(x, y) zeta(y) h^2 over cells, diagonal term diagonal_kernel * zeta(x) * h^2.
ScalarField apply_green_direct(const ScalarField& zeta);

// Accelerated path. The image sum is folded into a single free-space convolution
// over the odd extension of zeta to 2*ny rows, evaluated with FFTW. One operator
// owns the kernel spectrum of one grid and can be reused across calls.
class GreenOperator {
 public:
  explicit GreenOperator(const GridSpec& grid, GreenMethod method = GreenMethod::automatic);
  ~GreenOperator();
  GreenOperator(GreenOperator&&) noexcept;
  GreenOperator& operator=(GreenOperator&&) noexcept;
  GreenOperator(const GreenOperator&) = delete;
  GreenOperator& operator=(const GreenOperator&) = delete;

  const GridSpec& grid() const { return grid_; }
  GreenMethod method() const { return method_; }

  ScalarField apply(const ScalarField& zeta) const;

 private:
  struct FftState;
  GridSpec grid_;
  GreenMethod method_;
  std::unique_ptr<FftState> fft_;
};

ScalarField apply_green(const ScalarField& zeta, GreenMethod method = GreenMethod::automatic);

// E = (1/2) sum zeta * psi0 * h^2.
double energy(const ScalarField& zeta);
double energy_with_stream(const ScalarField& zeta, const ScalarField& psi0);
// sum f * (G g) * h^2
double interaction(const ScalarField& f, const ScalarField& g);

// E - lambda I. lambda = 0 is accepted so the energy limit can be checked.
double objective(const ScalarField& zeta, double lambda);
double objective_with_stream(const ScalarField& zeta, const ScalarField& psi0, double lambda);

// psi0 - lambda x2, the stream function in the frame moving with the pair.
ScalarField total_stream(const ScalarField& psi0, double lambda);

struct Velocity {
  ScalarField u1;
  ScalarField u2;
};

// u = lambda e1 + perp-grad psi0, i.e. u1 = lambda - d psi0/dx2, u2 = d psi0/dx1.
// Centred differences inside the window, second-order one-sided at the side and
// top edges, odd reflection psi0(x1, -x2) = -psi0(x1, x2) below the wall row.
Velocity velocity_from_stream(const ScalarField& psi0, double lambda);
Velocity velocity(const ScalarField& zeta, double lambda);

// Coefficients of the a-priori bound
//   sup |G zeta| <= (1/4pi) (c_log ||zeta||_1 + c_imp I(|zeta|) + c_l2 ||zeta||_2).
// c_log = log 3 + log 8 + log 9 collects the log(3 max) split, the (log 8 y2^2)_+
// bound, and the lower-strip bound; c_imp = 2 from log y2 <= y2; c_l2 is the
// Cauchy-Schwarz factor (int_{rho<=1} 4 log^2 rho)^(1/2) = (8 pi int_0^1 r log^2 r dr)^(1/2).
struct SupBoundConstants {
  double c_log;
  double c_imp;
  double c_l2;
};
SupBoundConstants sup_bound_constants();

double sup_bound(const NormReport& norms);

// Height above which psi0 - lambda x2 < 0 for any field with these norms.
double support_height_z(const NormReport& norms, double lambda);

}  // namespace vortexpair
