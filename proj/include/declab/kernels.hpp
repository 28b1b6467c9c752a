#pragma once

// Closed-form kernels of the free resolvent in odd dimensions and the free
// cosine propagator in even dimensions, with finite-speed-of-propagation and
// derivative-bound verification against band-limited grid oracles.

#include <complex>
#include <string>
#include <vector>

namespace declab {

// z^{(d-2)/2} H2_{(d-2)/2}(z) = p_d(z) e^{-iz} with p_d a polynomial of
// degree (d-3)/2 (H2 = Hankel function of the second kind, half-integer
// order, so the polynomial is exact).
struct HankelHalfPoly {
  int d = 3;
  std::vector<std::complex<double>> coeff; // coeff[j] multiplies z^j

  std::complex<double> eval(std::complex<double> z) const;
  int degree() const { return int(coeff.size()) - 1; }
};

// Coefficients from the downward spherical recurrence
//   q_0 = i sqrt(2/pi), q_1 = sqrt(2/pi)(i - z),
//   q_m = (2m-1) q_{m-1} - z^2 q_{m-2}.
HankelHalfPoly hankel_half_poly(int d);

// Free resolvent kernel (P0 - lambda^2)^{-1} at distance r in odd dimension,
// via the p_d e^{-i lambda r} factorization; Im lambda <= 0 branch.
std::complex<double> free_kernel_odd(int d, std::complex<double> lambda,
                                     double r);

// d/dlambda^k of the kernel above, in closed form (Leibniz on the
// polynomial-times-exponential factorization).
std::complex<double> free_kernel_odd_deriv(int d, std::complex<double> lambda,
                                           double r, int k);

struct KernelBoundReport {
  int d = 3;
  int k_max = 0;
  // minimal constant making |d^k K0| <= c (r^{k-(d-1)/2} + (k+1)^{(d-3)/2}
  // r^{k-d+2}) over the sampled grids, per k
  std::vector<double> constant;
  bool ok = false;
};

KernelBoundReport kernel_deriv_bound_check(int d, int k_max,
                                           const std::vector<double> &lambda_grid,
                                           const std::vector<double> &r_grid);

// t^{-d} Im(i^{d+1} (1 - (r/t)^2)^{-(d+1)/2}) for even d, r < t. The caller
// multiplies by the calibrated C_d.
double cosine_kernel_even(int d, double t, double r);

struct CosineKernelProfile {
  int d = 2;
  double Cd = 0.0;
  double residual = 0.0;
  int grid_size = 0;
  std::vector<double> z;       // samples of r/t
  std::vector<double> profile; // W(z) samples (un-normalized shape)

  std::string manifest() const; // JSON {d, C_d, residual, grid_size}
};

// Fits C_d by comparing a band-limited mode-sum propagator kernel against
// cosine_kernel_even on r/t in [0, zmax]; Gaussian spectral filter keeps the
// light-cone singularity from ringing into the fit window.
CosineKernelProfile calibrate_Cd(int d, int grid_size, double zmax = 0.5);

// L2 mass of the band-limited cos(t sqrt(P0)) kernel row strictly inside
// |x - y| < 0.9 t divided by total row mass; near zero in odd d (strong
// Huygens), order one in even d. d in {1, 2, 3}.
double huygens_residual(int d, double t, int grid_size);

// CSV dump (r, Re K, Im K) of the odd-d kernel along a radial grid.
std::string kernel_profile_csv(int d, std::complex<double> lambda,
                               const std::vector<double> &r_grid);

} // namespace declab
