#pragma once

// Verification operations on the discretized resolvent: weighted derivative
// norms in the lower half-plane, uniform high-frequency estimates, Hoelder
// continuity up to the real axis, the dilation commutator identity, the
// time-frequency duality of the wave group, and low-frequency boundedness.

#include "declab/operator.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace declab {

// k-th lambda-derivative of (e - lambda^2)^{-1} in closed form.
std::complex<double> resolvent_mode_deriv(double e, std::complex<double> lambda,
                                          int k);

// || mu grad^ell d^k/dlambda^k (P - (lambda - i eps)^2)^{-1} mu || by the
// modewise closed form in the eigenbasis plus power iteration.
double weighted_resolvent_deriv_norm(const DiscreteOperator &op,
                                     const SpectralDecomposition &dec,
                                     double lambda, int ell, int k,
                                     const Eigen::VectorXd &mu, double eps);

// d^k/dlambda^k (P - lambda^2)^{-1} x through the derivative recursion
// D_k = R (2 k lambda D_{k-1} + k(k-1) D_{k-2}) evaluated by repeated solves.
Eigen::VectorXcd resolvent_deriv_apply(const DiscreteOperator &op,
                                       std::complex<double> lambda, int k,
                                       const Eigen::VectorXcd &x,
                                       const BcSpec &bc = {});

// || mu grad^ell D_k mu || via boundary-condition solves (usable on the real
// axis, where the spectral eps-shifted path is not); the adjoint needed by
// the power iteration uses transposed solves.
double weighted_deriv_norm_bc(const DiscreteOperator &op,
                              std::complex<double> lambda, int ell, int k,
                              const Eigen::VectorXd &mu,
                              const BcSpec &bc = {BcMode::Radiation});

struct UniformEstimateReport {
  // minimal constant per (alpha, beta) block in
  // ||W grad^a R grad^b W|| <= C lambda^{a+b-1}, W = <x>^{-s}
  std::array<std::array<double, 2>, 2> constant{};
  double sup_constant = 0.0;
  bool eps_stable = false;
  bool blowup = false;
};

// Radiation (or absorbing-layer) solves keep the answer stable as eps -> 0,
// which Dirichlet spectra cannot do below the level spacing.
UniformEstimateReport uniform_estimate_check(const DiscreteOperator &op,
                                             const std::vector<double> &lambdas,
                                             double eps, double s,
                                             const BcSpec &bc = {
                                                 BcMode::Radiation, 0.25, 1.0});

struct HolderReport {
  double theta = 0.0; // fitted Hoelder exponent of eps -> W R(lambda-i eps) W
  double C = 0.0;
  bool cauchy = false; // successive difference norms decreasing
  bool pass = false;   // theta > 0.3
  std::vector<double> diff_norms;
};

HolderReport lap_continuity_check(const DiscreteOperator &op, double lambda,
                                  double s, const std::vector<double> &eps_seq,
                                  const BcSpec &bc = {BcMode::Radiation, 0.25,
                                                      1.0});

// Normalized residual of the commutator identity
//   -lambda^2 W R^2 W = 1/2 W R (d r) W + ... - 1/2 W (r d) R W
// in reduced coordinates; vanishes with the grid spacing.
double dilation_identity_residual(const DiscreteOperator &op_free,
                                  std::complex<double> lambda, double s = 2.0);

// Relative deviation of -i * Simpson quadrature of e^{-i t lambda} cos(t sqrt(P0))
// on [0, T] from lambda (P0 - lambda^2)^{-1}, modewise in the eigenbasis.
double fourier_duality_check(const SpectralDecomposition &dec_free,
                             std::complex<double> lambda, double T, int n_t);

struct LowFreqReport {
  std::vector<double> lambdas;
  std::vector<double> values; // sum over ell of the weighted resolvent norms
  double sup = 0.0;
  bool bounded = false;
};

LowFreqReport lowfreq_check(const DiscreteOperator &op,
                            const std::vector<double> &lambdas, double eps,
                            const Eigen::VectorXd &mu,
                            const BcSpec &bc = {BcMode::Radiation, 0.25, 1.0});

struct SweepRow {
  double lambda = 0.0, eps = 0.0;
  int ell = 0, k = 0;
  double log_norm = 0.0;
  std::string bc_mode = "dirichlet";
  std::string pcase = "a";
};

std::string sweep_csv(const std::vector<SweepRow> &rows);

} // namespace declab
