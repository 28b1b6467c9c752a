#ifndef DECLAB_CUTOFF_HPP
#define DECLAB_CUTOFF_HPP

#include <complex>
#include <string>
#include <vector>

namespace declab {

/// Compactly supported mollifier zeta on [1/2, 2] of Gevrey order 1/s,
/// built from the flat bump f(x) = exp(-x^{-a}) with a = s/(1-s):
///   rho(x) = f(x) / (f(x) + f(1-x)),
///   chi(sigma) = rho(4(sigma - 1/2)) rho(4(2 - sigma)),
///   zeta = chi / I with I the integral of chi.
/// Derivatives are taken by trapezoid quadrature of the Cauchy integral over
/// a circle whose radius is half the distance to the nearest gluing point of
/// the piecewise definition.
class GevreyCutoff {
public:
  double a() const { return a_; }
  double s() const { return s_; }
  double normalization() const { return I_; } // I = integral of chi, > 1

  double chi(double sigma) const;
  double zeta(double sigma) const { return chi(sigma) / I_; }

  // k-th derivative of zeta (k = 0 gives the pointwise value). k <= 30.
  double zeta_deriv(double sigma, int order) const;

  // sup over sigma of |zeta^(k)|, scanning the two ramps. Points too close
  // to a gluing point are skipped when the quadrature roundoff bound
  // (eps * k! / R^k) would dominate the (Gevrey-flat) true value there.
  double zeta_deriv_sup(int order) const;

  // psi(lambda) = cumulative integral of zeta; 0 below 1/2, 1 above 2.
  double psi(double lambda) const;

  std::string serialize() const; // parameters only; rebuilt deterministically
  static GevreyCutoff deserialize(const std::string &json_text);

  friend GevreyCutoff build_cutoff(double s);

  static double bump_a(double x, double a);
  static std::complex<double> bump_a(std::complex<double> z, double a);
  static double rho_a(double x, double a);

private:
  GevreyCutoff() = default;
  std::complex<double> chi_extension(std::complex<double> z,
                                     double center) const;
  // value plus a roundoff-error estimate for the contour quadrature
  std::pair<double, double> zeta_deriv_err(double sigma, int order) const;
  double a_ = 1.0, s_ = 0.5, I_ = 1.0;
  std::vector<double> psi_grid_, psi_val_; // cumulative table on [1/2, 2]
};

// Throws std::domain_error for s <= 0 and for s >= 1 (no such cutoff exists
// in the analytic class).
GevreyCutoff build_cutoff(double s);

double cutoff_eval(const GevreyCutoff &cut, double sigma, int order);
double psi_eval(const GevreyCutoff &cut, double lambda);

} // namespace declab

#endif
