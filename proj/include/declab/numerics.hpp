#ifndef DECLAB_NUMERICS_HPP
#define DECLAB_NUMERICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace declab {

// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)> &f, double a,
                        double b, double abs_tol, int max_depth = 40);

// Composite Gauss-Legendre (5-point per panel) over [a, b].
double gauss_panels(const std::function<double(double)> &f, double a, double b,
                    int panels);

// Maximize a unimodal function on [a, b] by golden-section search.
// Returns (argmax, max). rel_tol applies to the bracket width.
std::pair<double, double>
golden_section_max(const std::function<double(double)> &f, double a, double b,
                   double rel_tol = 1e-10);

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log k!
inline double log_factorial(int k) { return std::lgamma(double(k) + 1.0); }

// Ordinary least squares fit y = slope*x + intercept; returns (slope, intercept).
std::pair<double, double> linear_fit(const std::vector<double> &x,
                                     const std::vector<double> &y);

} // namespace declab

#endif
