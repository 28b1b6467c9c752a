#ifndef DECLAB_THETA_HPP
#define DECLAB_THETA_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace declab {

/// Decay profile Theta(r): positive, strictly decreasing, rapidly decaying.
/// Built-in kinds are exp(-(r+1)^s) and exp(-(r+1)^s (log(r+e))^beta);
/// tabulated profiles use monotone cubic interpolation of (r, Theta) samples.
class ThetaProfile {
public:
  enum class Kind { ExpPower, ExpPowerLog, Tabulated };

  static ThetaProfile exp_power(double s, double c = 1.0, double C = 1.0);
  static ThetaProfile exp_power_log(double s, double beta, double c = 1.0,
                                    double C = 1.0);
  static ThetaProfile tabulated(std::vector<double> r, std::vector<double> theta,
                                double c = 1.0, double C = 1.0);

  Kind kind() const { return kind_; }
  double s() const { return s_; }
  double beta() const { return beta_; }
  double c() const { return c_; }
  double amplitude() const { return C_; }

  // Theta(r); throws std::domain_error for r < 0.
  double operator()(double r) const;

  // j-th derivative of Theta, j in {1, 2}. Closed form for built-in kinds,
  // central differences (step 1e-5*(1+r)) for tabulated profiles.
  double deriv(double r, int j) const;

  // mu(x) = sqrt(Theta(c <x>)), <x> = sqrt(1 + x^2).
  double mu(double x_radius) const;

  // log Theta(r), exact for built-in kinds (avoids underflow at large r).
  double log_theta(double r) const;

  // Checks Theta(r)(r+1)^k -> 0 on a geometric grid up to r = 1e3, k <= 20.
  bool rapid_decay_ok() const;

  std::string serialize() const;
  static ThetaProfile deserialize(const std::string &json_text);

private:
  ThetaProfile() = default;
  Kind kind_ = Kind::ExpPower;
  double s_ = 1.0, beta_ = 0.0, c_ = 1.0, C_ = 1.0;
  // tabulated data and PCHIP slopes
  std::vector<double> r_, th_, slope_;
};

struct ThetaConditionReport {
  double Ctilde = 0.0;                // minimal derivative-domination constant
  std::map<double, double> C1_by_C2;  // minimal product constant C1 per trial C2
  bool violation = false;
};

double theta_eval(const ThetaProfile &profile, double r);
double mu_weight(const ThetaProfile &profile, double x_radius);

// Empirical minimal constants for the derivative-domination and
// product-submultiplicativity conditions on the supplied grids.
ThetaConditionReport
check_theta_conditions(const ThetaProfile &profile,
                       const std::vector<double> &r_grid,
                       const std::vector<std::pair<double, double>> &pair_grid);

// sup_{r>=0} (r+1)^k sqrt(Theta(r)) by geometric bracket scan + golden section.
double compute_m_tilde(const ThetaProfile &profile, int k);

// log of compute_m_tilde (usable when the plain value overflows).
double compute_log_m_tilde(const ThetaProfile &profile, int k);

} // namespace declab

#endif
