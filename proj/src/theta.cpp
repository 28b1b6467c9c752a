#include "declab/theta.hpp"

#include "declab/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace declab {

using nlohmann::json;

namespace {

// Fritsch-Carlson monotone cubic slopes.
std::vector<double> pchip_slopes(const std::vector<double> &x,
                                 const std::vector<double> &y) {
  size_t n = x.size();
  std::vector<double> d(n - 1), m(n);
  for (size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0)
      m[i] = 0.0;
    else {
      double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // clamp to preserve monotonicity
  for (size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
    } else {
      double a = m[i] / d[i], b = m[i + 1] / d[i];
      double s2 = a * a + b * b;
      if (s2 > 9.0) {
        double t = 3.0 / std::sqrt(s2);
        m[i] = t * a * d[i];
        m[i + 1] = t * b * d[i];
      }
    }
  }
  return m;
}

double pchip_eval(const std::vector<double> &x, const std::vector<double> &y,
                  const std::vector<double> &m, double xi) {
  auto it = std::upper_bound(x.begin(), x.end(), xi);
  size_t i = (it == x.begin()) ? 0 : size_t(it - x.begin()) - 1;
  if (i + 1 >= x.size()) i = x.size() - 2;
  double h = x[i + 1] - x[i], t = (xi - x[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
}

} // namespace

ThetaProfile ThetaProfile::exp_power(double s, double c, double C) {
  if (s <= 0.0 || s > 1.0)
    throw std::domain_error("ThetaProfile: require 0 < s <= 1");
  ThetaProfile p;
  p.kind_ = Kind::ExpPower;
  p.s_ = s;
  p.c_ = c;
  p.C_ = C;
  return p;
}

ThetaProfile ThetaProfile::exp_power_log(double s, double beta, double c,
                                         double C) {
  if (s <= 0.0 || s > 1.0 || beta <= 0.0)
    throw std::domain_error("ThetaProfile: require 0 < s <= 1, beta > 0");
  ThetaProfile p;
  p.kind_ = Kind::ExpPowerLog;
  p.s_ = s;
  p.beta_ = beta;
  p.c_ = c;
  p.C_ = C;
  return p;
}

ThetaProfile ThetaProfile::tabulated(std::vector<double> r,
                                     std::vector<double> theta, double c,
                                     double C) {
  if (r.size() != theta.size() || r.size() < 4)
    throw std::invalid_argument("ThetaProfile: need >= 4 matching samples");
  for (size_t i = 0; i + 1 < r.size(); ++i)
    if (r[i + 1] <= r[i] || theta[i + 1] >= theta[i])
      throw std::invalid_argument(
          "ThetaProfile: samples must be increasing in r, decreasing in value");
  if (theta.back() <= 0.0)
    throw std::invalid_argument("ThetaProfile: values must stay positive");
  ThetaProfile p;
  p.kind_ = Kind::Tabulated;
  p.c_ = c;
  p.C_ = C;
  p.slope_ = pchip_slopes(r, theta);
  p.r_ = std::move(r);
  p.th_ = std::move(theta);
  return p;
}

double ThetaProfile::log_theta(double r) const {
  if (r < 0.0) throw std::domain_error("Theta: r must be nonnegative");
  double u = r + 1.0;
  switch (kind_) {
  case Kind::ExpPower:
    return -std::pow(u, s_);
  case Kind::ExpPowerLog:
    return -std::pow(u, s_) * std::pow(std::log(r + std::exp(1.0)), beta_);
  case Kind::Tabulated: {
    double rr = std::min(std::max(r, r_.front()), r_.back());
    return std::log(pchip_eval(r_, th_, slope_, rr));
  }
  }
  return 0.0;
}

double ThetaProfile::operator()(double r) const { return std::exp(log_theta(r)); }

double ThetaProfile::deriv(double r, int j) const {
  if (r < 0.0) throw std::domain_error("Theta: r must be nonnegative");
  if (j != 1 && j != 2) throw std::invalid_argument("Theta: j in {1,2}");
  if (kind_ == Kind::Tabulated) {
    double h = 1e-5 * (1.0 + r);
    if (r - (j == 1 ? h : h) < r_.front() || r + h > r_.back())
      throw std::runtime_error("Theta: tabulated range too coarse for differencing");
    auto f = [&](double x) { return (*this)(x); };
    if (j == 1) return (f(r + h) - f(r - h)) / (2.0 * h);
    return (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
  }
  double u = r + 1.0;
  double g1, g2; // derivatives of -log Theta
  if (kind_ == Kind::ExpPower) {
    g1 = s_ * std::pow(u, s_ - 1.0);
    g2 = s_ * (s_ - 1.0) * std::pow(u, s_ - 2.0);
  } else {
    double e = std::exp(1.0);
    double L = std::log(r + e), w = 1.0 / (r + e);
    g1 = s_ * std::pow(u, s_ - 1.0) * std::pow(L, beta_) +
         std::pow(u, s_) * beta_ * std::pow(L, beta_ - 1.0) * w;
    g2 = s_ * (s_ - 1.0) * std::pow(u, s_ - 2.0) * std::pow(L, beta_) +
         2.0 * s_ * std::pow(u, s_ - 1.0) * beta_ * std::pow(L, beta_ - 1.0) * w +
         std::pow(u, s_) * beta_ * (beta_ - 1.0) * std::pow(L, beta_ - 2.0) * w * w -
         std::pow(u, s_) * beta_ * std::pow(L, beta_ - 1.0) * w * w;
  }
  double th = (*this)(r);
  return (j == 1) ? -g1 * th : (g1 * g1 - g2) * th;
}

double ThetaProfile::mu(double x_radius) const {
  if (x_radius < 0.0) throw std::domain_error("mu: radius must be nonnegative");
  double jap = std::sqrt(1.0 + x_radius * x_radius);
  return std::exp(0.5 * log_theta(c_ * jap));
}

bool ThetaProfile::rapid_decay_ok() const {
  // Theta(r)(r+1)^k -> 0 for every k iff -log Theta / log(r+1) is unbounded.
  // On the geometric grid up to 1e3 we require that ratio to be increasing
  // (monitored for k <= 20 only through the grid extent, so a polynomially
  // decaying profile is rejected by its flat ratio).
  // The ratio can dip at moderate r before growing, so instead of demanding
  // monotonicity we sample three log-equispaced points and ask for increments
  // that grow: a polynomially decaying profile has a ratio converging to the
  // exponent (shrinking increments), a rapidly decaying one diverges.
  double rmax = 1e3;
  if (kind_ == Kind::Tabulated) rmax = std::min(rmax, r_.back());
  if (rmax < 8.0) return false;  // not enough range to judge
  double L = std::log(rmax);
  double ratio[3];
  for (int i = 0; i < 3; ++i) {
    double r = std::exp(L * (i + 1) / 3.0);
    ratio[i] = -log_theta(r) / std::log1p(r);
  }
  double d1 = ratio[1] - ratio[0], d2 = ratio[2] - ratio[1];
  return d1 > 0.0 && d2 > d1 * (1.0 + 1e-6);
}

std::string ThetaProfile::serialize() const {
  json j;
  j["kind"] = (kind_ == Kind::ExpPower      ? "exp-power"
               : kind_ == Kind::ExpPowerLog ? "exp-power-log"
                                            : "tabulated");
  j["s"] = s_;
  j["beta"] = beta_;
  j["c"] = c_;
  j["C"] = C_;
  if (kind_ == Kind::Tabulated) {
    j["r"] = r_;
    j["values"] = th_;
  }
  return j.dump();
}

ThetaProfile ThetaProfile::deserialize(const std::string &text) {
  json j = json::parse(text);
  std::string kind = j.at("kind");
  if (kind == "exp-power")
    return exp_power(j.at("s"), j.at("c"), j.at("C"));
  if (kind == "exp-power-log")
    return exp_power_log(j.at("s"), j.at("beta"), j.at("c"), j.at("C"));
  return tabulated(j.at("r").get<std::vector<double>>(),
                   j.at("values").get<std::vector<double>>(), j.at("c"),
                   j.at("C"));
}

double theta_eval(const ThetaProfile &profile, double r) { return profile(r); }

double mu_weight(const ThetaProfile &profile, double x_radius) {
  return profile.mu(x_radius);
}

ThetaConditionReport
check_theta_conditions(const ThetaProfile &profile,
                       const std::vector<double> &r_grid,
                       const std::vector<std::pair<double, double>> &pair_grid) {
  if (r_grid.empty() || pair_grid.empty())
    throw std::invalid_argument("check_theta_conditions: empty grid");
  ThetaConditionReport rep;
  for (double r : r_grid)
    for (int j = 1; j <= 2; ++j)
      rep.Ctilde = std::max(rep.Ctilde, std::abs(profile.deriv(r, j)) / profile(r));
  for (double C2 : {0.5, 1.0, 2.0}) {
    double logC1 = -std::numeric_limits<double>::infinity();
    for (auto [r1, r2] : pair_grid)
      logC1 = std::max(logC1, profile.log_theta(r1) + profile.log_theta(r2) -
                                  profile.log_theta(C2 * (r1 + r2)));
    rep.C1_by_C2[C2] = std::exp(logC1);
    if (!std::isfinite(logC1)) rep.violation = true;
  }
  if (!std::isfinite(rep.Ctilde)) rep.violation = true;
  return rep;
}

double compute_log_m_tilde(const ThetaProfile &profile, int k) {
  if (k < 0) throw std::domain_error("compute_m_tilde: k >= 0");
  // objective in log r-space; log(1+r) substitution keeps the bracket tight
  auto obj = [&](double lr) {
    double r = std::expm1(lr);
    return k * std::log1p(r) + 0.5 * profile.log_theta(r);
  };
  // bracket the maximum by geometric scan
  double best = obj(0.0), prev = best;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (double r = 0.5; r <= 1e9; r *= 2.0) {
    double lr = std::log1p(r);
    double v = obj(lr);
    if (v < prev) {
      hi = lr;
      lo = std::max(0.0, std::log1p(r / 4.0));
      bracketed = true;
      break;
    }
    prev = v;
  }
  if (!bracketed)
    throw std::runtime_error("compute_m_tilde: objective unbounded on scan range");
  auto [arg, val] = golden_section_max(obj, lo, hi, 1e-12);
  (void)arg;
  return std::max(val, best);
}

double compute_m_tilde(const ThetaProfile &profile, int k) {
  return std::exp(compute_log_m_tilde(profile, k));
}

} // namespace declab
