#include "declab/cutoff.hpp"

#include "declab/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace declab {

using nlohmann::json;

namespace {
constexpr std::array<double, 4> kGluePoints = {0.5, 0.75, 1.75, 2.0};
}

double GevreyCutoff::bump_a(double x, double a) {
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x, -a));
}

std::complex<double> GevreyCutoff::bump_a(std::complex<double> z, double a) {
  // principal branch of z^{-a}; callers keep z away from the cut
  return std::exp(-std::pow(z, -a));
}

double GevreyCutoff::rho_a(double x, double a) {
  double fx = bump_a(x, a);
  if (x >= 1.0) return 1.0;
  double denom = fx + bump_a(1.0 - x, a);
  return fx / denom;
}

double GevreyCutoff::chi(double sigma) const {
  if (sigma <= 0.5 || sigma >= 2.0) return 0.0;
  return rho_a(4.0 * (sigma - 0.5), a_) * rho_a(4.0 * (2.0 - sigma), a_);
}

std::complex<double> GevreyCutoff::chi_extension(std::complex<double> z,
                                                double center) const {
  // analytic extension of the piece containing the (real) contour center
  if (center <= 0.5 || center >= 2.0) return 0.0;
  if (center > 0.75 && center < 1.75) return 1.0;
  auto rho_c = [&](std::complex<double> w) {
    std::complex<double> fw = bump_a(w, a_);
    return fw / (fw + bump_a(1.0 - w, a_));
  };
  if (center < 0.75) return rho_c(4.0 * (z - 0.5));
  return rho_c(4.0 * (2.0 - z));
}

double GevreyCutoff::zeta_deriv(double sigma, int order) const {
  if (order < 0 || order > 30)
    throw std::invalid_argument("zeta_deriv: order in [0, 30]");
  if (order == 0) return zeta(sigma);
  if (sigma <= 0.5 || sigma >= 2.0) return 0.0;
  if (sigma > 0.75 && sigma < 1.75) return 0.0; // plateau
  double dist = std::numeric_limits<double>::infinity();
  for (double g : kGluePoints) dist = std::min(dist, std::abs(sigma - g));
  if (dist < 1e-8)
    throw std::runtime_error("zeta_deriv: contour radius collapses at gluing point");
  return zeta_deriv_err(sigma, order).first;
}

std::pair<double, double> GevreyCutoff::zeta_deriv_err(double sigma,
                                                       int order) const {
  double dist = std::numeric_limits<double>::infinity();
  for (double g : kGluePoints) dist = std::min(dist, std::abs(sigma - g));
  double R = dist / 2.0;
  int N = 64 * (order + 1);
  std::complex<double> acc = 0.0;
  double mx = 0.0;
  for (int j = 0; j < N; ++j) {
    double th = 2.0 * M_PI * j / N;
    std::complex<double> e(std::cos(th), std::sin(th));
    std::complex<double> z = sigma + R * e;
    std::complex<double> cz = chi_extension(z, sigma);
    mx = std::max(mx, std::abs(cz));
    // e^{-ik theta} = conj(e)^k
    acc += cz * std::pow(std::conj(e), order);
  }
  double scale = std::exp(log_factorial(order) - order * std::log(R)) / I_;
  double val = acc.real() / N * scale;
  // accumulated rounding in the N-term sum, amplified by k!/R^k
  double err = 8.0 * std::numeric_limits<double>::epsilon() * mx * scale;
  return {val, err};
}

double GevreyCutoff::zeta_deriv_sup(int order) const {
  if (order == 0) return 1.0 / I_;
  // log |zeta^(k)| at distance e^ld from a ramp edge, -inf when the point is
  // roundoff-dominated (the true derivative is Gevrey-flat there, so such
  // points cannot carry the sup)
  auto log_at = [&](double edge, int dir, double ld) {
    double sigma = edge + dir * std::exp(ld);
    auto [v, e] = zeta_deriv_err(sigma, order);
    double av = std::abs(v);
    if (av <= 0.0 || e >= 0.1 * av)
      return -std::numeric_limits<double>::infinity();
    return std::log(av);
  };
  double best = 0.0;
  const std::array<std::pair<double, int>, 4> edges = {
      {{0.5, +1}, {0.75, -1}, {1.75, +1}, {2.0, -1}}};
  for (auto [edge, dir] : edges) {
    const double lo = std::log(1e-4), hi = std::log(0.125);
    const int M = 120;
    double bl = -std::numeric_limits<double>::infinity(), bld = lo;
    for (int i = 0; i <= M; ++i) {
      double ld = lo + (hi - lo) * i / M;
      double lv = log_at(edge, dir, ld);
      if (lv > bl) bl = lv, bld = ld;
    }
    if (bl == -std::numeric_limits<double>::infinity()) continue;
    double w = (hi - lo) / M;
    auto [ld, lv] = golden_section_max(
        [&](double t) { return log_at(edge, dir, t); },
        std::max(lo, bld - w), std::min(hi, bld + w), 1e-9);
    best = std::max(best, std::exp(std::max(lv, bl)));
  }
  return best;
}

double GevreyCutoff::psi(double lambda) const {
  if (lambda <= 0.5) return 0.0;
  if (lambda >= 2.0) return 1.0;
  // cumulative table lookup with linear interpolation between fine nodes
  auto it = std::upper_bound(psi_grid_.begin(), psi_grid_.end(), lambda);
  size_t i = size_t(it - psi_grid_.begin()) - 1;
  if (i + 1 >= psi_grid_.size()) return psi_val_.back();
  double t = (lambda - psi_grid_[i]) / (psi_grid_[i + 1] - psi_grid_[i]);
  return (1.0 - t) * psi_val_[i] + t * psi_val_[i + 1];
}

std::string GevreyCutoff::serialize() const {
  json j;
  j["a"] = a_;
  j["s"] = s_;
  j["I"] = I_;
  return j.dump();
}

GevreyCutoff GevreyCutoff::deserialize(const std::string &text) {
  json j = json::parse(text);
  return build_cutoff(j.at("s"));
}

GevreyCutoff build_cutoff(double s) {
  if (s <= 0.0) throw std::domain_error("build_cutoff: s > 0 required");
  if (s >= 1.0)
    throw std::domain_error("build_cutoff: no admissible cutoff for s >= 1");
  GevreyCutoff cut;
  cut.s_ = s;
  cut.a_ = s / (1.0 - s); // Gevrey order 1 + 1/a = 1/s
  auto chi = [&](double x) { return cut.chi(x); };
  cut.I_ = adaptive_simpson(chi, 0.5, 2.0, 1e-12);
  if (cut.I_ <= 1.0) throw std::runtime_error("build_cutoff: bad normalization");
  // cumulative table for psi (5-point Gauss per cell, machine accurate)
  const int cells = 3000;
  cut.psi_grid_.resize(cells + 1);
  cut.psi_val_.resize(cells + 1);
  double h = 1.5 / cells, acc = 0.0;
  cut.psi_grid_[0] = 0.5;
  cut.psi_val_[0] = 0.0;
  for (int i = 0; i < cells; ++i) {
    double x0 = 0.5 + i * h, x1 = x0 + h;
    acc += gauss_panels(chi, x0, x1, 1);
    cut.psi_grid_[i + 1] = x1;
    cut.psi_val_[i + 1] = acc / cut.I_;
  }
  return cut;
}

double cutoff_eval(const GevreyCutoff &cut, double sigma, int order) {
  return cut.zeta_deriv(sigma, order);
}

double psi_eval(const GevreyCutoff &cut, double lambda) {
  return cut.psi(lambda);
}

} // namespace declab
