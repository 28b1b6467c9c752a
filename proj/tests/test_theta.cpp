#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "declab/theta.hpp"
#include "declab/numerics.hpp"

#include <cmath>
#include <random>

using namespace declab;

TEST_CASE("theta_eval closed forms") {
  auto p1 = ThetaProfile::exp_power(1.0);
  CHECK(p1(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  auto ph = ThetaProfile::exp_power(0.5);
  CHECK(ph(3.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  auto pl = ThetaProfile::exp_power_log(0.5, 1.0);
  CHECK(pl(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(p1(-0.1), std::domain_error);
}

TEST_CASE("theta is positive and strictly decreasing") {
  for (auto p : {ThetaProfile::exp_power(1.0), ThetaProfile::exp_power(0.5),
                 ThetaProfile::exp_power_log(0.5, 2.0)}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 0.0; r <= 50.0; r += 0.37) {
      double v = p(r);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(p.rapid_decay_ok());
  }
}

TEST_CASE("mu_weight") {
  auto p1 = ThetaProfile::exp_power(1.0, 1.0);
  CHECK(mu_weight(p1, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  auto p2 = ThetaProfile::exp_power(1.0, 2.0);
  CHECK(mu_weight(p2, 0.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
  // composition cross-check against theta_eval
  auto ph = ThetaProfile::exp_power(0.5, 1.0);
  double x = std::sqrt(3.0);
  CHECK(mu_weight(ph, x) ==
        doctest::Approx(std::sqrt(theta_eval(ph, 2.0))).epsilon(1e-12));
}

TEST_CASE("closed-form derivatives match finite differences") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> rd(0.1, 20.0);
  for (auto p : {ThetaProfile::exp_power(0.5), ThetaProfile::exp_power(1.0),
                 ThetaProfile::exp_power_log(0.5, 1.5)}) {
    for (int i = 0; i < 40; ++i) {
      double r = rd(gen), h = 1e-5 * (1.0 + r);
      double fd1 = (p(r + h) - p(r - h)) / (2 * h);
      double fd2 = (p(r + h) - 2 * p(r) + p(r - h)) / (h * h);
      CHECK(p.deriv(r, 1) == doctest::Approx(fd1).epsilon(1e-6));
      CHECK(p.deriv(r, 2) == doctest::Approx(fd2).epsilon(1e-4));
    }
  }
}

TEST_CASE("check_theta_conditions") {
  std::vector<double> rg;
  for (double r = 0.0; r <= 100.0; r += 0.25) rg.push_back(r);
  std::vector<std::pair<double, double>> pg;
  for (double r1 = 0.1; r1 <= 30.0; r1 *= 1.7)
    for (double r2 = 0.1; r2 <= 30.0; r2 *= 1.7) pg.emplace_back(r1, r2);

  SUBCASE("s=1: first derivative saturates at Ctilde = 1") {
    auto p = ThetaProfile::exp_power(1.0);
    auto rep = check_theta_conditions(p, rg, pg);
    CHECK(rep.Ctilde == doctest::Approx(1.0).epsilon(1e-10));
    // product bound with C2=1 has the analytic constant e^{-1}
    CHECK(rep.C1_by_C2.at(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK_FALSE(rep.violation);
  }
  SUBCASE("s=1/2: finite constants, no violation") {
    auto p = ThetaProfile::exp_power(0.5);
    auto rep = check_theta_conditions(p, rg, pg);
    CHECK(std::isfinite(rep.Ctilde));
    CHECK(rep.Ctilde > 0.0);
    CHECK_FALSE(rep.violation);
  }
  SUBCASE("empty grid throws") {
    auto p = ThetaProfile::exp_power(1.0);
    CHECK_THROWS_AS(check_theta_conditions(p, {}, pg), std::invalid_argument);
  }
}

TEST_CASE("compute_m_tilde") {
  auto p1 = ThetaProfile::exp_power(1.0);
  CHECK(compute_m_tilde(p1, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
  // calculus oracle: max of (r+1)^2 e^{-(r+1)/2} at r+1 = 4 is 16 e^{-2}
  CHECK(compute_m_tilde(p1, 2) ==
        doctest::Approx(16.0 * std::exp(-2.0)).epsilon(1e-9));

  // golden section vs dense grid scan for s = 1/2, k = 2
  auto ph = ThetaProfile::exp_power(0.5);
  double dense = 0.0;
  for (double r = 0.0; r <= 1e5; r += 0.01)
    dense = std::max(dense, std::pow(r + 1.0, 2) * std::sqrt(ph(r)));
  CHECK(compute_m_tilde(ph, 2) == doctest::Approx(dense).epsilon(1e-6));
}

TEST_CASE("tabulated profile round trip and interpolation") {
  auto src = ThetaProfile::exp_power(0.5);
  std::vector<double> r, th;
  for (double x = 0.0; x <= 400.0; x += 0.05) {
    r.push_back(x);
    th.push_back(src(x));
  }
  auto tab = ThetaProfile::tabulated(r, th);
  for (double x = 0.1; x < 300.0; x *= 1.9)
    CHECK(tab(x) == doctest::Approx(src(x)).epsilon(1e-5));
  // monotone interpolation preserves the decreasing invariant
  double prev = tab(0.0);
  for (double x = 0.013; x <= 300.0; x += 0.013) {
    CHECK(tab(x) <= prev + 1e-15);
    prev = tab(x);
  }
  auto round = ThetaProfile::deserialize(tab.serialize());
  CHECK(round(7.3) == doctest::Approx(tab(7.3)).epsilon(1e-14));
}

TEST_CASE("serialization round trip for built-ins") {
  auto p = ThetaProfile::exp_power_log(0.5, 1.25, 2.0, 3.0);
  auto q = ThetaProfile::deserialize(p.serialize());
  CHECK(q.s() == p.s());
  CHECK(q.beta() == p.beta());
  CHECK(q.c() == p.c());
  CHECK(q(4.2) == doctest::Approx(p(4.2)).epsilon(1e-15));
}
