#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "declab/checks.hpp"
#include "declab/operator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

using namespace declab;
using cplx = std::complex<double>;

namespace {

Grid make_grid(Geometry g, int n, double R, int d, double a = 0.0) {
  Grid grid;
  grid.geometry = g;
  grid.n = n;
  grid.R = R;
  grid.d = d;
  grid.a = a;
  return grid;
}

PotentialSpec free_pot(const Grid &grid) {
  return PotentialSpec::build(
      grid, [](double) { return 0.0; }, nullptr,
      ThetaProfile::exp_power(0.5), PotCase::A, 1.0, 1.0);
}

} // namespace

TEST_CASE("grid layout and validation") {
  Grid g = make_grid(Geometry::FullLine, 9, 5.0, 1);
  CHECK(g.h() == doctest::Approx(1.0));
  CHECK(g.node(0) == doctest::Approx(-4.0));
  CHECK(g.node(8) == doctest::Approx(4.0));
  Grid r = make_grid(Geometry::Radial, 9, 10.0, 3);
  CHECK(r.node(0) == doctest::Approx(1.0));
  Grid e = make_grid(Geometry::ExteriorRadial, 9, 11.0, 3, 1.0);
  CHECK(e.node(0) == doctest::Approx(2.0));
  CHECK_THROWS(make_grid(Geometry::Radial, 2, 10.0, 3).validate());
  CHECK_THROWS(make_grid(Geometry::Radial, 9, -1.0, 3).validate());
  CHECK_THROWS(make_grid(Geometry::ExteriorRadial, 9, 10.0, 3, 0.0).validate());
  CHECK_THROWS(make_grid(Geometry::ExteriorRadial, 9, 10.0, 3, 12.0).validate());
  CHECK_THROWS(make_grid(Geometry::FullLine, 9, 10.0, 3).validate());
}

TEST_CASE("potential envelope enforcement") {
  const Grid grid = make_grid(Geometry::Radial, 50, 20.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  // admissible: stays below C Theta(c<x>)
  const auto ok = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.5 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      nullptr, prof, PotCase::A, 1.0, 1.0);
  CHECK(ok.V.size() == 50);
  // violation: constant tail does not decay
  CHECK_THROWS(PotentialSpec::build(
      grid, [](double) { return 0.5; }, nullptr, prof, PotCase::A, 1.0, 1.0));
  // magnetic term forbidden in the obstacle case
  CHECK_THROWS(PotentialSpec::build(
      grid, nullptr,
      [&prof](double x) {
        return 0.1 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      prof, PotCase::B, 1.0, 1.0));
  // hash changes with the samples
  const auto other = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.25 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      nullptr, prof, PotCase::A, 1.0, 1.0);
  CHECK(ok.hash() != other.hash());
}

TEST_CASE("free operator spectra match the separated box modes") {
  // full line [-R, R], Dirichlet: lowest eigenvalue (pi / 2R)^2
  const Grid gl = make_grid(Geometry::FullLine, 800, 10.0, 1);
  const auto decl = decompose(build_free_operator(gl));
  CHECK(decl.e[0] ==
        doctest::Approx(std::pow(M_PI / (2.0 * gl.R), 2)).epsilon(0.01));
  // reduced radial half line [0, R]: eigenvalues (j pi / R)^2
  const Grid gr = make_grid(Geometry::Radial, 800, 10.0, 3);
  const auto decr = decompose(build_free_operator(gr));
  for (int j = 1; j <= 3; ++j)
    CHECK(decr.e[j - 1] ==
          doctest::Approx(std::pow(j * M_PI / gr.R, 2)).epsilon(0.01));
  // 2D radial reduction at the origin is rejected
  CHECK_THROWS(build_free_operator(make_grid(Geometry::Radial, 100, 10.0, 2)));
  // exterior 2D domain is fine (no origin in the domain)
  CHECK_NOTHROW(
      build_free_operator(make_grid(Geometry::ExteriorRadial, 100, 11.0, 2, 1.0)));
}

TEST_CASE("spectral decomposition: residual and orthonormality invariants") {
  const Grid grid = make_grid(Geometry::Radial, 200, 25.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  const auto pot = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.3 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      [&prof](double x) {
        return 0.2 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      prof, PotCase::A, 1.0, 1.0);
  const auto op = build_operator(grid, pot);
  // magnetic coupling makes the operator genuinely complex Hermitian
  CHECK(!op.is_real());
  const auto dec = decompose(op);
  CHECK(dec.max_residual(op) <= 1.0); // residual <= 1e-10 |e| + 1e-12
  const Eigen::MatrixXcd gram = dec.U.adjoint() * dec.U;
  const double ortho =
      (gram - Eigen::MatrixXcd::Identity(grid.n, grid.n)).cwiseAbs().maxCoeff();
  CHECK(ortho < 1e-12);
  // Hermitian symmetry of the stencil application
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd u(grid.n), v(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    u[i] = cplx(gauss(rng), gauss(rng));
    v[i] = cplx(gauss(rng), gauss(rng));
  }
  const cplx lhs = u.dot(op.apply(v));
  const cplx rhs = op.apply(u).dot(v);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("resolvent solve agrees with the spectral representation") {
  const Grid grid = make_grid(Geometry::Radial, 300, 30.0, 3);
  const auto op = build_free_operator(grid);
  const auto dec = decompose(op);
  const cplx lambda(1.5, -0.2);
  Eigen::VectorXcd f(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.node(i);
    f[i] = std::exp(-(r - 8.0) * (r - 8.0));
  }
  const Eigen::VectorXcd u = resolvent_apply(op, lambda, f);
  Eigen::VectorXcd coef = dec.U.adjoint() * f;
  for (int j = 0; j < grid.n; ++j)
    coef[j] /= dec.e[j] - lambda * lambda;
  const Eigen::VectorXcd u_spec = dec.U * coef;
  CHECK((u - u_spec).norm() / u_spec.norm() < 1e-10);
}

TEST_CASE("near-eigenvalue Dirichlet solve is rejected") {
  const Grid grid = make_grid(Geometry::Radial, 300, 30.0, 3);
  const auto op = build_free_operator(grid);
  const auto dec = decompose(op);
  const double lam = std::sqrt(dec.e[4]);
  Eigen::VectorXcd f = Eigen::VectorXcd::Ones(grid.n);
  CHECK_THROWS_AS(resolvent_apply(op, cplx(lam, 0.0), f), std::runtime_error);
  // a safe distance away the solve goes through
  CHECK_NOTHROW(resolvent_apply(op, cplx(lam, -0.05), f));
}

TEST_CASE("radiation solve reproduces the half-line outgoing kernel") {
  // -u'' - lambda^2 u = f on [0, inf), u(0) = 0, outgoing e^{-i lambda r}:
  //   u(r) = \int sin(lambda r_<) e^{-i lambda r_>} f(r') dr' / lambda
  const Grid grid = make_grid(Geometry::Radial, 1599, 40.0, 1);
  const auto op = build_free_operator(grid);
  const double lam = 1.0;
  Eigen::VectorXcd f(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.node(i);
    f[i] = std::exp(-4.0 * (r - 5.0) * (r - 5.0));
  }
  BcSpec bc;
  bc.mode = BcMode::Radiation;
  const Eigen::VectorXcd u = resolvent_apply(op, cplx(lam, 0.0), f, bc);
  const double h = grid.h();
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.node(i);
    if (r > 15.0)
      continue;
    cplx acc = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      const double rp = grid.node(j);
      const double rl = std::min(r, rp), rg = std::max(r, rp);
      acc += std::sin(lam * rl) * std::exp(cplx(0.0, -lam * rg)) * f[j] * h;
    }
    acc /= lam;
    worst = std::max(worst, std::abs(u[i] - acc));
    scale = std::max(scale, std::abs(acc));
  }
  CHECK(worst / scale < 1e-2);
}

TEST_CASE("radiation and absorbing-layer solves agree on the inner half") {
  const Grid grid = make_grid(Geometry::Radial, 1200, 60.0, 1);
  const auto op = build_free_operator(grid);
  const double lam = 2.0;
  Eigen::VectorXcd f(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.node(i);
    f[i] = std::exp(-(r - 6.0) * (r - 6.0));
  }
  BcSpec rad;
  rad.mode = BcMode::Radiation;
  BcSpec cal;
  cal.mode = BcMode::CAL;
  cal.cal_strength = 2.0; // strong enough that layer transmission ~ 1e-3
  const Eigen::VectorXcd ur = resolvent_apply(op, cplx(lam, -1e-4), f, rad);
  const Eigen::VectorXcd uc = resolvent_apply(op, cplx(lam, -1e-4), f, cal);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    if (grid.node(i) > 0.5 * grid.R)
      continue;
    diff = std::max(diff, std::abs(ur[i] - uc[i]));
    scale = std::max(scale, std::abs(ur[i]));
  }
  CHECK(diff / scale < 1e-2);
}

TEST_CASE("resolvent is real on the negative imaginary axis") {
  const Grid grid = make_grid(Geometry::Radial, 300, 30.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  const auto pot = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.4 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      nullptr, prof, PotCase::A, 1.0, 1.0);
  const auto op = build_operator(grid, pot);
  Eigen::VectorXcd f(grid.n);
  for (int i = 0; i < grid.n; ++i)
    f[i] = std::exp(-0.1 * grid.node(i));
  const Eigen::VectorXcd u = resolvent_apply(op, cplx(0.0, -1.3), f);
  CHECK(u.imag().cwiseAbs().maxCoeff() < 1e-12 * u.real().cwiseAbs().maxCoeff());
}

TEST_CASE("weighted derivative norm: dense oracle and adjoint symmetry") {
  const Grid grid = make_grid(Geometry::Radial, 120, 20.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  const auto pot = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.3 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      [&prof](double x) {
        return 0.15 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      prof, PotCase::A, 1.0, 1.0);
  const auto op = build_operator(grid, pot);
  const auto dec = decompose(op);
  const Eigen::VectorXd mu = mu_vector(grid, prof);
  const double lambda = 1.7, eps = 0.15;
  for (int ell = 0; ell <= 1; ++ell)
    for (int k : {0, 1, 3}) {
      // dense oracle: assemble the matrix explicitly, take its SVD norm
      const cplx z(lambda, -eps);
      Eigen::VectorXcd g(grid.n);
      for (int j = 0; j < grid.n; ++j)
        g[j] = resolvent_mode_deriv(dec.e[j], z, k);
      Eigen::MatrixXcd M =
          dec.U * g.asDiagonal() * dec.U.adjoint();
      M = mu.cast<cplx>().asDiagonal() * M * mu.cast<cplx>().asDiagonal();
      if (ell == 1)
        M = (mu.cast<cplx>().asDiagonal() * gradient_matrix(grid)) *
            (mu.cwiseInverse().cast<cplx>().asDiagonal() * M);
      const double oracle =
          Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()[0];
      const double got =
          weighted_resolvent_deriv_norm(op, dec, lambda, ell, k, mu, eps);
      CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
    }
  // adjoint symmetry: ||mu R(z) mu|| = ||mu R(conj z) mu||
  const double np =
      weighted_resolvent_deriv_norm(op, dec, lambda, 0, 0, mu, 0.15);
  Eigen::VectorXcd gm(grid.n);
  for (int j = 0; j < grid.n; ++j)
    gm[j] = 1.0 / (dec.e[j] - std::conj(cplx(lambda, -0.15)) *
                                  std::conj(cplx(lambda, -0.15)));
  Eigen::MatrixXcd Mm = mu.cast<cplx>().asDiagonal() *
                        (dec.U * gm.asDiagonal() * dec.U.adjoint()) *
                        mu.cast<cplx>().asDiagonal();
  const double nm = Eigen::JacobiSVD<Eigen::MatrixXcd>(Mm).singularValues()[0];
  CHECK(np == doctest::Approx(nm).epsilon(1e-10));

  // real-axis radiation-solve version against its own dense oracle
  BcSpec bc;
  bc.mode = BcMode::Radiation;
  const int n = grid.n;
  Eigen::MatrixXcd R(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e[j] = 1.0;
    R.col(j) = resolvent_apply(op, cplx(lambda, 0.0), e, bc);
  }
  for (int ell = 0; ell <= 1; ++ell)
    for (int k : {0, 3}) {
      Eigen::MatrixXcd dm2, dm1 = R;
      for (int j = 1; j <= k; ++j) {
        Eigen::MatrixXcd rhs = 2.0 * j * lambda * dm1;
        if (j >= 2)
          rhs += static_cast<double>(j) * (j - 1.0) * dm2;
        dm2 = dm1;
        dm1 = R * rhs;
      }
      Eigen::MatrixXcd M = dm1 * mu.cast<cplx>().asDiagonal();
      if (ell == 1)
        M = gradient_matrix(grid) * M;
      M = mu.cast<cplx>().asDiagonal() * M;
      const double oracle =
          Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()[0];
      const double got =
          weighted_deriv_norm_bc(op, cplx(lambda, 0.0), ell, k, mu, bc);
      CHECK(got == doctest::Approx(oracle).epsilon(1e-7));
    }
}

TEST_CASE("derivative recursion matches the modewise closed form") {
  const Grid grid = make_grid(Geometry::Radial, 150, 20.0, 3);
  const auto op = build_free_operator(grid);
  const auto dec = decompose(op);
  const cplx lambda(1.2, -0.4);
  Eigen::VectorXcd x(grid.n);
  for (int i = 0; i < grid.n; ++i)
    x[i] = std::exp(-0.5 * std::pow(grid.node(i) - 4.0, 2));
  for (int k = 0; k <= 4; ++k) {
    const Eigen::VectorXcd via_solves = resolvent_deriv_apply(op, lambda, k, x);
    Eigen::VectorXcd coef = dec.U.adjoint() * x;
    for (int j = 0; j < grid.n; ++j)
      coef[j] *= resolvent_mode_deriv(dec.e[j], lambda, k);
    const Eigen::VectorXcd via_modes = dec.U * coef;
    CHECK((via_solves - via_modes).norm() / via_modes.norm() < 1e-6);
  }
}

TEST_CASE("derivative-scale envelope stays within a factor 5 through k=12") {
  // real-axis radiation solves: the weighted derivative norms follow the
  // Gevrey model (k!)^2 for the s = 1/2 weight, so the normalized constants
  //   c_k = (N_k (lambda+1)^{1-ell} / (k!)^2)^{1/(k+1)}
  // stay within a narrow band
  const Grid grid = make_grid(Geometry::Radial, 400, 20.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  auto th = [&prof](double x) {
    return std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
  };
  const auto pot = PotentialSpec::build(
      grid, [&](double x) { return 0.3 * th(x); },
      [&](double x) { return 0.6 * th(x) * std::exp(-2.0 * (x - 3.0) * (x - 3.0)); },
      prof, PotCase::A, 1.0, 1.0);
  const auto op = build_operator(grid, pot);
  const Eigen::VectorXd mu = mu_vector(grid, prof);
  BcSpec bc;
  bc.mode = BcMode::Radiation;
  for (int ell = 0; ell <= 1; ++ell)
    for (double lambda : {1.0, 4.0}) {
      double cmin = 1e300, cmax = 0.0, prev = 0.0;
      for (int k = 0; k <= 12; ++k) {
        const double nk =
            weighted_deriv_norm_bc(op, cplx(lambda, 0.0), ell, k, mu, bc);
        CHECK(nk > prev); // norms grow with the derivative order
        prev = nk;
        const double lnorm = (1.0 - ell) * std::log(lambda + 1.0);
        const double ck = std::exp(
            (std::log(nk) + lnorm - 2.0 * std::lgamma(k + 1.0)) / (k + 1.0));
        cmin = std::min(cmin, ck);
        cmax = std::max(cmax, ck);
      }
      CHECK(cmax / cmin <= 5.0);
    }
}

TEST_CASE("uniform weighted estimate on the free operator") {
  const Grid grid = make_grid(Geometry::Radial, 400, 40.0, 3);
  const auto op = build_free_operator(grid);
  const auto rep = uniform_estimate_check(op, {1.0, 2.0, 4.0}, 1e-2, 1.0);
  CHECK(rep.sup_constant > 0.0);
  CHECK(rep.sup_constant < 50.0);
  CHECK(rep.eps_stable);
  CHECK(!rep.blowup);
}

TEST_CASE("limiting-absorption continuity: Hoelder in eps for s = 1") {
  const Grid grid = make_grid(Geometry::Radial, 500, 50.0, 3);
  const auto op = build_free_operator(grid);
  const std::vector<double> eps_seq{1e-1, 1e-2, 1e-3, 1e-4};
  const auto rep = lap_continuity_check(op, 2.0, 1.0, eps_seq);
  CHECK(rep.pass);
  CHECK(rep.theta > 0.3);
  CHECK(rep.cauchy);
  // a weaker weight keeps continuity but pays a larger constant
  const auto weak = lap_continuity_check(op, 2.0, 0.25, eps_seq);
  CHECK(weak.C > rep.C);
  // misuse is rejected
  CHECK_THROWS(lap_continuity_check(op, 2.0, 1.0, {0.1, 0.2, 0.3}));
}

TEST_CASE("dilation commutator identity: small residual, second order") {
  // n = 2000 second-order stencils put the h^2 floor of this identity right
  // at 1e-4; the domain size balances interior error (growing with R) against
  // wall truncation (decaying with R), with the optimum near R = 47.8
  const Grid grid = make_grid(Geometry::Radial, 2000, 47.8, 3);
  const auto op = build_free_operator(grid);
  const cplx lambda(0.03, -0.5);
  const double res = dilation_identity_residual(op, lambda, 2.0);
  CHECK(res < 1e-4);
  // away from the wall-truncation floor the residual is cleanly O(h^2):
  // quarter on doubling the resolution at fixed R = 80
  const double res_c = dilation_identity_residual(
      build_free_operator(make_grid(Geometry::Radial, 2000, 80.0, 3)),
      cplx(0.05, -0.5), 2.0);
  const double res_f = dilation_identity_residual(
      build_free_operator(make_grid(Geometry::Radial, 4000, 80.0, 3)),
      cplx(0.05, -0.5), 2.0);
  CHECK(res_f < 0.3 * res_c);
  // a stronger weight also passes
  CHECK(dilation_identity_residual(op, lambda, 3.0) < 1e-3);
  CHECK_THROWS(dilation_identity_residual(op, cplx(1.0, 0.1)));
}

TEST_CASE("time-frequency duality of the wave group") {
  const Grid grid = make_grid(Geometry::Radial, 400, 401.0, 3);
  const auto dec = decompose(build_free_operator(grid));
  const double res = fourier_duality_check(dec, cplx(1.0, -0.3), 60.0, 4000);
  CHECK(res <= 1e-6);
  // halving the window leaves the e^{Im lambda T} truncation tail
  const double res_short =
      fourier_duality_check(dec, cplx(1.0, -0.3), 30.0, 4000);
  CHECK(res_short > 1e-5);
  CHECK(res_short < 5e-3);
  CHECK_THROWS(fourier_duality_check(dec, cplx(1.0, -0.3), 60.0, 4001));
}

TEST_CASE("low-frequency boundedness and the deep-well negative control") {
  const Grid grid = make_grid(Geometry::Radial, 600, 60.0, 3);
  const auto prof = ThetaProfile::exp_power(1.0);
  const Eigen::VectorXd mu = mu_vector(grid, prof);
  const std::vector<double> lambdas{0.01, 0.02, 0.04, 0.08, 0.16};
  // mildly attractive well: no resonance, bounded at low frequency
  const auto mild = PotentialSpec::build(
      grid, [](double x) { return -0.2 * std::exp(-x * x); }, nullptr, prof,
      PotCase::A, 1.6, 1.0);
  const auto rep = lowfreq_check(build_operator(grid, mild), lambdas, 1e-3, mu);
  CHECK(rep.bounded);
  // tune the well depth to the binding threshold of the open half-line by
  // shooting the zero-energy equation u'' = V u, u(0) = 0 outward: at the
  // threshold the solution flattens (u' -> 0), which is exactly a
  // zero-energy resonance
  const double h = grid.h();
  auto shoot_slope = [&](double depth) {
    double um = 0.0, u = h; // u(0) = 0, unit initial slope
    for (int i = 1; i < grid.n; ++i) {
      const double V = -depth * std::exp(-grid.node(i - 1) * grid.node(i - 1));
      const double un = 2.0 * u - um + h * h * V * u;
      um = u;
      u = un;
    }
    return u - um;
  };
  double lo = 0.3, hi = 4.0;
  REQUIRE(shoot_slope(lo) > 0.0);
  REQUIRE(shoot_slope(hi) < 0.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot_slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const auto resonant_pot = PotentialSpec::build(
      grid, [lo](double x) { return -lo * std::exp(-x * x); }, nullptr, prof,
      PotCase::A, 8.0 * lo, 1.0);
  const auto op_res = build_operator(grid, resonant_pot);
  const auto bad = lowfreq_check(op_res, lambdas, 1e-3, mu);
  CHECK(!bad.bounded);
  CHECK(bad.sup > 10.0 * rep.sup);
}

TEST_CASE("manifest and sweep serialization") {
  const Grid grid = make_grid(Geometry::Radial, 50, 20.0, 3);
  const auto prof = ThetaProfile::exp_power(0.5);
  const auto pot = PotentialSpec::build(
      grid,
      [&prof](double x) {
        return 0.3 * std::exp(prof.log_theta(std::sqrt(1.0 + x * x)));
      },
      nullptr, prof, PotCase::A, 1.0, 1.0);
  const auto op = build_operator(grid, pot);
  const auto j = nlohmann::json::parse(op.manifest());
  CHECK(j["geometry"] == "radial");
  CHECK(j["n"] == 50);
  CHECK(j["R"] == 20.0);
  CHECK(j["d"] == 3);
  CHECK(j["case"] == "a");
  CHECK(j["potential_hash"] == pot.hash());

  std::vector<SweepRow> rows(2);
  rows[0] = {2.0, 0.1, 0, 3, 1.25, "dirichlet", "a"};
  rows[1] = {4.0, 0.05, 1, 0, -0.5, "cal", "b"};
  const std::string csv = sweep_csv(rows);
  CHECK(csv.find("lambda,eps,ell,k,log_norm,bc_mode,case\n") == 0);
  CHECK(csv.find(",0,3,") != std::string::npos);
  CHECK(csv.find("dirichlet,a") != std::string::npos);
  CHECK(csv.find("cal,b") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
