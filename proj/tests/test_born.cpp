#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "declab/born.hpp"

#include <stdexcept>

using namespace declab;

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

const ThetaProfile &profile() {
  static const ThetaProfile prof = ThetaProfile::exp_power(0.5);
  return prof;
}

double theta_of_bracket(double x) {
  return std::exp(profile().log_theta(std::sqrt(1.0 + x * x)));
}

// magnetic whole-space setup shared by the case-a tests
struct MagneticSetup {
  Grid grid = make_grid(Geometry::Radial, 400, 40.0, 3);
  PotentialSpec pot = PotentialSpec::build(
      grid, [](double x) { return 0.3 * theta_of_bracket(x); },
      [](double x) { return 0.2 * theta_of_bracket(x); }, profile(),
      PotCase::A, 1.0, 1.0);
};

// obstacle exterior setup shared by the case-b tests; a/h is an integer so
// the exterior grid embeds into the full radial grid node-for-node
struct ObstacleSetup {
  Grid grid = make_grid(Geometry::ExteriorRadial, 599, 42.0, 3, 2.0);
  PotentialSpec pot = PotentialSpec::build(
      grid, [](double x) { return 0.2 * theta_of_bracket(x); }, nullptr,
      profile(), PotCase::B, 1.0, 1.0);
};

} // namespace

TEST_CASE("magnetic assembly matches direct solves away from the anchor") {
  MagneticSetup s;
  for (double lambda : {2.05, 2.2, 2.4}) {
    auto rep = born_series_assemble(s.grid, s.pot, 2.0, lambda);
    CHECK(rep.rel_error < 1e-8);
    CHECK(rep.rel_error_grad < 1e-8);
    CHECK(rep.T3_norm < 0.5);
    CHECK(rep.F2_norm < 0.5);
  }
}

TEST_CASE("magnetic assembly is exact at the anchor point") {
  MagneticSetup s;
  auto rep = born_series_assemble(s.grid, s.pot, 2.0, 2.0);
  CHECK(rep.T3_norm == 0.0);
  CHECK(rep.F2_norm == 0.0);
  CHECK(rep.rel_error < 1e-12);
  CHECK(rep.rel_error_grad < 1e-10);
}

TEST_CASE("magnetic contraction blocks vanish continuously at the anchor") {
  MagneticSetup s;
  auto near = born_series_assemble(s.grid, s.pot, 2.0, 2.02);
  auto far = born_series_assemble(s.grid, s.pot, 2.0, 2.05);
  CHECK(near.F2_norm > 0.0);
  CHECK(near.F2_norm < far.F2_norm);
  CHECK(near.T3_norm > 0.0);
  CHECK(near.T3_norm < far.T3_norm);
}

TEST_CASE("magnetic assembly is independent of the anchor choice") {
  // both anchors sit below lambda so the shared absorbing layer is scaled by
  // the same reference frequency in every solve
  MagneticSetup s;
  auto r1 = born_series_assemble(s.grid, s.pot, 2.0, 2.4);
  auto r2 = born_series_assemble(s.grid, s.pot, 2.2, 2.4);
  const double diff =
      (r1.assembled - r2.assembled).norm() / r1.assembled.norm();
  CHECK(diff < 1e-9);
  const double diffg =
      (r1.assembled_grad - r2.assembled_grad).norm() / r1.assembled_grad.norm();
  CHECK(diffg < 1e-9);
}

TEST_CASE("obstacle assembly matches direct solves away from the anchor") {
  ObstacleSetup s;
  auto rep = born_series_assemble(s.grid, s.pot, 2.0, 2.005);
  CHECK(rep.rel_error < 1e-8);
  CHECK(rep.K_norm > 0.0);
  CHECK(rep.K_norm < 0.5);
}

TEST_CASE("obstacle assembly is exact at the anchor point") {
  ObstacleSetup s;
  auto rep = born_series_assemble(s.grid, s.pot, 2.0, 2.0);
  CHECK(rep.K_norm == 0.0);
  CHECK(rep.rel_error < 1e-12);
}

TEST_CASE("obstacle assembly is independent of the anchor choice") {
  ObstacleSetup s;
  auto r1 = born_series_assemble(s.grid, s.pot, 2.0, 2.005);
  auto r2 = born_series_assemble(s.grid, s.pot, 2.004, 2.005);
  const double diff =
      (r1.assembled - r2.assembled).norm() / r1.assembled.norm();
  CHECK(diff < 1e-9);
}

TEST_CASE("assembly refuses to continue when the contraction budget fails") {
  ObstacleSetup s;
  CHECK_THROWS_AS(born_series_assemble(s.grid, s.pot, 2.0, 2.05),
                  std::runtime_error);
}

TEST_CASE("obstacle assembly validates its grid") {
  // obstacle regime requires an exterior grid
  {
    MagneticSetup s;
    auto pot = PotentialSpec::build(
        s.grid, [](double x) { return 0.2 * theta_of_bracket(x); }, nullptr,
        profile(), PotCase::B, 1.0, 1.0);
    CHECK_THROWS_AS(born_series_assemble(s.grid, pot, 2.0, 2.005),
                    std::invalid_argument);
  }
  // the obstacle radius must sit on a node of the enclosing full grid
  {
    Grid grid = make_grid(Geometry::ExteriorRadial, 600, 42.0, 3, 2.0);
    auto pot = PotentialSpec::build(
        grid, [](double x) { return 0.2 * theta_of_bracket(x); }, nullptr,
        profile(), PotCase::B, 1.0, 1.0);
    CHECK_THROWS_AS(born_series_assemble(grid, pot, 2.0, 2.005),
                    std::invalid_argument);
  }
  // no planar obstacle regime
  {
    Grid grid = make_grid(Geometry::ExteriorRadial, 599, 42.0, 2, 2.0);
    auto pot = PotentialSpec::build(
        grid, [](double x) { return 0.2 * theta_of_bracket(x); }, nullptr,
        profile(), PotCase::B, 1.0, 1.0);
    CHECK_THROWS_AS(born_series_assemble(grid, pot, 2.0, 2.005),
                    std::invalid_argument);
  }
}
