#pragma once

// Block assembly of the weighted perturbed resolvent mu R(lambda) mu from an
// anchor point z and free-resolvent differences, with contraction
// diagnostics. Two regimes: magnetic potentials on the whole space, and
// obstacle exteriors with electric potentials. All resolvents share one
// fixed complex absorbing layer so that every identity holds exactly at the
// matrix level.

#include "declab/operator.hpp"

#include <Eigen/Dense>

namespace declab {

struct BornOptions {
  double gamma_max = 0.5;     // admissible contraction-block norm
  double cal_frac = 0.25;     // absorbing-layer width fraction
  double cal_strength = 1.0;  // peak damping per unit reference frequency
  // obstacle case: eta == 1 on [a, a + eta_plateau], falls to 0 over
  // eta_width; eta_plateau is clamped below by 2 grid spacings
  double eta_plateau = 0.5;
  double eta_width = 2.0;
};

struct BornReport {
  Eigen::MatrixXcd assembled;      // mu R(lambda) mu from the block system
  Eigen::MatrixXcd direct;         // same object by direct solves
  Eigen::MatrixXcd assembled_grad; // mu grad R(lambda) mu (magnetic case)
  Eigen::MatrixXcd direct_grad;
  double T3_norm = 0.0; // gradient-coupling contraction block
  double F2_norm = 0.0; // resolvent-coupling contraction block
  double K_norm = 0.0;  // obstacle-case contraction block
  double rel_error = 0.0;
  double rel_error_grad = 0.0;
};

BornReport born_series_assemble(const Grid &grid, const PotentialSpec &pot,
                                double z, double lambda,
                                const BornOptions &opt = {});

} // namespace declab
