#pragma once

// Discretized self-adjoint realizations of the free and perturbed wave
// Hamiltonians on 1D / reduced-radial domains: tridiagonal Hermitian
// matrices, spectral decompositions, and resolvent solves under Dirichlet,
// radiation, or complex-absorbing-layer boundary conditions.

#include "declab/theta.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace declab {

enum class Geometry { FullLine, Radial, ExteriorRadial };

struct Grid {
  Geometry geometry = Geometry::Radial;
  int n = 100;      // interior node count
  double R = 10.0;  // outer truncation radius
  double a = 0.0;   // obstacle radius (ExteriorRadial only)
  int d = 3;        // ambient dimension for the radial reduction

  double h() const;
  double node(int i) const; // i in [0, n)
  std::vector<double> nodes() const;
  void validate() const;
};

enum class PotCase { A, B };

struct PotentialSpec {
  std::vector<double> V, b; // node samples; b empty or zero in case B
  ThetaProfile profile{ThetaProfile::exp_power(0.5)};
  PotCase pcase = PotCase::A;
  double C = 1.0, c = 1.0; // envelope constants of the decay bound

  // samples fV/fB on the grid and verifies |V| + |b| <= C Theta(c <x>)
  static PotentialSpec
  build(const Grid &grid, const std::function<double(double)> &fV,
        const std::function<double(double)> &fB, const ThetaProfile &profile,
        PotCase pcase, double C, double c);
  std::string hash() const; // hex digest over the sampled values
};

enum class BcMode { Dirichlet, Radiation, CAL };

struct BcSpec {
  BcMode mode = BcMode::Dirichlet;
  double cal_frac = 0.25;    // absorbing-layer width as a fraction of R
  double cal_strength = 1.0; // peak damping
};

struct DiscreteOperator {
  Grid grid;
  PotCase pcase = PotCase::A;
  Eigen::VectorXd diag; // V + |b|^2 + kinetic + centrifugal contribution
  Eigen::VectorXcd off; // superdiagonal, size n-1 (conjugate below)
  std::string potential_hash;

  bool is_real() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd &u) const;
  std::string manifest() const; // JSON {geometry, n, R, d, case, potential_hash}
};

DiscreteOperator build_operator(const Grid &grid, const PotentialSpec &pot);
DiscreteOperator build_free_operator(const Grid &grid);

struct SpectralDecomposition {
  Eigen::VectorXd e;   // nondecreasing eigenvalues
  Eigen::MatrixXcd U;  // orthonormal eigenvectors in columns
  double max_residual(const DiscreteOperator &op) const;
};

SpectralDecomposition decompose(const DiscreteOperator &op);

// Solves (P - lambda^2) u = rhs with the requested boundary handling.
// Radiation imposes u'(R) = -i lambda u(R); CAL adds -i W(x) on the outer
// layer. Real lambda with Dirichlet near an eigenvalue is rejected.
Eigen::VectorXcd resolvent_apply(const DiscreteOperator &op,
                                 std::complex<double> lambda,
                                 const Eigen::VectorXcd &rhs,
                                 const BcSpec &bc = {});

// Solves the conjugate-transpose system (needed by power iteration when the
// boundary handling makes the shifted matrix non-Hermitian).
Eigen::VectorXcd resolvent_apply_adjoint(const DiscreteOperator &op,
                                         std::complex<double> lambda,
                                         const Eigen::VectorXcd &rhs,
                                         const BcSpec &bc = {});

// Dense (P - lambda^2)^{-1} under the same boundary handling.
Eigen::MatrixXcd dense_resolvent(const DiscreteOperator &op,
                                 std::complex<double> lambda,
                                 const BcSpec &bc = {});

// Centered first-difference application (the discrete gradient).
Eigen::VectorXcd gradient_apply(const Grid &grid, const Eigen::VectorXcd &u);
Eigen::MatrixXcd gradient_matrix(const Grid &grid);

// Node samples of the canonical weight sqrt(Theta(c <x>)).
Eigen::VectorXd mu_vector(const Grid &grid, const ThetaProfile &profile,
                          double c = 1.0);
// Node samples of <x>^{-s}.
Eigen::VectorXd poly_weight_vector(const Grid &grid, double s);

// Operator 2-norm by power iteration on A^H A given the two applications;
// randomized restart on stagnation.
double
operator_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &A,
              const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &AH,
              int n, double tol = 1e-8, int max_iter = 500);
double matrix_norm(const Eigen::MatrixXcd &M, double tol = 1e-8);

} // namespace declab
