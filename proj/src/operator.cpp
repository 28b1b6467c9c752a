#include "declab/operator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>

namespace declab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Grid

double Grid::h() const {
  switch (geometry) {
  case Geometry::FullLine:
    return 2.0 * R / (n + 1);
  case Geometry::Radial:
    return R / (n + 1);
  case Geometry::ExteriorRadial:
    return (R - a) / (n + 1);
  }
  return 0.0;
}

double Grid::node(int i) const {
  const double step = h();
  switch (geometry) {
  case Geometry::FullLine:
    return -R + (i + 1) * step;
  case Geometry::Radial:
    return (i + 1) * step;
  case Geometry::ExteriorRadial:
    return a + (i + 1) * step;
  }
  return 0.0;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = node(i);
  return out;
}

void Grid::validate() const {
  if (n < 3)
    throw std::invalid_argument("grid: need at least 3 interior nodes");
  if (!(R > 0.0))
    throw std::invalid_argument("grid: R must be positive");
  if (d < 1)
    throw std::invalid_argument("grid: dimension must be >= 1");
  if (geometry == Geometry::ExteriorRadial) {
    if (!(a > 0.0) || !(a < R))
      throw std::invalid_argument("grid: exterior domain needs 0 < a < R");
  } else if (a != 0.0) {
    throw std::invalid_argument("grid: obstacle radius only valid for "
                                "exterior geometry");
  }
  if (geometry == Geometry::FullLine && d != 1)
    throw std::invalid_argument("grid: full-line geometry is 1D");
}

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec PotentialSpec::build(const Grid &grid,
                                   const std::function<double(double)> &fV,
                                   const std::function<double(double)> &fB,
                                   const ThetaProfile &profile, PotCase pcase,
                                   double C, double c) {
  grid.validate();
  PotentialSpec pot;
  pot.profile = profile;
  pot.pcase = pcase;
  pot.C = C;
  pot.c = c;
  pot.V.resize(static_cast<size_t>(grid.n));
  pot.b.resize(static_cast<size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    const double v = fV ? fV(x) : 0.0;
    const double bb = fB ? fB(x) : 0.0;
    if (pcase == PotCase::B && bb != 0.0)
      throw std::invalid_argument("potential: magnetic term must vanish in "
                                  "the obstacle case");
    const double bound =
        C * std::exp(profile.log_theta(c * std::sqrt(1.0 + x * x)));
    if (std::abs(v) + std::abs(bb) > bound * (1.0 + 1e-9) + 1e-300)
      throw std::invalid_argument("potential: decay envelope violated at x=" +
                                  std::to_string(x));
    pot.V[static_cast<size_t>(i)] = v;
    pot.b[static_cast<size_t>(i)] = bb;
  }
  return pot;
}

std::string PotentialSpec::hash() const {
  // FNV-1a over the raw samples and the envelope constants
  std::uint64_t hsh = 1469598103934665603ull;
  auto mix = [&hsh](const void *p, size_t len) {
    const auto *b = static_cast<const unsigned char *>(p);
    for (size_t i = 0; i < len; ++i) {
      hsh ^= b[i];
      hsh *= 1099511628211ull;
    }
  };
  mix(V.data(), V.size() * sizeof(double));
  mix(b.data(), b.size() * sizeof(double));
  mix(&C, sizeof(double));
  mix(&c, sizeof(double));
  const char tag = pcase == PotCase::A ? 'a' : 'b';
  mix(&tag, 1);
  std::ostringstream os;
  os << std::hex << hsh;
  return os.str();
}

// ---------------------------------------------------------------------------
// DiscreteOperator

bool DiscreteOperator::is_real() const {
  for (int i = 0; i < off.size(); ++i)
    if (off[i].imag() != 0.0)
      return false;
  return true;
}

Eigen::VectorXcd DiscreteOperator::apply(const Eigen::VectorXcd &u) const {
  const int n = grid.n;
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    cplx acc = diag[i] * u[i];
    if (i > 0)
      acc += std::conj(off[i - 1]) * u[i - 1];
    if (i + 1 < n)
      acc += off[i] * u[i + 1];
    out[i] = acc;
  }
  return out;
}

std::string DiscreteOperator::manifest() const {
  nlohmann::json j;
  switch (grid.geometry) {
  case Geometry::FullLine:
    j["geometry"] = "full_line";
    break;
  case Geometry::Radial:
    j["geometry"] = "radial";
    break;
  case Geometry::ExteriorRadial:
    j["geometry"] = "exterior_radial";
    break;
  }
  j["n"] = grid.n;
  j["R"] = grid.R;
  j["d"] = grid.d;
  j["case"] = pcase == PotCase::A ? "a" : "b";
  j["potential_hash"] = potential_hash;
  return j.dump(2);
}

static DiscreteOperator assemble(const Grid &grid, const std::vector<double> &V,
                                 const std::vector<double> &b, PotCase pcase,
                                 const std::string &hash) {
  grid.validate();
  const bool radial = grid.geometry != Geometry::FullLine;
  if (grid.geometry == Geometry::Radial && grid.d == 2)
    throw std::invalid_argument("operator: the 2D radial reduction has a "
                                "nonintegrable centrifugal singularity at the "
                                "origin; use an exterior domain");
  const int n = grid.n;
  const double h = grid.h();
  const double cf =
      radial ? 0.25 * (grid.d - 1) * (grid.d - 3) : 0.0; // * r^{-2}
  DiscreteOperator op;
  op.grid = grid;
  op.pcase = pcase;
  op.potential_hash = hash;
  op.diag.resize(n);
  op.off.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    double dval = 2.0 / (h * h) + V[static_cast<size_t>(i)] +
                  b[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
    if (radial && cf != 0.0)
      dval += cf / (x * x);
    op.diag[i] = dval;
  }
  for (int i = 0; i + 1 < n; ++i) {
    // symmetrized magnetic coupling i(bD + Db)/2-pattern on the stencil
    const double bmid =
        0.5 * (b[static_cast<size_t>(i)] + b[static_cast<size_t>(i + 1)]);
    op.off[i] = cplx(-1.0 / (h * h), bmid / h);
  }
  return op;
}

DiscreteOperator build_operator(const Grid &grid, const PotentialSpec &pot) {
  if (static_cast<int>(pot.V.size()) != grid.n ||
      static_cast<int>(pot.b.size()) != grid.n)
    throw std::invalid_argument("operator: potential sampled on a different "
                                "grid");
  return assemble(grid, pot.V, pot.b, pot.pcase, pot.hash());
}

DiscreteOperator build_free_operator(const Grid &grid) {
  std::vector<double> z(static_cast<size_t>(grid.n), 0.0);
  return assemble(grid, z, z, PotCase::A, "free");
}

// ---------------------------------------------------------------------------
// Spectral decomposition

SpectralDecomposition decompose(const DiscreteOperator &op) {
  const int n = op.grid.n;
  Eigen::VectorXd sub(n - 1);
  Eigen::VectorXcd phase(n);
  phase[0] = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double m = std::abs(op.off[i]);
    sub[i] = m;
    // unitary diagonal similarity removing the phases of the off-diagonal
    phase[i + 1] = m > 0.0 ? phase[i] * std::conj(op.off[i] / m) : phase[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(op.diag, sub);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral decomposition failed to converge");
  SpectralDecomposition dec;
  dec.e = solver.eigenvalues();
  dec.U = solver.eigenvectors().cast<cplx>();
  for (int i = 0; i < n; ++i)
    dec.U.row(i) *= phase[i];
  return dec;
}

double SpectralDecomposition::max_residual(const DiscreteOperator &op) const {
  double worst = 0.0;
  for (int j = 0; j < e.size(); ++j) {
    const Eigen::VectorXcd v = U.col(j);
    const double res = (op.apply(v) - e[j] * v).norm();
    const double budget = 1e-10 * std::abs(e[j]) + 1e-12;
    worst = std::max(worst, res / budget);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Tridiagonal solves

namespace {

struct Tridiag {
  Eigen::VectorXcd lower, main, upper;
};

// Thomas elimination; throws when a pivot collapses (resolvent evaluated at
// or next to a discrete eigenvalue).
Eigen::VectorXcd thomas_solve(const Tridiag &T, const Eigen::VectorXcd &rhs,
                              double pivot_floor) {
  const int n = static_cast<int>(T.main.size());
  Eigen::VectorXcd cp(n), dp(n);
  cplx piv = T.main[0];
  if (std::abs(piv) < pivot_floor)
    throw std::runtime_error("resolvent: near-singular system (spectral "
                             "parameter at a discrete eigenvalue)");
  cp[0] = T.upper[0] / piv;
  dp[0] = rhs[0] / piv;
  for (int i = 1; i < n; ++i) {
    piv = T.main[i] - T.lower[i - 1] * cp[i - 1];
    if (std::abs(piv) < pivot_floor)
      throw std::runtime_error("resolvent: near-singular system (spectral "
                               "parameter at a discrete eigenvalue)");
    if (i + 1 < n)
      cp[i] = T.upper[i] / piv;
    dp[i] = (rhs[i] - T.lower[i - 1] * dp[i - 1]) / piv;
  }
  Eigen::VectorXcd u(n);
  u[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i)
    u[i] = dp[i] - cp[i] * u[i + 1];
  return u;
}

Tridiag shifted_system(const DiscreteOperator &op, cplx lambda,
                       const BcSpec &bc) {
  const int n = op.grid.n;
  const double h = op.grid.h();
  Tridiag T;
  T.main.resize(n);
  T.upper.resize(n - 1);
  T.lower.resize(n - 1);
  const cplx shift = lambda * lambda;
  for (int i = 0; i < n; ++i)
    T.main[i] = cplx(op.diag[i], 0.0) - shift;
  for (int i = 0; i + 1 < n; ++i) {
    T.upper[i] = op.off[i];
    T.lower[i] = std::conj(op.off[i]);
  }
  switch (bc.mode) {
  case BcMode::Dirichlet:
    break;
  case BcMode::Radiation: {
    // eliminate the boundary value using u' = -i lambda u at the outer edge
    // (trapezoidal closure, second order at the edge midpoint)
    const cplx g = (1.0 - cplx(0.0, 0.5) * lambda * h) /
                   (1.0 + cplx(0.0, 0.5) * lambda * h);
    T.main[n - 1] -= g / (h * h);
    if (op.grid.geometry == Geometry::FullLine)
      T.main[0] -= g / (h * h); // outgoing u' = +i lambda u at -R
    break;
  }
  case BcMode::CAL: {
    const double x0 = op.grid.R * (1.0 - bc.cal_frac);
    const double wref = std::max(std::abs(lambda.real()), 1.0);
    for (int i = 0; i < n; ++i) {
      const double r = std::abs(op.grid.node(i));
      if (r > x0) {
        const double t = (r - x0) / (op.grid.R - x0);
        // outgoing convention e^{-i lambda r}: lambda - i eps shifts the
        // diagonal of (P - lambda^2) by +2 i lambda eps, so absorption is +iW
        T.main[i] += cplx(0.0, bc.cal_strength * wref * t * t * t);
      }
    }
    break;
  }
  }
  return T;
}

} // namespace

Eigen::VectorXcd resolvent_apply(const DiscreteOperator &op, cplx lambda,
                                 const Eigen::VectorXcd &rhs,
                                 const BcSpec &bc) {
  if (rhs.size() != op.grid.n)
    throw std::invalid_argument("resolvent: rhs size mismatch");
  const double h = op.grid.h();
  const Tridiag T = shifted_system(op, lambda, bc);
  return thomas_solve(T, rhs, 1e-10 * 2.0 / (h * h));
}

Eigen::VectorXcd resolvent_apply_adjoint(const DiscreteOperator &op,
                                         cplx lambda,
                                         const Eigen::VectorXcd &rhs,
                                         const BcSpec &bc) {
  if (rhs.size() != op.grid.n)
    throw std::invalid_argument("resolvent: rhs size mismatch");
  const double h = op.grid.h();
  Tridiag T = shifted_system(op, lambda, bc);
  // A = H + diag(c) with H Hermitian: the adjoint keeps the off-diagonals
  // and conjugates the diagonal
  T.main = T.main.conjugate();
  return thomas_solve(T, rhs, 1e-10 * 2.0 / (h * h));
}

Eigen::MatrixXcd dense_resolvent(const DiscreteOperator &op, cplx lambda,
                                 const BcSpec &bc) {
  const int n = op.grid.n;
  const double h = op.grid.h();
  const Tridiag T = shifted_system(op, lambda, bc);
  Eigen::MatrixXcd out(n, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    out.col(j) = thomas_solve(T, e, 1e-10 * 2.0 / (h * h));
    e[j] = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient and weights

Eigen::VectorXcd gradient_apply(const Grid &grid, const Eigen::VectorXcd &u) {
  const int n = grid.n;
  const double inv2h = 0.5 / grid.h();
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    const cplx up = i + 1 < n ? u[i + 1] : cplx(0.0);
    const cplx um = i > 0 ? u[i - 1] : cplx(0.0);
    out[i] = (up - um) * inv2h;
  }
  return out;
}

Eigen::MatrixXcd gradient_matrix(const Grid &grid) {
  const int n = grid.n;
  const double inv2h = 0.5 / grid.h();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    D(i, i + 1) = inv2h;
    D(i + 1, i) = -inv2h;
  }
  return D;
}

Eigen::VectorXd mu_vector(const Grid &grid, const ThetaProfile &profile,
                          double c) {
  Eigen::VectorXd mu(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    mu[i] = std::exp(0.5 * profile.log_theta(c * std::sqrt(1.0 + x * x)));
  }
  return mu;
}

Eigen::VectorXd poly_weight_vector(const Grid &grid, double s) {
  Eigen::VectorXd w(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    w[i] = std::pow(1.0 + x * x, -0.5 * s);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Operator norm

double operator_norm(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &A,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &AH, int n,
    double tol, int max_iter) {
  std::mt19937 rng(0x5eedu);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i)
    x[i] = cplx(gauss(rng), gauss(rng));
  x.normalize();
  double prev = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXcd y = AH(A(x));
    const double nu = y.norm(); // estimates sigma_max^2
    if (nu == 0.0)
      return 0.0;
    x = y / nu;
    if (iter > 2 && std::abs(nu - prev) <= tol * nu + 1e-300)
      return std::sqrt(nu);
    prev = nu;
  }
  return std::sqrt(prev);
}

double matrix_norm(const Eigen::MatrixXcd &M, double tol) {
  const Eigen::MatrixXcd MH = M.adjoint();
  return operator_norm(
      [&M](const Eigen::VectorXcd &v) { return Eigen::VectorXcd(M * v); },
      [&MH](const Eigen::VectorXcd &v) { return Eigen::VectorXcd(MH * v); },
      static_cast<int>(M.cols()), tol);
}

} // namespace declab
