#include "declab/born.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace declab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

namespace {

// cubic absorbing ramp on the outer layer; one fixed profile serves every
// spectral parameter of an assembly so all matrix identities stay exact
Eigen::VectorXd absorber(const Grid &grid, double frac, double strength,
                         double wref) {
  Eigen::VectorXd W = Eigen::VectorXd::Zero(grid.n);
  const double x0 = grid.R * (1.0 - frac);
  for (int i = 0; i < grid.n; ++i) {
    const double r = std::abs(grid.node(i));
    if (r > x0) {
      const double t = (r - x0) / (grid.R - x0);
      W[i] = strength * wref * t * t * t;
    }
  }
  return W;
}

// dense inverse of (tridiagonal op) - i W - zeta^2 by Thomas back-solves
Mat damped_inverse(const DiscreteOperator &op, const Eigen::VectorXd &W,
                   cplx zeta) {
  const int n = op.grid.n;
  Vec main(n), up(n - 1), lo(n - 1);
  const cplx shift = zeta * zeta;
  for (int i = 0; i < n; ++i)
    main[i] = cplx(op.diag[i], W[i]) - shift;
  for (int i = 0; i + 1 < n; ++i) {
    up[i] = op.off[i];
    lo[i] = std::conj(op.off[i]);
  }
  const double h = op.grid.h();
  const double floor = 1e-12 * 2.0 / (h * h);
  Vec piv(n), cp(n);
  piv[0] = main[0];
  if (std::abs(piv[0]) < floor)
    throw std::runtime_error("born series: near-singular shifted system");
  cp[0] = up[0] / piv[0];
  for (int i = 1; i < n; ++i) {
    piv[i] = main[i] - lo[i - 1] * cp[i - 1];
    if (std::abs(piv[i]) < floor)
      throw std::runtime_error("born series: near-singular shifted system");
    if (i + 1 < n)
      cp[i] = up[i] / piv[i];
  }
  Mat out(n, n);
  Vec dp(n);
  for (int j = 0; j < n; ++j) {
    dp.head(j).setZero();
    dp[j] = 1.0 / piv[j];
    for (int i = j + 1; i < n; ++i)
      dp[i] = -lo[i - 1] * dp[i - 1] / piv[i];
    out(n - 1, j) = dp[n - 1];
    for (int i = n - 2; i >= 0; --i)
      out(i, j) = dp[i] - cp[i] * out(i + 1, j);
  }
  return out;
}

double rel_err(const Mat &got, const Mat &want) {
  return (got - want).norm() / want.norm();
}

BornReport assemble_magnetic(const Grid &grid, const PotentialSpec &pot,
                             double z, double lambda, const BornOptions &opt) {
  const int n = grid.n;
  const DiscreteOperator opP = build_operator(grid, pot);
  const DiscreteOperator op0 = build_free_operator(grid);
  const double wref = std::max({std::abs(lambda), std::abs(z), 1.0});
  const Eigen::VectorXd W =
      absorber(grid, opt.cal_frac, opt.cal_strength, wref);

  const Mat Rz = damped_inverse(opP, W, z);
  const Mat Rl = damped_inverse(opP, W, lambda);
  const Mat R0l = damped_inverse(op0, W, lambda);
  const Mat R0z = damped_inverse(op0, W, z);
  const Mat dR0 = R0l - R0z;

  const Vec mu = mu_vector(grid, pot.profile, pot.c).cast<cplx>();
  const Vec mui = mu.cwiseInverse();
  Vec Vt(n), bb(n);
  for (int i = 0; i < n; ++i) {
    bb[i] = pot.b[static_cast<size_t>(i)];
    Vt[i] = pot.V[static_cast<size_t>(i)] +
            pot.b[static_cast<size_t>(i)] * pot.b[static_cast<size_t>(i)];
  }
  const Mat D = gradient_matrix(grid);
  const cplx im(0.0, 1.0);
  // electric part of the perturbation: Vt + i (div b .)
  const Mat S1 = Mat(Vt.asDiagonal()) + im * D * bb.asDiagonal();
  // J = i mu^{-1} b . grad; the magnetic part of the perturbation is mu J
  const Mat J = im * mui.asDiagonal() * (bb.asDiagonal() * D);

  const Mat I = Mat::Identity(n, n);
  const Mat S1mui = S1 * mui.asDiagonal();
  const Mat E0 = mu.asDiagonal() * dR0;
  const Mat E1 = J * dR0;
  const Mat A0 = I - mu.asDiagonal() * (Rz * S1mui);
  const Mat A1 = -(mu.asDiagonal() * (Rz * Mat(mu.asDiagonal())));
  const Mat B0 = -(J * (Rz * S1mui));
  const Mat B1 = I - J * (Rz * Mat(mu.asDiagonal()));
  const Mat M = A0 * E0 + A1 * E1;
  const Mat N = B0 * E0 + B1 * E1;

  BornReport rep;
  const Mat T3 = -(N * mu.asDiagonal());
  const Mat T1 = (J * Rz + N) * mu.asDiagonal();
  const Mat T2 = -(N * S1mui);
  rep.T3_norm = matrix_norm(T3);
  if (rep.T3_norm > opt.gamma_max)
    throw std::runtime_error(
        "born series: contraction block exceeds gamma (gradient coupling); "
        "reduce |lambda - z| or the potential size");
  const Mat iT3inv = (I - T3).partialPivLu().inverse();
  const Mat MDmu = M * mu.asDiagonal();
  const Mat F2 = -(M * S1mui) - MDmu * (iT3inv * T2);
  const Mat F1 = Mat(mu.asDiagonal() * (Rz * Mat(mu.asDiagonal()))) + MDmu -
                 MDmu * (iT3inv * T1);
  rep.F2_norm = matrix_norm(F2);
  if (rep.F2_norm > opt.gamma_max)
    throw std::runtime_error(
        "born series: contraction block exceeds gamma (resolvent coupling); "
        "reduce |lambda - z| or the potential size");
  rep.assembled = (I - F2).partialPivLu().solve(F1);
  rep.direct = mu.asDiagonal() * (Rl * Mat(mu.asDiagonal()));
  rep.rel_error = rel_err(rep.assembled, rep.direct);

  // gradient block from the assembled quantities:
  //   mu grad R(lambda) mu = mu grad R0(lambda) [ mu - S1 mu^{-1} X - mu Y ]
  const Mat Y = iT3inv * (T1 + T2 * rep.assembled);
  const Mat muDR0l = mu.asDiagonal() * (D * R0l);
  rep.assembled_grad = muDR0l * mu.asDiagonal() -
                       muDR0l * (S1mui * rep.assembled) -
                       muDR0l * (mu.asDiagonal() * Y);
  rep.direct_grad = mu.asDiagonal() * (D * (Rl * Mat(mu.asDiagonal())));
  rep.rel_error_grad = rel_err(rep.assembled_grad, rep.direct_grad);
  return rep;
}

BornReport assemble_obstacle(const Grid &grid, const PotentialSpec &pot,
                             double z, double lambda, const BornOptions &opt) {
  if (grid.d == 2)
    throw std::invalid_argument("born series: the obstacle assembly embeds "
                                "into the radial reduction, unavailable in 2D");
  const double h = grid.h();
  const double mf = grid.a / h;
  const int m = static_cast<int>(std::lround(mf));
  if (std::abs(mf - m) > 1e-9 || m < 1)
    throw std::invalid_argument("born series: obstacle radius must be an "
                                "integer multiple of the grid spacing");
  const int ne = grid.n;
  const int nf = ne + m;
  Grid full;
  full.geometry = Geometry::Radial;
  full.n = nf;
  full.R = grid.R;
  full.d = grid.d;
  full.validate();

  const DiscreteOperator opE = build_operator(grid, pot);
  const DiscreteOperator op0 = build_free_operator(full);
  const double wref = std::max({std::abs(lambda), std::abs(z), 1.0});
  const Eigen::VectorXd Wf =
      absorber(full, opt.cal_frac, opt.cal_strength, wref);
  Eigen::VectorXd We(ne);
  for (int i = 0; i < ne; ++i)
    We[i] = Wf[i + m]; // aligned nodes share the absorber profile

  const Mat RzE = damped_inverse(opE, We, z);
  const Mat RlE = damped_inverse(opE, We, lambda);
  const Mat R0l = damped_inverse(op0, Wf, lambda);
  const Mat R0z = damped_inverse(op0, Wf, z);
  const Mat dR0 = R0l - R0z;

  auto embed = [&](const Mat &Me) {
    Mat out = Mat::Zero(nf, nf);
    out.block(m, m, ne, ne) = Me;
    return out;
  };
  const Mat Rz = embed(RzE);
  const Mat Rl = embed(RlE);

  // cutoff eta: 1 on [0, a + w1], smooth fall to 0 over the next w2
  const double w1 = std::max(opt.eta_plateau, 2.0 * h);
  const double w2 = opt.eta_width;
  auto fstep = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  Eigen::VectorXd eta(nf), Vfull = Eigen::VectorXd::Zero(nf);
  for (int i = 0; i < nf; ++i) {
    const double r = full.node(i);
    const double t = (r - grid.a - w1) / w2;
    if (t <= 0.0)
      eta[i] = 1.0;
    else if (t >= 1.0)
      eta[i] = 0.0;
    else
      eta[i] = fstep(1.0 - t) / (fstep(t) + fstep(1.0 - t));
    if (i >= m)
      Vfull[i] = pot.V[static_cast<size_t>(i - m)];
  }

  // G = [eta, P0]; only the off-diagonals across the transition band survive
  Mat G = Mat::Zero(nf, nf);
  for (int i = 0; i + 1 < nf; ++i) {
    const cplx c = op0.off[i];
    G(i, i + 1) = c * (eta[i] - eta[i + 1]);
    G(i + 1, i) = c * (eta[i + 1] - eta[i]);
  }

  const Vec mu = mu_vector(full, pot.profile, pot.c).cast<cplx>();
  const Vec mui = mu.cwiseInverse();
  const Vec om = (1.0 - eta.array()).matrix().cast<cplx>();      // 1 - eta
  const Vec plateau =
      (eta.array() * (2.0 - eta.array())).matrix().cast<cplx>(); // eta(2-eta)
  const Vec oV = (om.array() * Vfull.cast<cplx>().array()).matrix();

  const Mat I = Mat::Identity(nf, nf);
  const Mat Q1 = mu.asDiagonal() *
                 ((Mat(om.asDiagonal()) - Rz * (G + Mat(oV.asDiagonal()))) *
                  Mat(mui.asDiagonal()));
  const Mat GmV = G - Mat(oV.asDiagonal());
  const cplx dz2 = lambda * lambda - z * z;

  BornReport rep;
  const Vec plmui = (plateau.array() * mui.array()).matrix();
  const Mat K =
      dz2 * (mu.asDiagonal() * (Rz * Mat(plmui.asDiagonal()))) +
      Q1 * (Mat(mu.asDiagonal()) * (dR0 * (GmV * Mat(mui.asDiagonal()))));
  rep.K_norm = matrix_norm(K);
  if (rep.K_norm > opt.gamma_max)
    throw std::runtime_error(
        "born series: obstacle contraction block exceeds gamma; reduce "
        "|lambda - z| or the potential size");
  const Mat muDmu = mu.asDiagonal() * (dR0 * Mat(mu.asDiagonal()));
  const Mat rhs = Mat(mu.asDiagonal() * (Rz * Mat(mu.asDiagonal()))) +
                  Q1 * (muDmu * Mat(om.asDiagonal()));
  rep.assembled = (I - K).partialPivLu().solve(rhs);
  rep.direct = mu.asDiagonal() * (Rl * Mat(mu.asDiagonal()));
  rep.rel_error = rel_err(rep.assembled, rep.direct);
  return rep;
}

} // namespace

BornReport born_series_assemble(const Grid &grid, const PotentialSpec &pot,
                                double z, double lambda,
                                const BornOptions &opt) {
  grid.validate();
  if (pot.pcase == PotCase::B) {
    if (grid.geometry != Geometry::ExteriorRadial)
      throw std::invalid_argument("born series: obstacle case needs an "
                                  "exterior grid");
    return assemble_obstacle(grid, pot, z, lambda, opt);
  }
  return assemble_magnetic(grid, pot, z, lambda, opt);
}

} // namespace declab
