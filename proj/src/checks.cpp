#include "declab/checks.hpp"

#include "declab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace declab {

using cplx = std::complex<double>;

std::complex<double> resolvent_mode_deriv(double e, cplx lambda, int k) {
  if (e <= 0.0)
    throw std::domain_error("mode derivative: nonpositive eigenvalue");
  const double se = std::sqrt(e);
  // (e - z^2)^{-1} = (2 se)^{-1} [ (se - z)^{-1} + (se + z)^{-1} ]
  auto ipow = [](cplx base, int p) {
    cplx acc = 1.0;
    for (int i = 0; i < p; ++i)
      acc *= base;
    return acc;
  };
  const cplx am = 1.0 / ipow(se - lambda, k + 1);
  const cplx ap = 1.0 / ipow(se + lambda, k + 1);
  const double kfac = std::exp(log_factorial(k));
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  return kfac / (2.0 * se) * (am + sgn * ap);
}

double weighted_resolvent_deriv_norm(const DiscreteOperator &op,
                                     const SpectralDecomposition &dec,
                                     double lambda, int ell, int k,
                                     const Eigen::VectorXd &mu, double eps) {
  if (ell < 0 || ell > 1)
    throw std::invalid_argument("derivative norm: ell must be 0 or 1");
  if (k < 0)
    throw std::invalid_argument("derivative norm: negative order");
  const int n = op.grid.n;
  if (mu.size() != n)
    throw std::invalid_argument("derivative norm: weight size mismatch");
  const cplx z(lambda, -eps);
  Eigen::VectorXcd g(n);
  for (int j = 0; j < n; ++j)
    g[j] = resolvent_mode_deriv(dec.e[j], z, k);
  const Grid &grid = op.grid;
  const Eigen::VectorXcd muc = mu.cast<cplx>();
  auto A = [&](const Eigen::VectorXcd &x) {
    Eigen::VectorXcd t = muc.cwiseProduct(x);
    Eigen::VectorXcd s = dec.U.adjoint() * t;
    s.array() *= g.array();
    t = dec.U * s;
    if (ell == 1)
      t = gradient_apply(grid, t);
    return Eigen::VectorXcd(muc.cwiseProduct(t));
  };
  auto AH = [&](const Eigen::VectorXcd &x) {
    Eigen::VectorXcd t = muc.cwiseProduct(x);
    if (ell == 1)
      t = -gradient_apply(grid, t); // discrete gradient is antisymmetric
    Eigen::VectorXcd s = dec.U.adjoint() * t;
    s.array() *= g.array().conjugate();
    t = dec.U * s;
    return Eigen::VectorXcd(muc.cwiseProduct(t));
  };
  return operator_norm(A, AH, n);
}

Eigen::VectorXcd resolvent_deriv_apply(const DiscreteOperator &op, cplx lambda,
                                       int k, const Eigen::VectorXcd &x,
                                       const BcSpec &bc) {
  Eigen::VectorXcd dm2; // D_{k-2} x
  Eigen::VectorXcd dm1 = resolvent_apply(op, lambda, x, bc);
  for (int j = 1; j <= k; ++j) {
    Eigen::VectorXcd rhs = 2.0 * j * lambda * dm1;
    if (j >= 2)
      rhs += static_cast<double>(j) * (j - 1.0) * dm2;
    dm2 = dm1;
    dm1 = resolvent_apply(op, lambda, rhs, bc);
  }
  return dm1;
}

double weighted_deriv_norm_bc(const DiscreteOperator &op, cplx lambda, int ell,
                              int k, const Eigen::VectorXd &mu,
                              const BcSpec &bc) {
  if (ell < 0 || ell > 1)
    throw std::invalid_argument("derivative norm: ell must be 0 or 1");
  if (k < 0)
    throw std::invalid_argument("derivative norm: negative order");
  const int n = op.grid.n;
  if (mu.size() != n)
    throw std::invalid_argument("derivative norm: weight size mismatch");
  const Grid &grid = op.grid;
  const Eigen::VectorXcd muc = mu.cast<cplx>();
  // R^T x = conj(R^H conj x); the derivative recursion D_k is a polynomial
  // in R with scalar coefficients, so D_k^T is the same recursion in R^T
  auto solveT = [&](const Eigen::VectorXcd &x) {
    return Eigen::VectorXcd(
        resolvent_apply_adjoint(op, lambda, x.conjugate(), bc).conjugate());
  };
  auto derivT = [&](const Eigen::VectorXcd &x) {
    Eigen::VectorXcd dm2;
    Eigen::VectorXcd dm1 = solveT(x);
    for (int j = 1; j <= k; ++j) {
      Eigen::VectorXcd rhs = 2.0 * static_cast<double>(j) * lambda * dm1;
      if (j >= 2)
        rhs += static_cast<double>(j) * (j - 1.0) * dm2;
      dm2 = dm1;
      dm1 = solveT(rhs);
    }
    return dm1;
  };
  auto A = [&](const Eigen::VectorXcd &x) {
    Eigen::VectorXcd t =
        resolvent_deriv_apply(op, lambda, k, muc.cwiseProduct(x), bc);
    if (ell == 1)
      t = gradient_apply(grid, t);
    return Eigen::VectorXcd(muc.cwiseProduct(t));
  };
  // A^T = mu D_k^T (grad^T)^ell mu with grad^T = -grad; A^H y = conj(A^T conj y)
  auto AH = [&](const Eigen::VectorXcd &y) {
    Eigen::VectorXcd t = muc.cwiseProduct(y.conjugate());
    if (ell == 1)
      t = -gradient_apply(grid, t);
    t = derivT(t);
    return Eigen::VectorXcd(muc.cwiseProduct(t).conjugate());
  };
  return operator_norm(A, AH, n);
}

UniformEstimateReport uniform_estimate_check(const DiscreteOperator &op,
                                             const std::vector<double> &lambdas,
                                             double eps, double s,
                                             const BcSpec &bc) {
  if (lambdas.empty())
    throw std::invalid_argument("uniform estimate: empty frequency grid");
  const Eigen::VectorXcd W = poly_weight_vector(op.grid, s).cast<cplx>();
  UniformEstimateReport rep;
  rep.eps_stable = true;
  const int n = op.grid.n;
  const Grid &grid = op.grid;
  auto weighted_norm = [&](double lambda, int a, int b, double epsilon) {
    const cplx z(lambda, -epsilon);
    auto A = [&](const Eigen::VectorXcd &x) {
      Eigen::VectorXcd t = W.cwiseProduct(x);
      for (int q = 0; q < b; ++q)
        t = gradient_apply(grid, t);
      t = resolvent_apply(op, z, t, bc);
      for (int q = 0; q < a; ++q)
        t = gradient_apply(grid, t);
      return Eigen::VectorXcd(W.cwiseProduct(t));
    };
    auto AH = [&](const Eigen::VectorXcd &x) {
      Eigen::VectorXcd t = W.cwiseProduct(x);
      for (int q = 0; q < a; ++q)
        t = -gradient_apply(grid, t);
      t = resolvent_apply_adjoint(op, z, t, bc);
      for (int q = 0; q < b; ++q)
        t = -gradient_apply(grid, t);
      return Eigen::VectorXcd(W.cwiseProduct(t));
    };
    return operator_norm(A, AH, n, 1e-6);
  };
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b) {
      double ch = 0.0, ch_half = 0.0;
      for (double lambda : lambdas) {
        const double scale = std::pow(lambda, a + b - 1);
        ch = std::max(ch, weighted_norm(lambda, a, b, eps) / scale);
        ch_half =
            std::max(ch_half, weighted_norm(lambda, a, b, 0.5 * eps) / scale);
      }
      rep.constant[static_cast<size_t>(a)][static_cast<size_t>(b)] = ch;
      rep.sup_constant = std::max(rep.sup_constant, ch);
      if (std::abs(ch_half - ch) > 0.1 * std::max(ch, ch_half))
        rep.eps_stable = false;
    }
  // blow-up flag: the scaled norm at the top of the frequency grid dominates
  // the bottom by more than a factor 3
  {
    const double first =
        weighted_norm(lambdas.front(), 0, 0, eps) * lambdas.front();
    const double last =
        weighted_norm(lambdas.back(), 0, 0, eps) * lambdas.back();
    rep.blowup = last > 3.0 * first;
  }
  return rep;
}

HolderReport lap_continuity_check(const DiscreteOperator &op, double lambda,
                                  double s, const std::vector<double> &eps_seq,
                                  const BcSpec &bc) {
  if (eps_seq.size() < 3)
    throw std::invalid_argument("continuity check: need at least 3 epsilons");
  for (size_t i = 1; i < eps_seq.size(); ++i)
    if (!(eps_seq[i] < eps_seq[i - 1]))
      throw std::invalid_argument("continuity check: epsilons must decrease");
  const int n = op.grid.n;
  const Eigen::VectorXcd W = poly_weight_vector(op.grid, s).cast<cplx>();
  HolderReport rep;
  std::vector<double> steps;
  for (size_t i = 0; i + 1 < eps_seq.size(); ++i) {
    const cplx z1(lambda, -eps_seq[i]);
    const cplx z2(lambda, -eps_seq[i + 1]);
    auto A = [&](const Eigen::VectorXcd &x) {
      const Eigen::VectorXcd wx = W.cwiseProduct(x);
      const Eigen::VectorXcd diff =
          resolvent_apply(op, z1, wx, bc) - resolvent_apply(op, z2, wx, bc);
      return Eigen::VectorXcd(W.cwiseProduct(diff));
    };
    auto AH = [&](const Eigen::VectorXcd &x) {
      const Eigen::VectorXcd wx = W.cwiseProduct(x);
      const Eigen::VectorXcd diff = resolvent_apply_adjoint(op, z1, wx, bc) -
                                    resolvent_apply_adjoint(op, z2, wx, bc);
      return Eigen::VectorXcd(W.cwiseProduct(diff));
    };
    rep.diff_norms.push_back(operator_norm(A, AH, n));
    steps.push_back(eps_seq[i] - eps_seq[i + 1]);
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < steps.size(); ++i) {
    lx.push_back(std::log(steps[i]));
    ly.push_back(std::log(rep.diff_norms[i] + 1e-300));
  }
  const auto fit = linear_fit(lx, ly);
  rep.theta = fit.first;
  rep.C = std::exp(fit.second);
  rep.cauchy = true;
  for (size_t i = 1; i < rep.diff_norms.size(); ++i)
    if (rep.diff_norms[i] > rep.diff_norms[i - 1])
      rep.cauchy = false;
  rep.pass = rep.theta > 0.3;
  return rep;
}

double dilation_identity_residual(const DiscreteOperator &op_free, cplx lambda,
                                  double s) {
  if (!(lambda.imag() < 0.0))
    throw std::invalid_argument("dilation identity: need Im lambda < 0");
  const int n = op_free.grid.n;
  const Grid &grid = op_free.grid;
  const Eigen::VectorXcd W = poly_weight_vector(grid, s).cast<cplx>();
  Eigen::VectorXcd X(n);
  for (int i = 0; i < n; ++i)
    X[i] = grid.node(i);
  auto R = [&](const Eigen::VectorXcd &v, cplx z) {
    return resolvent_apply(op_free, z, v);
  };
  auto grad = [&](const Eigen::VectorXcd &v) {
    return gradient_apply(grid, v);
  };
  // residual operator of
  //   -lambda^2 W R^2 W = 1/2 W R (d r) W + 1/2 W R W - 1/2 W (r d) R W
  // (reduced coordinates: the generator is r d/dr, and d/dr (r .) = r d/dr + 1)
  auto apply = [&](const Eigen::VectorXcd &x, cplx z, bool adjoint) {
    if (!adjoint) {
      const Eigen::VectorXcd wx = W.cwiseProduct(x);
      const Eigen::VectorXcd rwx = R(wx, z);
      const Eigen::VectorXcd lhs =
          -(z * z) * W.cwiseProduct(R(rwx, z));
      const Eigen::VectorXcd t1 =
          0.5 * W.cwiseProduct(R(grad(X.cwiseProduct(wx)), z));
      const Eigen::VectorXcd t2 = 0.5 * W.cwiseProduct(rwx);
      const Eigen::VectorXcd t3 =
          0.5 * W.cwiseProduct(X.cwiseProduct(grad(rwx)));
      return Eigen::VectorXcd(lhs - t1 - t2 + t3);
    }
    // adjoint: reverse factors, conjugate-transpose each one
    // (grad^H = -grad, R(z)^H = R(conj z))
    const cplx zc = std::conj(z);
    const Eigen::VectorXcd wx = W.cwiseProduct(x);
    const Eigen::VectorXcd lhs =
        -std::conj(z * z) * W.cwiseProduct(R(R(wx, zc), zc));
    const Eigen::VectorXcd t1 =
        -0.5 * W.cwiseProduct(X.cwiseProduct(grad(R(wx, zc))));
    const Eigen::VectorXcd t2 = 0.5 * W.cwiseProduct(R(wx, zc));
    const Eigen::VectorXcd t3 =
        -0.5 * W.cwiseProduct(R(grad(X.cwiseProduct(wx)), zc));
    return Eigen::VectorXcd(lhs - t1 - t2 + t3);
  };
  const double res_norm = operator_norm(
      [&](const Eigen::VectorXcd &x) { return apply(x, lambda, false); },
      [&](const Eigen::VectorXcd &x) { return apply(x, lambda, true); }, n,
      1e-8);
  const cplx lc = std::conj(lambda);
  const double ref_norm = operator_norm(
      [&](const Eigen::VectorXcd &x) {
        const Eigen::VectorXcd wx = W.cwiseProduct(x);
        return Eigen::VectorXcd((lambda * lambda) *
                                W.cwiseProduct(R(R(wx, lambda), lambda)));
      },
      [&](const Eigen::VectorXcd &x) {
        const Eigen::VectorXcd wx = W.cwiseProduct(x);
        return Eigen::VectorXcd(std::conj(lambda * lambda) *
                                W.cwiseProduct(R(R(wx, lc), lc)));
      },
      n, 1e-8);
  return res_norm / ref_norm;
}

double fourier_duality_check(const SpectralDecomposition &dec_free, cplx lambda,
                             double T, int n_t) {
  if (!(lambda.imag() < 0.0))
    throw std::invalid_argument("duality check: need Im lambda < 0");
  if (n_t < 2 || n_t % 2 != 0)
    throw std::invalid_argument("duality check: Simpson needs an even panel "
                                "count >= 2");
  const int n = static_cast<int>(dec_free.e.size());
  const double ht = T / n_t;
  double worst = 0.0, ref = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w = std::sqrt(dec_free.e[j]);
    cplx acc = 0.0;
    for (int mm = 0; mm <= n_t; ++mm) {
      const double t = mm * ht;
      const double simp =
          (mm == 0 || mm == n_t) ? 1.0 : (mm % 2 == 1 ? 4.0 : 2.0);
      acc += simp * std::exp(cplx(0.0, -t) * lambda) * std::cos(t * w);
    }
    acc *= ht / 3.0;
    // lambda (P0 - lambda^2)^{-1} = -i * integral_0^inf of
    //   e^{-i t lambda} cos(t sqrt(P0)) dt   for Im lambda < 0
    const cplx quad = cplx(0.0, -1.0) * acc;
    const cplx exact = lambda / (dec_free.e[j] - lambda * lambda);
    worst = std::max(worst, std::abs(quad - exact));
    ref = std::max(ref, std::abs(exact));
  }
  return worst / ref;
}

LowFreqReport lowfreq_check(const DiscreteOperator &op,
                            const std::vector<double> &lambdas, double eps,
                            const Eigen::VectorXd &mu, const BcSpec &bc) {
  if (lambdas.size() < 3)
    throw std::invalid_argument("lowfreq check: need at least 3 frequencies");
  const int n = op.grid.n;
  const Grid &grid = op.grid;
  const Eigen::VectorXcd muc = mu.cast<cplx>();
  LowFreqReport rep;
  rep.lambdas = lambdas;
  for (double lambda : lambdas) {
    const cplx z(lambda, -eps);
    double total = 0.0;
    for (int ell = 0; ell <= 1; ++ell) {
      auto A = [&](const Eigen::VectorXcd &x) {
        Eigen::VectorXcd t = resolvent_apply(op, z, muc.cwiseProduct(x), bc);
        if (ell == 1)
          t = gradient_apply(grid, t);
        return Eigen::VectorXcd(muc.cwiseProduct(t));
      };
      auto AH = [&](const Eigen::VectorXcd &x) {
        Eigen::VectorXcd t = muc.cwiseProduct(x);
        if (ell == 1)
          t = -gradient_apply(grid, t);
        t = resolvent_apply_adjoint(op, z, t, bc);
        return Eigen::VectorXcd(muc.cwiseProduct(t));
      };
      total += operator_norm(A, AH, n, 1e-6);
    }
    rep.values.push_back(total);
  }
  rep.sup = *std::max_element(rep.values.begin(), rep.values.end());
  // bounded iff the two smallest frequencies do not dominate the rest
  std::vector<double> sorted_l = lambdas;
  std::sort(sorted_l.begin(), sorted_l.end());
  double small_max = 0.0, rest_max = 0.0;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    double &slot = lambdas[i] <= sorted_l[1] ? small_max : rest_max;
    slot = std::max(slot, rep.values[i]);
  }
  rep.bounded = small_max <= 3.0 * rest_max;
  return rep;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  os << "lambda,eps,ell,k,log_norm,bc_mode,case\n";
  char buf[256];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d,%.17g,%s,%s\n",
                  r.lambda, r.eps, r.ell, r.k, r.log_norm, r.bc_mode.c_str(),
                  r.pcase.c_str());
    os << buf;
  }
  return os.str();
}

} // namespace declab
