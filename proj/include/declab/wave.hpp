#pragma once

// Exact spectral-calculus wave propagation u(t) = cos(t sqrt(P)) f1 +
// P^{-1/2} sin(t sqrt(P)) f2 with an optional smooth high-pass filter on
// sqrt(P), weighted local-energy traces, the energy-flux identity through
// the commutator operator N(mu), tail integral estimates against a weight
// sequence, and one-sided decay-envelope fitting.

#include "declab/cutoff.hpp"
#include "declab/operator.hpp"
#include "declab/weights.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace declab {

struct WaveState {
  Eigen::VectorXcd u; // amplitude
  Eigen::VectorXcd v; // time derivative of the amplitude
  double t = 0.0;
};

// Closed-form modewise evolution on the eigenbasis; exact in time. With
// delta > 0 the data are filtered by psi(sqrt(e_j) / delta) where psi is the
// cutoff's cumulative profile; delta == 0 with cut == nullptr propagates the
// raw data (zero modes then use the t-linear limit of sin(t sqrt(e))/sqrt(e)).
// Throws std::domain_error when the spectrum has a genuinely negative
// eigenvalue (the evolution is only defined for nonnegative operators).
std::vector<WaveState> propagate(const SpectralDecomposition &dec,
                                 const Eigen::VectorXcd &f1,
                                 const Eigen::VectorXcd &f2,
                                 const std::vector<double> &times,
                                 double delta = 0.0,
                                 const GevreyCutoff *cut = nullptr);

struct EnergyParts {
  double dt = 0.0;   // |mu v|^2
  double grad = 0.0; // |mu (i grad + b) u|^2 (plain gradient when b is absent)
  double mass = 0.0; // |mu u|^2
  double total() const { return dt + grad + mass; }
};

// Weighted local energy of a state; the gradient term uses the magnetic
// derivative when the potential carries a magnetic component. Throws
// std::invalid_argument on grid-size mismatch.
EnergyParts local_energy_parts(const WaveState &state, const Grid &grid,
                               const PotentialSpec &pot,
                               const Eigen::VectorXd &mu);
double local_energy(const WaveState &state, const Grid &grid,
                    const PotentialSpec &pot, const Eigen::VectorXd &mu);

// mu N(mu) u = [i grad, mu^2](i grad + b) u - V mu^2 u, assembled with
// centered differences; the flux side of the energy identity
//   dE/dt = 2 Re <mu N(mu) u, mu v> / mu-pairing + 2 Re <mu v, mu u>.
Eigen::VectorXcd n_mu_apply(const Grid &grid, const PotentialSpec &pot,
                            const Eigen::VectorXd &mu,
                            const Eigen::VectorXcd &u);

// |centered dE/dt - flux identity| / (|dE/dt| + floor) from states at
// t - h, t, t + h. Throws std::invalid_argument when the time stamps do not
// form a symmetric stencil or h is below the rounding floor.
double energy_derivative_residual(const WaveState &minus,
                                  const WaveState &center,
                                  const WaveState &plus, const Grid &grid,
                                  const PotentialSpec &pot,
                                  const Eigen::VectorXd &mu,
                                  double eps_floor = 1e-300);

struct EnergyTrace {
  std::vector<double> times; // strictly increasing
  std::vector<double> E, E_dt, E_grad, E_mass;
  double delta = 0.0;
  bool filtered = false;
  std::string potential_hash;

  std::string to_csv() const; // t,E,E_dt_term,E_grad_term,E_mass_term
  void validate() const;
};

// Propagates and evaluates the weighted energy on a time grid.
EnergyTrace compute_trace(const SpectralDecomposition &dec, const Grid &grid,
                          const PotentialSpec &pot, const Eigen::VectorXd &mu,
                          const Eigen::VectorXcd &f1,
                          const Eigen::VectorXcd &f2,
                          const std::vector<double> &times, double delta = 0.0,
                          const GevreyCutoff *cut = nullptr);

struct IntegralEstimateReport {
  double C = 0.0;       // minimal C with tail(t) <= C^{2k+2} m_k^2 t^{-2k} f2
  double tail_fraction = 0.0; // analytic-tail share of the smallest integral
  bool ok = false;      // finite C and the tail share is under control
  bool non_decay = false; // trace does not decay at the end; C meaningless
  std::string message;
};

// Tail integrals int_t^infty E_comp(s) ds by trapezoid plus an exponential
// extrapolation of the final segment; reports the minimal admissible C for
// the k-th weighted estimate against the data norm f_norm2 = |f|^2.
IntegralEstimateReport integral_estimate_check(const EnergyTrace &trace,
                                               const WeightSequence &seq,
                                               int k,
                                               const std::vector<double> &t_grid,
                                               double f_norm2);

struct DecayFit {
  double c0 = 0.0;       // decay clock rate: envelope exp(-k(c0 t))
  double C0 = 0.0;       // envelope amplitude
  double s_hat = 0.0;    // fitted exponent of -log sqrt(E) ~ t^s
  double residual = 0.0; // one-sided envelope slack at the final quarter
  double T_max = 0.0;    // last trusted time of the fitted trace
  double filter_delta = 0.0;
  bool floor_saturated = false; // trace hit the numerical floor (fast decay)

  std::string to_json() const;
};

// One-sided envelope fit sqrt(E(t)) <= C0 exp(-k(c0 t)) with the decay clock
// k(.) evaluated through the weight sequence; largest c0 whose minimal C0
// stays within 10x slack over the final quarter. For exponential-power
// profiles also regresses log(-log(sqrt(E)/C0)) on log t for s_hat. Throws
// std::runtime_error when the trace envelope is non-monotone (boundary
// reflections contaminate the tail).
DecayFit fit_decay(const EnergyTrace &trace, const WeightSequence &seq,
                   const ThetaProfile &profile);

} // namespace declab
