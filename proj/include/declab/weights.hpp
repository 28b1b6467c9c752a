#ifndef DECLAB_WEIGHTS_HPP
#define DECLAB_WEIGHTS_HPP

#include "declab/theta.hpp"

#include <string>
#include <vector>

namespace declab {

/// The growth sequence m_k (m_0 = 1, increasing) together with the
/// admissibility constants of the product/inverse calculus. All arithmetic is
/// in log space: (k!)^{1/s} overflows double precision well before k = 24 for
/// small s.
class WeightSequence {
public:
  enum class Provenance { Factorial, FactorialLog, Tabulated };

  // m_k = (k!)^{1/s}
  static WeightSequence factorial_power(double s, int K = 24);
  // m_k = (k!)^{1/s} (log(k+e))^{-beta k/s}
  static WeightSequence factorial_power_log(double s, double beta, int K = 24);
  static WeightSequence tabulated(const std::vector<double> &values);

  Provenance provenance() const { return prov_; }
  int K() const { return int(logm_.size()) - 1; }
  double s() const { return s_; }

  double log_m(int k) const; // extends by closed form beyond stored K
  double m(int k) const { return std::exp(log_m(k)); }

  double C3 = 0.0, C4 = 0.0; // set by check_weight_sequence

  std::string serialize() const;
  static WeightSequence deserialize(const std::string &json_text);

private:
  WeightSequence() = default;
  Provenance prov_ = Provenance::Factorial;
  double s_ = 1.0, beta_ = 0.0;
  mutable std::vector<double> logm_;
  double closed_form_log_m(int k) const;
};

struct WeightCheckResult {
  double C3_min = 0.0;
  double C4_min = 0.0;
  bool ok = false;
};

// Minimal constants such that
//   k! + mtilde_k + m_{k+2} + sqrt(m_{2k}) <= C3^{k+1} m_k   (k <= K/2 - 1)
//   m_nu m_{k-nu} k! / (nu! (k-nu)! m_k) <= C4              (0 <= nu <= k <= K)
// hold; mtilde passes log(mtilde_k). Throws for K < 4.
WeightCheckResult check_weight_sequence(WeightSequence &seq,
                                        const std::vector<double> &log_mtilde,
                                        int K);

// Decay clock: biggest k >= 1 with m_k^{1/k} <= t, or 0 if none. t > 1.
int k_of_t(const WeightSequence &seq, double t);

/// Per-order operator bounds b_k <= M * C^{k+1} m_k kept in log space.
struct DerivativeBoundSeq {
  std::vector<double> log_b;
  double M = 1.0;     // lambda-dependent scale
  double baseC = 1.0; // smallest C closing the envelope

  static DerivativeBoundSeq envelope(double M, double C,
                                     const WeightSequence &seq, int K);
};

// Exact Leibniz sum bound over pairwise folds of the factors; baseC of the
// result is the smallest C with sum_k <= (prod M_j) C^{k+1} m_k.
DerivativeBoundSeq
leibniz_bound_propagate(const std::vector<DerivativeBoundSeq> &factors,
                        const WeightSequence &seq, int K);

struct InverseBoundResult {
  double B = 0.0;
  DerivativeBoundSeq closed_form; // B^{k+1} m_k
  DerivativeBoundSeq recursion;   // direct evaluation of the inverse recursion
  bool recursion_within_bound = false;
};

// B = max(2C, 2C*Ctilde*C4); also runs the inverse-derivative recursion from
// b_0 = Ctilde and confirms it stays below B^{k+1} m_k.
InverseBoundResult inverse_bound_propagate(double C, double Ctilde,
                                           const WeightSequence &seq, int K);

} // namespace declab

#endif
