#include "declab/weights.hpp"

#include "declab/numerics.hpp"

#include <nlohmann/json.hpp>

namespace declab {

using nlohmann::json;

double WeightSequence::closed_form_log_m(int k) const {
  double lf = log_factorial(k) / s_;
  if (prov_ == Provenance::FactorialLog)
    lf -= beta_ * k / s_ * std::log(std::log(k + std::exp(1.0)));
  return lf;
}

WeightSequence WeightSequence::factorial_power(double s, int K) {
  if (s <= 0.0 || s > 1.0) throw std::domain_error("WeightSequence: 0 < s <= 1");
  WeightSequence w;
  w.prov_ = Provenance::Factorial;
  w.s_ = s;
  w.logm_.resize(K + 1);
  for (int k = 0; k <= K; ++k) w.logm_[k] = w.closed_form_log_m(k);
  return w;
}

WeightSequence WeightSequence::factorial_power_log(double s, double beta, int K) {
  if (s <= 0.0 || s > 1.0 || beta <= 0.0)
    throw std::domain_error("WeightSequence: 0 < s <= 1, beta > 0");
  WeightSequence w;
  w.prov_ = Provenance::FactorialLog;
  w.s_ = s;
  w.beta_ = beta;
  w.logm_.resize(K + 1);
  for (int k = 0; k <= K; ++k) w.logm_[k] = w.closed_form_log_m(k);
  return w;
}

WeightSequence WeightSequence::tabulated(const std::vector<double> &values) {
  if (values.size() < 2 || values[0] != 1.0)
    throw std::invalid_argument("WeightSequence: need m_0 = 1");
  for (size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i + 1] < values[i] || values[i] <= 0.0)
      throw std::invalid_argument("WeightSequence: must be positive increasing");
  WeightSequence w;
  w.prov_ = Provenance::Tabulated;
  w.logm_.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) w.logm_[i] = std::log(values[i]);
  return w;
}

double WeightSequence::log_m(int k) const {
  if (k < 0) throw std::domain_error("WeightSequence: k >= 0");
  if (k < int(logm_.size())) return logm_[k];
  if (prov_ == Provenance::Tabulated)
    throw std::runtime_error("WeightSequence: tabulated sequence exhausted");
  while (int(logm_.size()) <= k) logm_.push_back(closed_form_log_m(int(logm_.size())));
  return logm_[k];
}

std::string WeightSequence::serialize() const {
  json j;
  j["provenance"] = (prov_ == Provenance::Factorial      ? "factorial-power"
                     : prov_ == Provenance::FactorialLog ? "factorial-power-log"
                                                         : "tabulated");
  j["s"] = s_;
  j["beta"] = beta_;
  j["log_values"] = logm_;
  j["C3"] = C3;
  j["C4"] = C4;
  return j.dump();
}

WeightSequence WeightSequence::deserialize(const std::string &text) {
  json j = json::parse(text);
  std::string p = j.at("provenance");
  WeightSequence w;
  if (p == "factorial-power")
    w = factorial_power(j.at("s"), int(j.at("log_values").size()) - 1);
  else if (p == "factorial-power-log")
    w = factorial_power_log(j.at("s"), j.at("beta"),
                            int(j.at("log_values").size()) - 1);
  else {
    w.prov_ = Provenance::Tabulated;
    w.logm_ = j.at("log_values").get<std::vector<double>>();
  }
  w.C3 = j.at("C3");
  w.C4 = j.at("C4");
  return w;
}

WeightCheckResult check_weight_sequence(WeightSequence &seq,
                                        const std::vector<double> &log_mtilde,
                                        int K) {
  if (K < 4) throw std::invalid_argument("check_weight_sequence: K >= 4 required");
  WeightCheckResult res;
  double logC3 = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= K / 2 - 1; ++k) {
    if (k >= int(log_mtilde.size()))
      throw std::invalid_argument("check_weight_sequence: mtilde too short");
    double num = log_factorial(k);
    num = log_add(num, log_mtilde[k]);
    num = log_add(num, seq.log_m(k + 2));
    num = log_add(num, 0.5 * seq.log_m(2 * k));
    logC3 = std::max(logC3, (num - seq.log_m(k)) / (k + 1));
  }
  double logC4 = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= K; ++k)
    for (int nu = 0; nu <= k; ++nu)
      logC4 = std::max(logC4, seq.log_m(nu) + seq.log_m(k - nu) +
                                  log_factorial(k) - log_factorial(nu) -
                                  log_factorial(k - nu) - seq.log_m(k));
  res.C3_min = std::exp(logC3);
  res.C4_min = std::exp(logC4);
  res.ok = std::isfinite(res.C3_min) && std::isfinite(res.C4_min);
  seq.C3 = res.C3_min;
  seq.C4 = res.C4_min;
  return res;
}

int k_of_t(const WeightSequence &seq, double t) {
  if (t <= 1.0) throw std::domain_error("k_of_t: t > 1 required");
  double logt = std::log(t);
  int best = 0;
  for (int k = 1;; ++k) {
    double lm = seq.log_m(k); // throws for exhausted tabulated sequences
    if (lm / k <= logt)
      best = k;
    else if (k > best + 2) // m_k^{1/k} is eventually increasing; small slack
      break;
    if (k > 100000)
      throw std::runtime_error("k_of_t: no crossing found");
  }
  return best;
}

DerivativeBoundSeq DerivativeBoundSeq::envelope(double M, double C,
                                               const WeightSequence &seq,
                                               int K) {
  DerivativeBoundSeq b;
  b.M = M;
  b.baseC = C;
  b.log_b.resize(K + 1);
  for (int k = 0; k <= K; ++k)
    b.log_b[k] = std::log(M) + (k + 1) * std::log(C) + seq.log_m(k);
  return b;
}

DerivativeBoundSeq
leibniz_bound_propagate(const std::vector<DerivativeBoundSeq> &factors,
                        const WeightSequence &seq, int K) {
  if (factors.empty())
    throw std::invalid_argument("leibniz_bound_propagate: no factors");
  DerivativeBoundSeq acc = factors[0];
  if (int(acc.log_b.size()) <= K)
    throw std::out_of_range("leibniz_bound_propagate: K exceeds stored length");
  for (size_t j = 1; j < factors.size(); ++j) {
    const DerivativeBoundSeq &f = factors[j];
    if (int(f.log_b.size()) <= K)
      throw std::out_of_range("leibniz_bound_propagate: K exceeds stored length");
    DerivativeBoundSeq out;
    out.M = acc.M * f.M;
    out.log_b.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
      double sum = -std::numeric_limits<double>::infinity();
      for (int nu = 0; nu <= k; ++nu) {
        double lb = log_factorial(k) - log_factorial(nu) - log_factorial(k - nu) +
                    acc.log_b[nu] + f.log_b[k - nu];
        sum = log_add(sum, lb);
      }
      out.log_b[k] = sum;
    }
    double logC = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= K; ++k)
      logC = std::max(logC,
                      (out.log_b[k] - std::log(out.M) - seq.log_m(k)) / (k + 1));
    out.baseC = std::exp(logC);
    acc = std::move(out);
  }
  return acc;
}

InverseBoundResult inverse_bound_propagate(double C, double Ctilde,
                                           const WeightSequence &seq, int K) {
  if (C <= 0.0 || Ctilde <= 0.0)
    throw std::domain_error("inverse_bound_propagate: C, Ctilde > 0");
  if (seq.C4 <= 0.0)
    throw std::runtime_error(
        "inverse_bound_propagate: run check_weight_sequence first (C4 unset)");
  InverseBoundResult res;
  res.B = std::max(2.0 * C, 2.0 * C * Ctilde * seq.C4);
  res.closed_form = DerivativeBoundSeq::envelope(1.0, res.B, seq, K);
  // inverse-derivative recursion seeded at b_0 = Ctilde
  std::vector<double> logr(K + 1);
  logr[0] = std::log(Ctilde);
  double logC = std::log(C), logCt = std::log(Ctilde);
  for (int k = 0; k + 1 <= K; ++k) {
    double sum = -std::numeric_limits<double>::infinity();
    for (int nu = 0; nu <= k; ++nu) {
      double term = (k + 1 - nu) * logC + log_factorial(k + 1) -
                    log_factorial(nu) - log_factorial(k + 1 - nu) +
                    seq.log_m(k + 1 - nu) + logr[nu];
      sum = log_add(sum, term);
    }
    logr[k + 1] = logCt + sum;
  }
  res.recursion.log_b = logr;
  res.recursion.M = 1.0;
  res.recursion.baseC = res.B;
  res.recursion_within_bound = true;
  for (int k = 0; k <= K; ++k)
    if (logr[k] > (k + 1) * std::log(res.B) + seq.log_m(k))
      res.recursion_within_bound = false;
  return res;
}

} // namespace declab
