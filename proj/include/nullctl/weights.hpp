#pragma once

#include <cmath>

#include "nullctl/errors.hpp"

namespace nullctl {

enum class WeightKind { Unit, PolyExp, CarlemanTyped };

// PolyExp: (T - t)^power * exp(k1 / (T - t)).
// CarlemanTyped is declared for completeness and has no evaluator.
struct WeightSpec {
  WeightKind kind = WeightKind::Unit;
  double power = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double T = 1.0;

  static WeightSpec unit(double T);
  static WeightSpec poly_exp(double power, double k1, double T);
  static WeightSpec carleman_typed(double k1, double k2, double T);
};

bool operator==(const WeightSpec& a, const WeightSpec& b);

namespace detail {
inline void require_evaluable(const WeightSpec& w) {
  if (w.kind == WeightKind::CarlemanTyped)
    throw UnsupportedError("Carleman-typed weight has no evaluator");
}
}  // namespace detail

template <typename Scalar = double>
Scalar eval_weight(const WeightSpec& w, Scalar t) {
  detail::require_evaluable(w);
  if (t < Scalar(0) || t >= Scalar(w.T)) throw DomainError("weight evaluated outside [0, T)");
  if (w.kind == WeightKind::Unit) return Scalar(1);
  using std::exp;
  using std::log;
  const Scalar tau = Scalar(w.T) - t;
  return exp(Scalar(w.k1) / tau + Scalar(w.power) * log(tau));
}

// Extended by 0 at t = T for PolyExp.
template <typename Scalar = double>
Scalar eval_weight_inv(const WeightSpec& w, Scalar t) {
  detail::require_evaluable(w);
  if (t < Scalar(0) || t > Scalar(w.T)) throw DomainError("weight evaluated outside [0, T]");
  if (w.kind == WeightKind::Unit) return Scalar(1);
  using std::exp;
  using std::log;
  const Scalar tau = Scalar(w.T) - t;
  if (tau <= Scalar(0)) return Scalar(0);
  return exp(-Scalar(w.k1) / tau - Scalar(w.power) * log(tau));
}

inline double eval_rho0(const WeightSpec& w, double t) { return eval_weight(w, t); }
inline double eval_rho0_inv(const WeightSpec& w, double t) { return eval_weight_inv(w, t); }
inline double eval_rho(const WeightSpec& w, double t) { return eval_weight(w, t); }
inline double eval_rho_inv(const WeightSpec& w, double t) { return eval_weight_inv(w, t); }

// rho^{-1} L*(rho0 psi) = alpha1 L*psi + alpha0 psi for weights depending on t only.
struct NormalizedCoeffs {
  double alpha1;
  double alpha0;
};

NormalizedCoeffs normalized_coeffs(const WeightSpec& rho0, const WeightSpec& rho, double t);

}  // namespace nullctl
