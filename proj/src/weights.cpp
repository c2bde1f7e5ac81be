#include "nullctl/weights.hpp"

namespace nullctl {

WeightSpec WeightSpec::unit(double T) {
  if (!(T > 0)) throw DomainError("final time must be positive");
  return {WeightKind::Unit, 0.0, 0.0, 0.0, T};
}

WeightSpec WeightSpec::poly_exp(double power, double k1, double T) {
  if (!(power >= 0)) throw DomainError("weight power must be nonnegative");
  if (!(k1 > 0)) throw DomainError("weight K1 must be positive");
  if (!(T > 0)) throw DomainError("final time must be positive");
  return {WeightKind::PolyExp, power, k1, 0.0, T};
}

WeightSpec WeightSpec::carleman_typed(double k1, double k2, double T) {
  if (!(T > 0)) throw DomainError("final time must be positive");
  return {WeightKind::CarlemanTyped, 0.0, k1, k2, T};
}

bool operator==(const WeightSpec& a, const WeightSpec& b) {
  return a.kind == b.kind && a.power == b.power && a.k1 == b.k1 && a.k2 == b.k2 && a.T == b.T;
}

NormalizedCoeffs normalized_coeffs(const WeightSpec& rho0, const WeightSpec& rho, double t) {
  if (rho0.T != rho.T) throw UnsupportedError("weights must share the final time");
  if (rho0.kind == WeightKind::Unit && rho.kind == WeightKind::Unit) return {1.0, 0.0};
  if (rho0.kind != WeightKind::PolyExp || rho.kind != WeightKind::PolyExp || rho.power != 0.0)
    throw UnsupportedError("normalized coefficients need a (T-t)^s exp(K/(T-t)), exp(K/(T-t)) pair");
  if (rho0.k1 != rho.k1) throw UnsupportedError("normalized coefficients need matching K1");
  if (t < 0 || t >= rho0.T) throw DomainError("normalized coefficients evaluated outside [0, T)");
  const double tau = rho0.T - t;
  const double s = rho0.power;
  // rho0' = exp(K/tau) (-s tau^{s-1} + K tau^{s-2}); alpha0 = -rho0'/rho.
  return {std::pow(tau, s), s * std::pow(tau, s - 1) - rho0.k1 * std::pow(tau, s - 2)};
}

}  // namespace nullctl
