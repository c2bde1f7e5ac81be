#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace nullctl {

// Gauss-Legendre rule on [0, 1].
template <typename Scalar = double>
struct GaussRule {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> weights;

  int size() const { return static_cast<int>(nodes.size()); }

  template <typename F>
  Scalar integrate(Scalar a, Scalar b, F&& f) const {
    Scalar sum(0);
    for (int k = 0; k < size(); ++k) sum += weights[k] * f(a + (b - a) * nodes[k]);
    return (b - a) * sum;
  }
};

template <typename Scalar = double>
GaussRule<Scalar> gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("quadrature order must be at least 1");
  using std::abs;
  using std::cos;
  GaussRule<Scalar> rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (q + 1) / 2; ++i) {
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(q) + Scalar(0.5)));
    Scalar dp(0);
    for (int it = 0; it < 100; ++it) {
      Scalar p0(1), p1 = x;
      for (int n = 2; n <= q; ++n) {
        Scalar p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / Scalar(n);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(q) * (x * p1 - p0) / (x * x - Scalar(1));
      Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) < Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes[i] = (Scalar(1) - x) / 2;
    rule.nodes[q - 1 - i] = (Scalar(1) + x) / 2;
    rule.weights[i] = rule.weights[q - 1 - i] = w / 2;
  }
  return rule;
}

// Tensor rule on [0,1]^2, point k = i + q*j with xi = nodes[i], tau = nodes[j].
template <typename Scalar = double>
struct QuadRule {
  int q = 6;
  GaussRule<Scalar> line;

  explicit QuadRule(int order = 6) : q(order), line(gauss_legendre<Scalar>(order)) {}
  int size() const { return q * q; }
  Scalar xi(int k) const { return line.nodes[k % q]; }
  Scalar tau(int k) const { return line.nodes[k / q]; }
  Scalar weight(int k) const { return line.weights[k % q] * line.weights[k / q]; }
};

}  // namespace nullctl
