#include "nullctl/oracle.hpp"

#include <cmath>
#include <numbers>

#include "nullctl/quadrature.hpp"

namespace nullctl {

namespace {

constexpr double kPi = std::numbers::pi;

struct LineRule {
  std::vector<double> nodes, weights;
};

LineRule graded_rule(double lo, double hi, int levels) {
  static const GaussRule<double> g = gauss_legendre(20);
  LineRule r;
  double a = lo;
  for (int k = 0; k <= levels; ++k) {
    const double b = k == levels ? hi : lo + (hi - lo) * (1.0 - std::ldexp(1.0, -(k + 1)));
    for (int i = 0; i < g.size(); ++i) {
      r.nodes.push_back(a + (b - a) * g.nodes[i]);
      r.weights.push_back((b - a) * g.weights[i]);
    }
    a = b;
  }
  return r;
}

double kappa(const ProblemSpec& spec, int p) { return spec.c * kPi * kPi * p * p + spec.d; }

}  // namespace

double c_pq(double a, double b, int p, int q) {
  const auto prim = [&](double x) {
    const double minus = p == q ? x : std::sin((p - q) * kPi * x) / ((p - q) * kPi);
    return minus - std::sin((p + q) * kPi * x) / ((p + q) * kPi);
  };
  return prim(b) - prim(a);
}

double graded_integral(const std::function<double(double)>& f, double lo, double hi, int levels) {
  if (!(hi > lo)) return 0.0;
  const LineRule r = graded_rule(lo, hi, levels);
  double sum = 0;
  for (size_t k = 0; k < r.nodes.size(); ++k) sum += r.weights[k] * f(r.nodes[k]);
  return sum;
}

double d_pq(double t, int p, int q, const ProblemSpec& spec) {
  const double kp = kappa(spec, p), kq = kappa(spec, q), T = spec.T;
  return graded_integral(
      [&](double s) {
        const double w = eval_rho0_inv(spec.rho0, s);
        return w * w * std::exp(kp * (s - T) + kq * (s - t));
      },
      0.0, t);
}

Vector sine_coefficients(const std::function<double(double)>& f, int N) {
  const GaussRule<double> g = gauss_legendre(20);
  const int panels = std::max(16, 2 * N);
  Vector b = Vector::Zero(N);
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < g.size(); ++i) {
      const double x = (k + g.nodes[i]) / panels, w = g.weights[i] / panels;
      const double fx = f(x);
      for (int q = 1; q <= N; ++q) b[q - 1] += 2 * w * fx * std::sin(q * kPi * x);
    }
  return b;
}

FourierOracle FourierOracle::build_and_solve(int N, const ProblemSpec& spec) {
  if (!(spec.eps > 0)) throw DomainError("the modal system is ill-posed for eps = 0");
  if (!spec.constant_coefficients()) throw UnsupportedError("the Fourier oracle needs constant coefficients");
  if (N < 1) throw DomainError("mode count must be positive");
  spec.validate();
  FourierOracle o;
  o.spec_ = spec;
  o.b0_ = sine_coefficients(spec.y0, N);
  o.kappa_.resize(N);
  for (int p = 1; p <= N; ++p) o.kappa_[p - 1] = kappa(spec, p);
  o.C_.resize(N, N);
  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) o.C_(p - 1, q - 1) = c_pq(spec.omega_a, spec.omega_b, std::min(p, q), std::max(p, q));

  const LineRule r = graded_rule(0.0, spec.T, 40);
  Vector w(r.nodes.size());
  for (size_t k = 0; k < r.nodes.size(); ++k) w[k] = r.weights[k] * std::pow(eval_rho0_inv(spec.rho0, r.nodes[k]), 2);
  o.M_.resize(N, N);
  for (int p = 0; p < N; ++p)
    for (int q = 0; q <= p; ++q) {
      double I = 0;
      for (size_t k = 0; k < r.nodes.size(); ++k) I += w[k] * std::exp((o.kappa_[p] + o.kappa_[q]) * (r.nodes[k] - spec.T));
      o.M_(p, q) = o.M_(q, p) = 0.5 * o.C_(p, q) * I;
    }
  o.M_.diagonal().array() += 0.5 * spec.eps;
  o.F_.resize(N);
  for (int p = 0; p < N; ++p) o.F_[p] = -0.5 * o.b0_[p] * std::exp(-o.kappa_[p] * spec.T);
  Eigen::LLT<Eigen::MatrixXd> llt(o.M_);
  if (llt.info() != Eigen::Success) throw SolverError("modal matrix is not positive definite");
  o.a_ = llt.solve(o.F_);
  return o;
}

Vector FourierOracle::adjoint_modes(double t) const {
  return (a_.array() * (kappa_.array() * (t - spec_.T)).exp()).matrix();
}

Vector FourierOracle::state_modes(double t) const {
  const int N = modes();
  Vector Y = (b0_.array() * (-kappa_.array() * t).exp()).matrix();
  if (!(t > 0)) return Y;
  const LineRule r = graded_rule(0.0, t, 40);
  const int K = static_cast<int>(r.nodes.size());
  Eigen::MatrixXd E(N, K);
  for (int k = 0; k < K; ++k) E.col(k) = adjoint_modes(r.nodes[k]);
  const Eigen::MatrixXd V = C_ * E;
  for (int k = 0; k < K; ++k) {
    const double s = r.nodes[k];
    const double w = r.weights[k] * std::pow(eval_rho0_inv(spec_.rho0, s), 2);
    Y.array() += w * V.col(k).array() * (-kappa_.array() * (t - s)).exp();
  }
  return Y;
}

namespace {

double sine_sum(const Vector& coeffs, double x) {
  double s = 0;
  for (int q = 0; q < coeffs.size(); ++q) s += coeffs[q] * std::sin((q + 1) * kPi * x);
  return s;
}

}  // namespace

double FourierOracle::eval_phi(double x, double t) const { return sine_sum(adjoint_modes(t), x); }

double FourierOracle::eval_v(double x, double t) const {
  if (!spec_.in_omega(x)) return 0.0;
  return std::pow(eval_rho0_inv(spec_.rho0, t), 2) * eval_phi(x, t);
}

double FourierOracle::eval_y(double x, double t) const { return sine_sum(state_modes(t), x); }

double FourierOracle::tail_ratio() const {
  const double n = a_.norm();
  return n > 0 ? std::abs(a_[modes() - 1]) / n : 0.0;
}

double FourierOracle::dual_value() const {
  const GaussRule<double> g = gauss_legendre(20);
  const int panels = std::max(8, 2 * modes());
  const double a = spec_.omega_a, b = spec_.omega_b;
  const LineRule r = graded_rule(0.0, spec_.T, 40);
  double mass = 0;
  for (size_t k = 0; k < r.nodes.size(); ++k) {
    const Vector modes_t = adjoint_modes(r.nodes[k]);
    const double wt = r.weights[k] * std::pow(eval_rho0_inv(spec_.rho0, r.nodes[k]), 2);
    for (int pnl = 0; pnl < panels; ++pnl)
      for (int i = 0; i < g.size(); ++i) {
        const double x = a + (b - a) * (pnl + g.nodes[i]) / panels;
        const double phi = sine_sum(modes_t, x);
        mass += wt * (b - a) / panels * g.weights[i] * phi * phi;
      }
  }
  const Vector phiT = adjoint_modes(spec_.T), phi0 = adjoint_modes(0.0);
  double terminal = 0, load = 0;
  for (int pnl = 0; pnl < panels; ++pnl)
    for (int i = 0; i < g.size(); ++i) {
      const double x = (pnl + g.nodes[i]) / panels, w = g.weights[i] / panels;
      terminal += w * std::pow(sine_sum(phiT, x), 2);
      load += w * spec_.y0(x) * sine_sum(phi0, x);
    }
  return 0.5 * mass + 0.5 * spec_.eps * terminal + load;
}

namespace {

bool same_problem(const ProblemSpec& a, const ProblemSpec& b) {
  return a.c == b.c && a.d == b.d && a.omega_a == b.omega_a && a.omega_b == b.omega_b && a.T == b.T &&
         a.eps == b.eps && a.rho0 == b.rho0 && !a.c_fn && !b.c_fn && !a.d_fn && !b.d_fn;
}

}  // namespace

ErrorReport error_report(const FourierOracle& oracle, const MixedSystem& system, const MixedSolution& solution) {
  if (!same_problem(oracle.spec(), system.spec)) throw DomainError("oracle and solution solve different problems");
  if (system.formulation == Formulation::MF3Norm) throw UnsupportedError("no modal oracle for eps = 0");
  const auto& mesh = system.mesh;
  const auto& spec = system.spec;
  const QuadRule<double> rule(spec.quad_order);
  const auto& line = rule.line;
  const ControlField v(system, solution);
  const StateField y(system, solution);
  double ce = 0, cn = 0, se = 0, sn = 0;
  for (int j = 0; j < mesh.nt; ++j)
    for (int kt = 0; kt < line.size(); ++kt) {
      const double tau = line.nodes[kt], t = mesh.t(j) + tau * mesh.dt;
      const Vector phi_modes = oracle.adjoint_modes(t);
      const Vector y_modes = oracle.state_modes(t);
      const double rho0_inv = eval_rho0_inv(spec.rho0, t);
      for (int i = 0; i < mesh.nx; ++i) {
        const double x0 = mesh.x(i);
        for (int kx = 0; kx < line.size(); ++kx) {
          const double xi = line.nodes[kx], x = x0 + xi * mesh.dx;
          const double w = line.weights[kx] * line.weights[kt] * mesh.dx * mesh.dt;
          const double ye = sine_sum(y_modes, x), yh = y.at(i, j, xi, tau, t);
          se += w * (ye - yh) * (ye - yh);
          sn += w * ye * ye;
        }
        const double xa = std::max(x0, spec.omega_a), xb = std::min(x0 + mesh.dx, spec.omega_b);
        if (!(xa < xb)) continue;
        for (int kx = 0; kx < line.size(); ++kx) {
          const double x = xa + line.nodes[kx] * (xb - xa), xi = (x - x0) / mesh.dx;
          const double w = line.weights[kx] * line.weights[kt] * (xb - xa) * mesh.dt;
          const double ve = rho0_inv * sine_sum(phi_modes, x), vh = v.weighted(i, j, xi, tau, x, t);
          ce += w * (ve - vh) * (ve - vh);
          cn += w * ve * ve;
        }
      }
    }
  ErrorReport rep;
  rep.control_norm = std::sqrt(cn);
  rep.state_norm = std::sqrt(sn);
  rep.control_error = cn > 0 ? std::sqrt(ce / cn) : std::sqrt(ce);
  rep.state_error = sn > 0 ? std::sqrt(se / sn) : std::sqrt(se);
  return rep;
}

}  // namespace nullctl
