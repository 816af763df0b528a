#pragma once

// Exact Gaussian-formalism oracle: symplectic evolution of first and second
// moments, the x-representation precision matrices of the two heralding
// setups, and closed-form predictions for heralding probability and the
// two-peak (cat) approximation.
//
// Phase-space ordering is (x1, p1[, x2, p2]); vacuum covariance is I/2.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gkp/errors.hpp"

namespace gkp {

enum class GateKind { squeeze, displace, rotate, beamsplitter, qnd, quadratic_phase };

inline std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::squeeze: return "squeeze";
    case GateKind::displace: return "displace";
    case GateKind::rotate: return "rotate";
    case GateKind::beamsplitter: return "beamsplitter";
    case GateKind::qnd: return "qnd";
    case GateKind::quadratic_phase: return "quadratic_phase";
  }
  return "unknown";
}

/// One Gaussian gate. Conventions (Heisenberg action on quadratures):
///   squeeze Delta       S(Delta)^dag x S(Delta) = x/Delta, p -> Delta p
///   displace d          D(d) = exp(-i d p), x -> x + d
///   rotate theta        exp(-i theta n), x -> x cos + p sin, p -> p cos - x sin
///   beamsplitter T      x1 -> sqrt(R) x1 - sqrt(T) x2, x2 -> sqrt(T) x1 + sqrt(R) x2 (same for p), R = 1 - T
///   qnd g               exp(i g p1 x2), x1 -> x1 - g x2, p2 -> p2 + g p1
///   quadratic_phase b   exp(i b x^2), p -> p + 2 b x
struct GateSpec {
  GateKind kind = GateKind::displace;
  double parameter = 0.0;

  bool two_mode() const { return kind == GateKind::beamsplitter || kind == GateKind::qnd; }

  void validate() const {
    require(std::isfinite(parameter), "GateSpec: non-finite parameter");
    if (kind == GateKind::squeeze) require(parameter > 0.0, "GateSpec: squeeze Delta must be positive");
    if (kind == GateKind::beamsplitter) require(parameter >= 0.0 && parameter <= 1.0, "GateSpec: transmittance must lie in [0, 1]");
  }
};

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int modes() const { return static_cast<int>(mean.size() / 2); }

  static GaussianState vacuum(int modes) {
    require(modes >= 1, "GaussianState: need at least one mode");
    return GaussianState{Eigen::VectorXd::Zero(2 * modes), 0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes)};
  }
};

inline Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Smallest eigenvalue of cov + (i/2) Omega; non-negative for physical states.
inline double uncertainty_margin(const GaussianState& state) {
  const int n = static_cast<int>(state.cov.rows());
  const Eigen::MatrixXcd h = state.cov.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form(n / 2).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  return solver.eigenvalues().minCoeff();
}

struct SymplecticMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd shift;
};

/// Symplectic matrix and phase-space shift of `gate` acting on `modes` within
/// an `n_modes`-mode system.
inline SymplecticMap symplectic_of(const GateSpec& gate, const std::vector<int>& modes, int n_modes) {
  gate.validate();
  require(n_modes >= 1, "symplectic_of: need at least one mode");
  const std::size_t needed = gate.two_mode() ? 2 : 1;
  require(modes.size() == needed, "symplectic_of: " + to_string(gate.kind) + " acts on " + std::to_string(needed) + " mode(s)");
  for (int m : modes) require(m >= 0 && m < n_modes, "symplectic_of: mode index out of range");
  if (needed == 2) require(modes[0] != modes[1], "symplectic_of: two-mode gate needs distinct modes");

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(2 * n_modes);
  const int x1 = 2 * modes[0];
  const int p1 = x1 + 1;
  const double v = gate.parameter;

  switch (gate.kind) {
    case GateKind::squeeze:
      s(x1, x1) = 1.0 / v;
      s(p1, p1) = v;
      break;
    case GateKind::displace:
      shift(x1) = v;
      break;
    case GateKind::rotate:
      s(x1, x1) = std::cos(v);
      s(x1, p1) = std::sin(v);
      s(p1, x1) = -std::sin(v);
      s(p1, p1) = std::cos(v);
      break;
    case GateKind::quadratic_phase:
      s(p1, x1) = 2.0 * v;
      break;
    case GateKind::beamsplitter: {
      const int x2 = 2 * modes[1];
      const int p2 = x2 + 1;
      const double t = std::sqrt(v);
      const double r = std::sqrt(1.0 - v);
      for (auto [a, b] : {std::pair{x1, x2}, std::pair{p1, p2}}) {
        s(a, a) = r;
        s(a, b) = -t;
        s(b, a) = t;
        s(b, b) = r;
      }
      break;
    }
    case GateKind::qnd: {
      const int x2 = 2 * modes[1];
      const int p2 = x2 + 1;
      s(x1, x2) = -v;
      s(p2, p1) = v;
      break;
    }
  }
  return {s, shift};
}

inline GaussianState evolve(const GaussianState& state, const GateSpec& gate, const std::vector<int>& modes) {
  require(state.mean.size() == state.cov.rows() && state.cov.rows() == state.cov.cols(), "evolve: inconsistent state dimensions");
  const auto map = symplectic_of(gate, modes, state.modes());
  return GaussianState{map.matrix * state.mean + map.shift, map.matrix * state.cov * map.matrix.transpose()};
}

/// 2x2 precision matrix sigma of a two-mode Gaussian wavefunction
/// G(x1, x2) ~ exp(-x^T sigma x / 2).
struct PrecisionMatrix {
  Eigen::Matrix2d sigma;

  double determinant() const { return sigma.determinant(); }
  bool positive_definite() const { return sigma(0, 0) > 0.0 && determinant() > 0.0; }
};

/// Beam-splitter setup: B |S_Delta1>_1 |S_Delta2>_2.
inline PrecisionMatrix precision_after_bs(double delta1, double delta2, double transmittance) {
  require(delta1 > 0.0 && delta2 > 0.0, "precision_after_bs: Delta must be positive");
  require(transmittance >= 0.0 && transmittance <= 1.0, "precision_after_bs: T outside [0, 1]");
  const double t = transmittance;
  const double r = 1.0 - t;
  const double a = delta1 * delta1;
  const double b = delta2 * delta2;
  const double off = std::sqrt(r * t) * (a - b);
  PrecisionMatrix out;
  out.sigma << r * a + t * b, off, off, t * a + r * b;
  return out;
}

/// QND setup: S_2(Delta3) Q(g) |S_Delta1>_1 |S_Delta2>_2.
inline PrecisionMatrix precision_after_qnd(double delta1, double delta2, double delta3, double g) {
  require(delta1 > 0.0 && delta2 > 0.0 && delta3 > 0.0, "precision_after_qnd: Delta must be positive");
  const double a = delta1 * delta1;
  const double off = -g * a * delta3;
  PrecisionMatrix out;
  out.sigma << a, off, off, (delta2 * delta2 + g * g * a) * delta3 * delta3;
  return out;
}

/// Width parameter of the heralded wavefunction: Delta_c^2 = |sigma| + sigma_11.
inline double delta_c(const PrecisionMatrix& p) {
  if (!p.positive_definite()) throw ValidationError("delta_c: precision matrix is not positive definite");
  return std::sqrt(p.determinant() + p.sigma(0, 0));
}

namespace detail {
inline double log_central_binomial_over_4n(int n) {
  return std::lgamma(2.0 * n + 1.0) - 2.0 * std::lgamma(n + 1.0) - n * std::log(4.0);
}
}  // namespace detail

/// Heralding probability P(n) = sqrt(2) (2n)!/(4^n n!^2) t^n (t+2)^(-n-1/2).
inline double closed_form_pn(int n, double t) {
  require(n >= 0, "closed_form_pn: n must be non-negative");
  require(t >= 0.0 && std::isfinite(t), "closed_form_pn: t must be non-negative");
  if (n > 0 && t == 0.0) return 0.0;
  double log_p = 0.5 * std::log(2.0) + detail::log_central_binomial_over_4n(n) - (n + 0.5) * std::log(t + 2.0);
  if (n > 0) log_p += n * std::log(t);
  return std::exp(log_p);
}

/// t as printed for the QND setup: g^2 Delta1 / Delta2.
inline double pn_t_printed(double g, double delta1, double delta2) { return g * g * delta1 / delta2; }

/// t = sigma_12^2/|sigma|, which for the QND setup under its conditions is
/// g^2 Delta1^2 / Delta2^2.
inline double pn_t_squared(double g, double delta1, double delta2) { return g * g * delta1 * delta1 / (delta2 * delta2); }

/// Maximum of P(n) over t, reached at t = 4n.
inline double closed_form_pmax(int n) {
  require(n >= 0, "closed_form_pmax: n must be non-negative");
  if (n == 0) return 1.0;
  const double log_p = std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) - 2.0 * std::lgamma(n + 1.0) - 0.5 * std::log(2.0 * n + 1.0) +
                       n * std::log(static_cast<double>(n) / (2.0 * n + 1.0));
  return std::exp(log_p);
}

/// log |H_n(i y)| for y >= 0. H_n(i y) = i^n h_n(y) with
/// h_{k+1} = 2 y h_k + 2 k h_{k-1}; every term is positive, so the forward
/// recurrence is stable. Rescaled as it goes to stay finite.
inline double log_abs_hermite_imag(int n, double y) {
  if (n == 0) return 0.0;
  double prev = 1.0;
  double cur = 2.0 * y;
  double log_scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * y * cur + 2.0 * k * prev;
    prev = cur;
    cur = next;
    if (cur > 1e100) {
      prev /= cur;
      log_scale += std::log(cur);
      cur = 1.0;
    }
  }
  return log_scale + std::log(cur);
}

/// Fidelity between the heralded x^n exp(-Delta_c^2 x^2/4) wavefunction and
/// its two-peak approximation with peaks at +-sqrt(2n)/Delta_c.
inline double cat_fidelity(int n) {
  if (n < 1) throw ValidationError("cat_fidelity: no two-peak approximation for n = 0");
  const double y = std::sqrt(2.0 * n / 3.0);
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const double log_f = (n + 2.5) * std::log(2.0) - 2.0 * n / 3.0 + std::lgamma(n + 1.0) + 2.0 * log_abs_hermite_imag(n, y) -
                       (n + 1.0) * std::log(3.0) - std::lgamma(2.0 * n + 1.0) - std::log1p(parity * std::exp(-2.0 * n));
  return std::exp(log_f);
}

/// Large-n asymptote of cat_fidelity.
inline double cat_fidelity_asymptote(int n) { return 1.0 - 0.03 / n; }

struct BinomialPair {
  double exact = 0.0;
  double approx = 0.0;
};

/// C(N, l) and its Gaussian-envelope approximation
/// sqrt(2^(2N+1)/(N pi)) exp(-2 (l - N/2)^2 / N).
inline BinomialPair binomial_gaussian(int total, int l) {
  require(total >= 1, "binomial_gaussian: N must be positive");
  require(l >= 0 && l <= total, "binomial_gaussian: l outside [0, N]");
  BinomialPair out;
  out.exact = std::exp(std::lgamma(total + 1.0) - std::lgamma(l + 1.0) - std::lgamma(total - l + 1.0));
  if (total <= 60) out.exact = std::round(out.exact);
  const double centered = l - total / 2.0;
  out.approx = std::sqrt(std::pow(2.0, 2.0 * total + 1.0) / (total * std::numbers::pi)) * std::exp(-2.0 * centered * centered / total);
  return out;
}

}  // namespace gkp
