#pragma once

// Truncated Fock-space linear algebra: states, operators, exponentials,
// tensor products, ancilla projection and moments.
//
// Quadrature convention: x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
// [x, p] = i, vacuum variance 1/2. Everything else in the library assumes it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>

#include "gkp/errors.hpp"
#include "gkp/hermite.hpp"

namespace gkp {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct TruncationPolicy {
  int dim = 56;           // photon numbers 0 .. dim-1
  int pad_factor = 2;     // operators are built at pad_factor*dim, then cropped
  double tail_tol = 1e-8; // tolerated mass in the top 10% of levels
  int hard_cap = 4096;    // upper bound on any padded single-mode dimension

  int padded_dim() const { return dim * pad_factor; }

  void validate() const {
    require(dim >= 2, "TruncationPolicy: dim must be >= 2");
    require(pad_factor >= 1, "TruncationPolicy: pad_factor must be >= 1");
    require(tail_tol > 0.0 && std::isfinite(tail_tol), "TruncationPolicy: tail_tol must be positive");
    require(padded_dim() <= hard_cap, "TruncationPolicy: pad_factor*dim exceeds the hard cap");
  }

  bool operator==(const TruncationPolicy&) const = default;
};

/// Number of top levels watched for truncation leakage.
inline int tail_levels(int dim) { return std::max(1, (dim + 9) / 10); }

class FockState {
 public:
  FockState() = default;

  explicit FockState(CVector amplitudes, bool normalized = false) : amplitudes_(std::move(amplitudes)), normalized_(normalized) {
    require(amplitudes_.size() >= 1, "FockState: empty amplitude vector");
    require(amplitudes_.allFinite(), "FockState: non-finite amplitude");
    if (normalized_ && std::abs(amplitudes_.squaredNorm() - 1.0) >= 1e-9) {
      throw ValidationError("FockState: flagged normalized but |psi|^2 = " + std::to_string(amplitudes_.squaredNorm()));
    }
  }

  static FockState basis(int n, int dim) {
    require(n >= 0 && n < dim, "FockState::basis: level out of range");
    CVector v = CVector::Zero(dim);
    v(n) = 1.0;
    return FockState(std::move(v), true);
  }
  static FockState vacuum(int dim) { return basis(0, dim); }

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }
  cplx operator[](int n) const { return amplitudes_(n); }
  bool is_normalized() const { return normalized_; }
  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }

  /// Probability mass (relative to the total) in the top 10% of levels.
  double tail_mass() const {
    const double total = norm_squared();
    if (total == 0.0) return 0.0;
    const int k = tail_levels(dim());
    return amplitudes_.tail(k).squaredNorm() / total;
  }

  FockState normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw NumericError("FockState: cannot normalize a zero-norm state");
    return FockState(amplitudes_ / n, true);
  }

 private:
  CVector amplitudes_;
  bool normalized_ = false;
};

/// Appends a warning when a state's tail mass exceeds the policy tolerance.
inline void check_tail(const FockState& state, const TruncationPolicy& policy, const std::string& label, Warnings* sink) {
  const double tail = state.tail_mass();
  if (tail > policy.tail_tol) {
    warn(sink, label + ": truncation tail mass " + sci(tail) + " exceeds tail_tol");
  }
}

struct FockOperator {
  CMatrix entries;
  std::string label;

  int dim() const { return static_cast<int>(entries.rows()); }

  static FockOperator identity(int dim, std::string label = "I") {
    return FockOperator{CMatrix::Identity(dim, dim), std::move(label)};
  }

  /// U U^dag = I on the leading 80% block. Cropped operators are not exactly
  /// unitary near the top of the ladder, so only the interior is checked.
  bool is_unitary(double tol = 1e-8) const {
    const int k = std::max(1, static_cast<int>(0.8 * dim()));
    const CMatrix rows = entries.topRows(k);
    const CMatrix gram = rows * rows.adjoint();
    return (gram - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < tol;
  }
};

inline CMatrix lowering_matrix(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline CMatrix number_matrix(int dim) {
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

inline CMatrix position_matrix(int dim) {
  const CMatrix a = lowering_matrix(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

inline CMatrix momentum_matrix(int dim) {
  const CMatrix a = lowering_matrix(dim);
  return (a - a.adjoint()) / cplx(0.0, std::sqrt(2.0));
}

inline std::pair<FockOperator, FockOperator> ladder_ops(const TruncationPolicy& policy) {
  policy.validate();
  CMatrix a = lowering_matrix(policy.dim);
  CMatrix ad = a.adjoint();
  return {FockOperator{std::move(a), "a"}, FockOperator{std::move(ad), "a^dag"}};
}

inline std::pair<FockOperator, FockOperator> quadrature_ops(const TruncationPolicy& policy) {
  policy.validate();
  return {FockOperator{position_matrix(policy.dim), "x"}, FockOperator{momentum_matrix(policy.dim), "p"}};
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// The series is summed until the next term drops below tol relative to the
/// partial sum.
inline CMatrix expm(const CMatrix& m, double tol = 1e-15, const std::string& label = "expm") {
  require(m.rows() == m.cols(), "expm: matrix must be square");
  if (!m.allFinite()) throw ValidationError("expm(" + label + "): non-finite generator");
  const Eigen::Index n = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const CMatrix scaled = m / std::ldexp(1.0, squarings);

  CMatrix sum = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  constexpr int kMaxTerms = 60;
  bool converged = false;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= tol * std::max(1.0, sum.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("expm(" + label + "): Taylor series did not converge");
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  if (!sum.allFinite()) throw NumericError("expm(" + label + "): overflow during squaring");
  return sum;
}

inline FockOperator op_exp(const FockOperator& generator, double tol = 1e-15) {
  return FockOperator{expm(generator.entries, tol, generator.label), "exp(" + generator.label + ")"};
}

/// Quadrature operators at a padded dimension, the raw material for padded
/// exponentials.
struct PaddedQuadratures {
  int dim;
  CMatrix a, x, p, n;

  explicit PaddedQuadratures(int d) : dim(d), a(lowering_matrix(d)), x(position_matrix(d)), p(momentum_matrix(d)), n(number_matrix(d)) {}
};

/// exp(G) where G is built by `generator` at pad_factor*dim and the result
/// cropped back to dim. Bounds truncation artifacts from the top of the ladder.
inline FockOperator padded_exp(const std::function<CMatrix(const PaddedQuadratures&)>& generator, const TruncationPolicy& policy,
                               const std::string& label, double tol = 1e-15) {
  policy.validate();
  const PaddedQuadratures q(policy.padded_dim());
  const CMatrix g = generator(q);
  const CMatrix full = expm(g, tol, label);
  return FockOperator{full.topLeftCorner(policy.dim, policy.dim), label};
}

inline FockState apply(const FockOperator& op, const FockState& state) {
  require(op.dim() == state.dim(), "apply: dimension mismatch (" + op.label + ")");
  return FockState(op.entries * state.amplitudes());
}

inline cplx inner(const FockState& a, const FockState& b) {
  require(a.dim() == b.dim(), "inner: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the first argument
}

/// |<a|b>|^2 / (|a|^2 |b|^2).
inline double fidelity(const FockState& a, const FockState& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("fidelity: zero-norm state");
  return std::clamp(std::norm(inner(a, b)) / (na * nb), 0.0, 1.0);
}

/// Two-mode amplitudes. Index convention: mode-1 index major, i.e. the
/// amplitude of |m>|n> lives at m * dim2 + n.
struct TwoModeState {
  CVector amplitudes;
  int dim1 = 0;
  int dim2 = 0;

  cplx at(int m, int n) const { return amplitudes(static_cast<Eigen::Index>(m) * dim2 + n); }
};

struct TwoModeOperator {
  CMatrix entries;
  int dim1 = 0;
  int dim2 = 0;
  std::string label;
};

inline TwoModeState tensor(const FockState& a, const FockState& b) {
  TwoModeState out{CVector(static_cast<Eigen::Index>(a.dim()) * b.dim()), a.dim(), b.dim()};
  for (int m = 0; m < a.dim(); ++m) out.amplitudes.segment(static_cast<Eigen::Index>(m) * b.dim(), b.dim()) = a[m] * b.amplitudes();
  return out;
}

inline TwoModeOperator tensor(const FockOperator& a, const FockOperator& b) {
  const int d1 = a.dim();
  const int d2 = b.dim();
  TwoModeOperator out{CMatrix(static_cast<Eigen::Index>(d1) * d2, static_cast<Eigen::Index>(d1) * d2), d1, d2, a.label + "(x)" + b.label};
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d1; ++j) out.entries.block(static_cast<Eigen::Index>(i) * d2, static_cast<Eigen::Index>(j) * d2, d2, d2) = a.entries(i, j) * b.entries;
  }
  return out;
}

inline TwoModeState apply(const TwoModeOperator& op, const TwoModeState& state) {
  require(op.dim1 == state.dim1 && op.dim2 == state.dim2, "apply: two-mode dimension mismatch (" + op.label + ")");
  return TwoModeState{op.entries * state.amplitudes, state.dim1, state.dim2};
}

/// <n|_2 applied to a two-mode state. The result is NOT normalized; its
/// squared norm is the probability of detecting n photons in mode 2.
inline FockState project_ancilla(const TwoModeState& state, int n) {
  require(n >= 0 && n < state.dim2, "project_ancilla: photon count out of range");
  CVector out(state.dim1);
  for (int m = 0; m < state.dim1; ++m) out(m) = state.at(m, n);
  return FockState(std::move(out));
}

struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;  // symmetrized: <(xp + px)/2> - <x><p>
  double mean_photon = 0.0;
};

inline Moments moments(const FockState& state) {
  const FockState psi = state.normalized();
  const int d = psi.dim();
  const CMatrix x = position_matrix(d);
  const CMatrix p = momentum_matrix(d);
  const CVector& v = psi.amplitudes();
  const CVector xv = x * v;
  const CVector pv = p * v;
  auto expect = [&](const CVector& lhs, const CVector& rhs) { return lhs.dot(rhs); };
  Moments m;
  m.mean_x = std::real(v.dot(xv));
  m.mean_p = std::real(v.dot(pv));
  m.var_x = std::real(expect(xv, xv)) - m.mean_x * m.mean_x;
  m.var_p = std::real(expect(pv, pv)) - m.mean_p * m.mean_p;
  m.cov_xp = std::real(expect(xv, pv)) - m.mean_x * m.mean_p;  // Re<x p> is the symmetrized product
  for (int k = 0; k < d; ++k) m.mean_photon += k * std::norm(v(k));
  return m;
}

/// Position-space wavefunction psi(x_j) = sum_m c_m phi_m(x_j).
inline CVector wavefunction_x(const FockState& state, const std::vector<double>& xs) {
  CVector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto phi = hermite_functions(state.dim(), xs[j]);
    cplx acc = 0.0;
    for (int m = 0; m < state.dim(); ++m) acc += state[m] * phi[m];
    out(static_cast<Eigen::Index>(j)) = acc;
  }
  return out;
}

/// Momentum-space wavefunction; <p|m> = (-i)^m phi_m(p).
inline CVector wavefunction_p(const FockState& state, const std::vector<double>& ps) {
  CVector out(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const auto phi = hermite_functions(state.dim(), ps[j]);
    cplx acc = 0.0;
    cplx phase = 1.0;
    for (int m = 0; m < state.dim(); ++m) {
      acc += state[m] * phase * phi[m];
      phase *= cplx(0.0, -1.0);
    }
    out(static_cast<Eigen::Index>(j)) = acc;
  }
  return out;
}

/// Matrix of f(x) (or f(p) when `momentum`) in the number basis, evaluated by
/// quadrature of the Hermite functions. No operator truncation is involved:
/// the entries are those of the untruncated operator.
inline CMatrix quadrature_function_matrix(const std::function<cplx(double)>& f, int dim, bool momentum) {
  const UniformGrid grid = hermite_grid(dim);
  const Eigen::MatrixXd table = hermite_table(dim, grid);
  Eigen::VectorXcd weights(grid.points);
  for (int j = 0; j < grid.points; ++j) weights(j) = grid.step() * f(grid.at(j));
  CMatrix out = table.cast<cplx>() * weights.asDiagonal() * table.transpose().cast<cplx>();
  if (momentum) {
    // <m|p><p|m'> = i^m (-i)^m' phi_m phi_m'
    static const cplx kPowers[4] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};
    for (int m = 0; m < dim; ++m) {
      for (int k = 0; k < dim; ++k) out(m, k) *= kPowers[((m - k) % 4 + 4) % 4];
    }
  }
  return out;
}

}  // namespace gkp
