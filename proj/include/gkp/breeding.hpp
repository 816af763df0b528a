#pragma once

// Conditioned operations of the breeding protocol: Kraus operators of the
// (iterable) generalized photon subtraction, damping operators, Gaussian
// gates in Fock space, parameter solvers, seed-state construction and the
// coherent-bifurcation step.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gkp/errors.hpp"
#include "gkp/fock.hpp"
#include "gkp/gaussian.hpp"
#include "gkp/hermite.hpp"

namespace gkp {

inline const double kSqrtPi = std::sqrt(std::numbers::pi);

/// Physical parameters of one coherent-bifurcation step.
struct StepParams {
  int n = 0;            // heralded photon count
  double delta1 = 0.0;  // squeezing matched to the input peaks
  double delta2 = 0.0;  // ancilla squeezing
  double delta3 = 0.0;  // ancilla squeezing after the QND gate
  double g = 0.0;       // QND gain
  double w = 0.0;       // peak half-separation

  void validate() const {
    require(n >= 0, "StepParams: n must be non-negative");
    require(delta1 > 0.0 && delta2 > 0.0 && delta3 > 0.0, "StepParams: Delta must be positive");
    require(std::isfinite(g), "StepParams: g must be finite");
    require(std::abs(w - std::sqrt(2.0 * n) / delta1) <= 1e-12 * std::max(1.0, w), "StepParams: w != sqrt(2n)/Delta1");
    const double constraint = (delta2 * delta2 + g * g * delta1 * delta1) * delta3 * delta3;
    require(std::abs(constraint - 1.0) <= 1e-12, "StepParams: (Delta2^2 + g^2 Delta1^2) Delta3^2 != 1");
  }

  bool operator==(const StepParams&) const = default;
};

/// Solves Delta1 = sqrt(2n)/w and Delta3 = 1/sqrt(Delta2^2 + g^2 Delta1^2).
/// Warns when the regime Delta2^2 << 1 << Delta1^2 is not met (Delta1^2 < 2
/// or Delta2^2 > 1/2).
inline StepParams solve_step_params(int n, double w, double delta2, double g, Warnings* warnings = nullptr) {
  require(n >= 1, "solve_step_params: n must be >= 1");
  require(w > 0.0 && std::isfinite(w), "solve_step_params: w must be positive");
  require(delta2 > 0.0 && std::isfinite(delta2), "solve_step_params: Delta2 must be positive");
  require(g != 0.0 && std::isfinite(g), "solve_step_params: g must be non-zero");
  StepParams p;
  p.n = n;
  p.w = w;
  p.delta1 = std::sqrt(2.0 * n) / w;
  p.delta2 = delta2;
  p.g = g;
  p.delta3 = 1.0 / std::sqrt(delta2 * delta2 + g * g * p.delta1 * p.delta1);
  if (p.delta1 * p.delta1 < 2.0 || delta2 * delta2 > 0.5) {
    warn(warnings, "solve_step_params: n=" + std::to_string(n) + " gives Delta1^2=" + std::to_string(p.delta1 * p.delta1) + ", Delta2^2=" +
                       std::to_string(delta2 * delta2) + " outside Delta2^2 << 1 << Delta1^2");
  }
  return p;
}

/// Squeezed vacuum |S_Delta> projected onto the truncated space (unnormalized
/// by the truncation; use .normalized() for the state).
inline FockState squeezed_vacuum(double delta, const TruncationPolicy& policy) {
  require(delta > 0.0, "squeezed_vacuum: Delta must be positive");
  return FockState(displaced_squeezed_amplitudes(0.0, delta, policy.dim));
}

// ---------------------------------------------------------------------------
// Gaussian unitaries in Fock space

/// Single-mode Gaussian gate as a dense operator, built by a padded
/// exponential of its quadratic generator (rotation is diagonal and exact).
inline FockOperator gaussian_unitary(const GateSpec& gate, const TruncationPolicy& policy) {
  gate.validate();
  policy.validate();
  require(!gate.two_mode(), "gaussian_unitary: " + to_string(gate.kind) + " is a two-mode gate; use gaussian_unitary_two_mode");
  const double v = gate.parameter;
  const std::string label = to_string(gate.kind) + "(" + std::to_string(v) + ")";
  const cplx i(0.0, 1.0);
  switch (gate.kind) {
    case GateKind::rotate: {
      CMatrix u = CMatrix::Zero(policy.dim, policy.dim);
      for (int k = 0; k < policy.dim; ++k) u(k, k) = std::exp(-i * v * static_cast<double>(k));
      return FockOperator{u, label};
    }
    case GateKind::displace:
      return padded_exp([&](const PaddedQuadratures& q) -> CMatrix { return -i * v * q.p; }, policy, label);
    case GateKind::squeeze:
      return padded_exp([&](const PaddedQuadratures& q) -> CMatrix { return (i * 0.5 * std::log(v)) * (q.x * q.p + q.p * q.x); }, policy, label);
    case GateKind::quadratic_phase:
      return padded_exp([&](const PaddedQuadratures& q) -> CMatrix { return i * v * (q.x * q.x); }, policy, label);
    default:
      break;
  }
  throw ValidationError("gaussian_unitary: unknown gate kind");
}

namespace detail {

/// exp(theta (a1^dag a2 - a1 a2^dag)) restricted to total photon number N,
/// basis index = photons in mode 1. Exact: the block is invariant.
inline CMatrix beamsplitter_block(int total, double theta) {
  CMatrix gen = CMatrix::Zero(total + 1, total + 1);
  for (int j = 0; j < total; ++j) {
    const double amp = theta * std::sqrt((j + 1.0) * (total - j));
    gen(j + 1, j) = amp;
    gen(j, j + 1) = -amp;
  }
  return expm(gen, 1e-16, "beamsplitter block");
}

/// Mixing angle reproducing the beamsplitter convention of GateSpec.
inline double beamsplitter_theta(double transmittance) { return -std::asin(std::sqrt(transmittance)); }

}  // namespace detail

/// Two-mode Gaussian gate (beamsplitter or QND) as a dense operator on
/// dim^2 amplitudes. The beamsplitter is assembled exactly from its
/// photon-number blocks; the QND gate is exp(i g p1 x2) from the spectral
/// decomposition of the padded quadratures. Limited to dim <= 32.
inline TwoModeOperator gaussian_unitary_two_mode(const GateSpec& gate, const TruncationPolicy& policy) {
  gate.validate();
  policy.validate();
  require(gate.two_mode(), "gaussian_unitary_two_mode: gate acts on a single mode");
  const int d = policy.dim;
  if (d > 32) throw NumericError("gaussian_unitary_two_mode: dense two-mode operator capped at dim 32");
  const Eigen::Index big = static_cast<Eigen::Index>(d) * d;
  TwoModeOperator out{CMatrix::Zero(big, big), d, d, to_string(gate.kind) + "(" + std::to_string(gate.parameter) + ")"};

  if (gate.kind == GateKind::beamsplitter) {
    const double theta = detail::beamsplitter_theta(gate.parameter);
    for (int total = 0; total <= 2 * (d - 1); ++total) {
      const CMatrix block = detail::beamsplitter_block(total, theta);
      for (int j = 0; j <= total; ++j) {
        for (int k = 0; k <= total; ++k) {
          if (j >= d || total - j >= d || k >= d || total - k >= d) continue;
          out.entries(static_cast<Eigen::Index>(j) * d + (total - j), static_cast<Eigen::Index>(k) * d + (total - k)) = block(j, k);
        }
      }
    }
    return out;
  }

  const int pd = policy.padded_dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> p_eig(momentum_matrix(pd));
  Eigen::SelfAdjointEigenSolver<CMatrix> x_eig(position_matrix(pd));
  const CMatrix vp = p_eig.eigenvectors().topRows(d);
  const CMatrix vx = x_eig.eigenvectors().topRows(d);
  // rows of (Vp (x) Vx) restricted to the output block
  CMatrix w(big, static_cast<Eigen::Index>(pd) * pd);
  for (int m = 0; m < d; ++m) {
    for (int k = 0; k < d; ++k) {
      for (int a = 0; a < pd; ++a) {
        w.row(static_cast<Eigen::Index>(m) * d + k).segment(static_cast<Eigen::Index>(a) * pd, pd) = vp(m, a) * vx.row(k);
      }
    }
  }
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(pd) * pd);
  for (int a = 0; a < pd; ++a) {
    for (int b = 0; b < pd; ++b) phases(static_cast<Eigen::Index>(a) * pd + b) = std::exp(cplx(0.0, gate.parameter * p_eig.eigenvalues()(a) * x_eig.eigenvalues()(b)));
  }
  out.entries = w * phases.asDiagonal() * w.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// Kraus operators

/// Heralded QND circuit <n|_2 S_2(Delta3) Q(g) |S_Delta2>_2 with
/// Q(g) = exp(i g p1 x2). Without the coherent-bifurcation constraint this
/// covers both the bifurcation (n >= 2) and the damping circuit (n = 0).
struct QndCircuit {
  int n = 0;
  double delta2 = 0.0;
  double delta3 = 1.0;
  double g = 0.0;

  void validate() const {
    require(n >= 0, "QndCircuit: n must be non-negative");
    require(delta2 > 0.0 && delta3 > 0.0, "QndCircuit: Delta must be positive");
    require(std::isfinite(g), "QndCircuit: g must be finite");
  }
};

inline QndCircuit circuit_of(const StepParams& step) { return QndCircuit{step.n, step.delta2, step.delta3, step.g}; }

/// h_n(p) = <n| exp(i g Delta3 p x) |S_{Delta2 Delta3}>: the circuit acts on
/// the input as h_n(p-hat).
inline cplx qnd_symbol(const QndCircuit& c, double p) {
  const Eigen::VectorXcd amps = kicked_squeezed_amplitudes(c.g * c.delta3 * p, c.delta2 * c.delta3, c.n + 1);
  return amps(c.n);
}

/// Q(g) kicks the ancilla momentum by g p1 and the squeezer rescales the kick,
/// so the Kraus operator is the function h_n of the input momentum. It
/// therefore commutes with every position shift. Its number-basis entries are
/// computed by quadrature, which gives the untruncated operator's matrix
/// elements.
inline FockOperator kraus_qnd(const QndCircuit& circuit, const TruncationPolicy& policy) {
  circuit.validate();
  policy.validate();
  require(circuit.n < policy.dim, "kraus_qnd: herald count outside the truncation");
  CMatrix k = quadrature_function_matrix([&](double p) { return qnd_symbol(circuit, p); }, policy.dim, true);
  return FockOperator{std::move(k), "K_qnd(n=" + std::to_string(circuit.n) + ")"};
}

/// K_n of the iterable generalized photon subtraction at a solved step.
inline FockOperator kraus_igps(const StepParams& step, const TruncationPolicy& policy) {
  step.validate();
  FockOperator k = kraus_qnd(circuit_of(step), policy);
  k.label = "K_igps(n=" + std::to_string(step.n) + ")";
  return k;
}

/// Parameters of the beamsplitter (non-iterable) generalized photon
/// subtraction.
struct GpsParams {
  int n = 0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double transmittance = 0.0;
};

/// Ancilla squeezing and transmittance meeting T Delta1^2 + R Delta2^2 = 1 and
/// Delta2^2 = 1/(1 + Delta1^2). Feasible for Delta1 >= 1.
inline GpsParams solve_gps_params(int n, double delta1) {
  require(n >= 0, "solve_gps_params: n must be non-negative");
  require(delta1 > 0.0, "solve_gps_params: Delta1 must be positive");
  const double a = delta1 * delta1;
  const double b = 1.0 / (1.0 + a);
  if (a < 1.0) throw ValidationError("solve_gps_params: conditions infeasible for Delta1^2 < 1");
  return GpsParams{n, delta1, std::sqrt(b), (1.0 - b) / (a - b)};
}

/// K_n = <n|_2 B(T) |S_Delta2>_2. The beamsplitter conserves the total photon
/// number, so each entry needs a single exactly exponentiated block.
inline FockOperator kraus_gps(const GpsParams& params, const TruncationPolicy& policy) {
  policy.validate();
  require(params.delta2 > 0.0, "kraus_gps: Delta2 must be positive");
  require(params.transmittance >= 0.0 && params.transmittance <= 1.0, "kraus_gps: T outside [0, 1]");
  require(params.n >= 0 && params.n < policy.dim, "kraus_gps: herald count outside the truncation");
  const int d = policy.dim;
  const int n = params.n;
  const double theta = detail::beamsplitter_theta(params.transmittance);
  const Eigen::VectorXcd ancilla = displaced_squeezed_amplitudes(0.0, params.delta2, d + n);
  CMatrix k = CMatrix::Zero(d, d);
  for (int total = n; total < d + n; ++total) {
    const CMatrix block = detail::beamsplitter_block(total, theta);
    const int m = total - n;  // output photons in mode 1
    for (int in = 0; in <= std::min(total, d - 1); ++in) k(m, in) = block(m, in) * ancilla(total - in);
  }
  return FockOperator{std::move(k), "K_gps(n=" + std::to_string(n) + ")"};
}

/// Process-wide memo of iterable-subtraction Kraus operators keyed by
/// (StepParams, policy). Entries are immutable once inserted.
class KrausCache {
 public:
  std::shared_ptr<const FockOperator> get(const StepParams& step, const TruncationPolicy& policy) {
    const Key key{step.n, step.delta1, step.delta2, step.delta3, step.g, policy.dim, policy.pad_factor};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto op = std::make_shared<const FockOperator>(kraus_igps(step, policy));
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.emplace(key, std::move(op)).first->second;
  }

  static KrausCache& global() {
    static KrausCache cache;
    return cache;
  }

 private:
  using Key = std::tuple<int, double, double, double, double, int, int>;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const FockOperator>> entries_;
};

// ---------------------------------------------------------------------------
// Damping

enum class Axis { x, p };

struct DampingSpec {
  double t = 0.0;
  Axis axis = Axis::x;

  void validate() const { require(t >= 0.0 && std::isfinite(t), "DampingSpec: t must be finite and non-negative"); }
};

/// exp(-t x^2) or exp(-t p^2), built by a padded exponential.
inline FockOperator damping_op(const DampingSpec& spec, const TruncationPolicy& policy) {
  spec.validate();
  const bool on_x = spec.axis == Axis::x;
  const std::string label = std::string(on_x ? "exp(-t x^2)" : "exp(-t p^2)") + "[t=" + std::to_string(spec.t) + "]";
  return padded_exp([&](const PaddedQuadratures& q) -> CMatrix { return on_x ? CMatrix(-spec.t * (q.x * q.x)) : CMatrix(-spec.t * (q.p * q.p)); },
                    policy, label);
}

/// Damping strength realized by the QND circuit with n = 0:
/// t = g^2 Delta3^2 / (2 (1 + Delta2^2 Delta3^2)), acting on p.
inline double circuit_damping_strength(double delta2, double delta3, double g) {
  return g * g * delta3 * delta3 / (2.0 * (1.0 + delta2 * delta2 * delta3 * delta3));
}

/// The n = 0 circuit with no output squeezer realizing exp(-t p^2) from an
/// ancilla of squeezing Delta2: g = sqrt(2 t (1 + Delta2^2)). Its Kraus
/// operator is sqrt(2 Delta2 / (1 + Delta2^2)) exp(-t p^2); the prefactor
/// enters the heralding probability.
inline QndCircuit damping_circuit(double t, double delta2) {
  require(t >= 0.0 && std::isfinite(t), "damping_circuit: t must be non-negative");
  require(delta2 > 0.0, "damping_circuit: Delta2 must be positive");
  return QndCircuit{0, delta2, 1.0, std::sqrt(2.0 * t * (1.0 + delta2 * delta2))};
}

/// Squared prefactor |<0|S_{Delta2}>|^2 of the damping circuit.
inline double damping_circuit_yield(double delta2) { return 2.0 * delta2 / (1.0 + delta2 * delta2); }

/// Repeated exp(-t x^2) evaluation from one spectral decomposition of the
/// padded position operator. Produces the same operator as damping_op.
class PositionDamper {
 public:
  explicit PositionDamper(const TruncationPolicy& policy) : dim_(policy.dim) {
    policy.validate();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(position_matrix(policy.padded_dim()));
    nodes_ = eig.eigenvalues();
    vectors_ = eig.eigenvectors().topRows(dim_);
  }

  FockOperator op(double t) const {
    require(t >= 0.0 && std::isfinite(t), "PositionDamper: t must be non-negative");
    Eigen::VectorXcd d(nodes_.size());
    for (Eigen::Index j = 0; j < nodes_.size(); ++j) d(j) = std::exp(-t * nodes_(j) * nodes_(j));
    return FockOperator{vectors_ * d.asDiagonal() * vectors_.adjoint(), "exp(-t x^2)[t=" + std::to_string(t) + "]"};
  }

 private:
  int dim_;
  Eigen::VectorXd nodes_;
  CMatrix vectors_;
};

// ---------------------------------------------------------------------------
// Steps and seeds

/// One logged operation of a preparation sequence.
struct StepRecord {
  std::string label;
  double probability = 1.0;  // 1 for unitary steps
  double tail_mass = 0.0;
};

struct ConditionedResult {
  FockState state;         // normalized
  double probability = 0;  // |K psi|^2 for normalized psi
};

/// Applies a conditioned operator and renormalizes.
inline ConditionedResult apply_conditioned(const FockOperator& op, const FockState& input) {
  const FockState in = input.is_normalized() ? input : input.normalized();
  const FockState out = apply(op, in);
  const double prob = out.norm_squared();
  if (!(prob > 0.0)) throw NumericError(op.label + ": zero heralding probability");
  return {out.normalized(), prob};
}

/// One coherent bifurcation B_w realized by the iterable generalized photon
/// subtraction.
inline ConditionedResult bifurcate(const FockState& state, const FockOperator& kraus) {
  require(state.dim() == kraus.dim(), "bifurcate: dimension mismatch");
  return apply_conditioned(kraus, state);
}

inline ConditionedResult bifurcate(const FockState& state, const StepParams& step, const TruncationPolicy& policy) {
  return bifurcate(state, *KrausCache::global().get(step, policy));
}

struct SeedSpec {
  cplx alpha = 1.0;
  cplx beta = 0.0;
  double w_seed = kSqrtPi;

  void validate() const {
    require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) < 1e-9, "SeedSpec: |alpha|^2 + |beta|^2 must be 1");
    require(std::abs(alpha) >= std::abs(beta) - 1e-12, "SeedSpec: requires |alpha| >= |beta|");
    require(w_seed >= kSqrtPi / 2.0 - 1e-12, "SeedSpec: w_seed must be >= sqrt(pi)/2");
  }
};

/// Coefficients of S(delta) exp(-c p^2) exp(i b x^2) exp(-a x^2) in the seed
/// construction.
struct SeedParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double delta = 1.0;
};

/// Returns nullopt when beta == 0: no seed is needed, the codeword path applies.
inline std::optional<SeedParams> seed_params(cplx alpha, cplx beta, double w, double delta) {
  require(w >= kSqrtPi / 2.0 - 1e-12, "seed_params: w must be >= sqrt(pi)/2");
  require(delta > 0.0, "seed_params: Delta must be positive");
  require(std::abs(alpha) > 0.0, "seed_params: alpha must be non-zero");
  if (std::abs(beta) == 0.0) return std::nullopt;
  const double w2 = w * w;
  SeedParams s;
  s.a = std::log(std::abs(alpha / beta)) / (4.0 * w2);
  s.b = std::arg(beta / alpha) / (4.0 * w2);
  s.c = (4.0 * w2 / std::numbers::pi - 1.0) / (2.0 * delta * delta);
  s.delta = 2.0 * w / kSqrtPi;
  if (std::abs(w - kSqrtPi / 2.0) < 1e-12) {
    s.c = 0.0;
    s.delta = 1.0;
  }
  return s;
}

/// alpha |S_Delta> + beta/2 [D(-sqrt(pi)) + D(sqrt(pi))] |S_Delta>, normalized.
inline FockState seed_target(cplx alpha, cplx beta, double delta, const TruncationPolicy& policy) {
  CVector v = alpha * displaced_squeezed_amplitudes(0.0, delta, policy.dim);
  v += 0.5 * beta * (displaced_squeezed_amplitudes(-kSqrtPi, delta, policy.dim) + displaced_squeezed_amplitudes(kSqrtPi, delta, policy.dim));
  return FockState(std::move(v)).normalized();
}

struct SeedResult {
  FockState state;
  double probability = 1.0;
  std::vector<StepRecord> steps;
  StepParams step;
  SeedParams params;
  double target_fidelity = 0.0;
};

/// Builds the seed state: two bifurcations of |S_Delta> with half-separation
/// w_seed, then exp(-a x^2), exp(i b x^2), exp(-c p^2) and S(delta), in that
/// order. Damping steps run on the n = 0 circuit with ancilla Delta2 and
/// contribute their heralding probability; unitary steps contribute 1.
inline SeedResult build_seed(const SeedSpec& spec, double delta, int n_seed, double delta2, double g, const TruncationPolicy& policy,
                             Warnings* warnings = nullptr) {
  spec.validate();
  policy.validate();
  const auto params = seed_params(spec.alpha, spec.beta, spec.w_seed, delta);
  if (!params) throw ValidationError("build_seed: beta = 0 needs no seed; use the codeword path");

  SeedResult out;
  out.params = *params;
  out.step = solve_step_params(n_seed, spec.w_seed, delta2, g, warnings);

  FockState state = squeezed_vacuum(delta, policy).normalized();
  auto record = [&](const std::string& label, double prob) {
    out.steps.push_back({label, prob, state.tail_mass()});
    out.probability *= prob;
    check_tail(state, policy, label, warnings);
  };

  const auto kraus = KrausCache::global().get(out.step, policy);
  for (int i = 1; i <= 2; ++i) {
    auto r = bifurcate(state, *kraus);
    state = r.state;
    record("seed bifurcation " + std::to_string(i), r.probability);
  }
  if (params->a > 0.0) {
    auto r = apply_conditioned(damping_op({params->a, Axis::x}, policy), state);
    state = r.state;
    record("seed x-damping", r.probability * damping_circuit_yield(delta2));
  }
  if (params->b != 0.0) {
    state = apply(gaussian_unitary({GateKind::quadratic_phase, params->b}, policy), state).normalized();
    record("seed quadratic phase", 1.0);
  }
  if (params->c > 0.0) {
    auto r = apply_conditioned(damping_op({params->c, Axis::p}, policy), state);
    state = r.state;
    record("seed p-damping", r.probability * damping_circuit_yield(delta2));
  }
  if (params->delta != 1.0) {
    state = apply(gaussian_unitary({GateKind::squeeze, params->delta}, policy), state).normalized();
    record("seed squeeze", 1.0);
  }
  out.state = state;
  out.target_fidelity = fidelity(state, seed_target(spec.alpha, spec.beta, delta, policy));
  return out;
}

/// Uniform position grid used for peak readout: spacing 0.02 over [-10, 10].
inline std::vector<double> readout_grid(double lo = -10.0, double hi = 10.0, double step = 0.02) {
  std::vector<double> xs;
  const int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  xs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) xs.push_back(lo + i * step);
  return xs;
}

}  // namespace gkp
