#pragma once

// Approximate GKP codewords and qubits, effective-squeezing fits, envelope
// damping and Wigner-function sampling.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gkp/breeding.hpp"
#include "gkp/errors.hpp"
#include "gkp/fock.hpp"
#include "gkp/hermite.hpp"

namespace gkp {

inline double squeezing_db(double delta) { return 20.0 * std::log10(delta); }
inline double delta_from_db(double db) { return std::pow(10.0, db / 20.0); }

/// Number of peaks kept on each side so that the dropped envelope weight
/// exp(-x^2 / (2 kappa^2)) stays below 1e-10.
inline int default_s_max(double kappa) { return std::max(8, static_cast<int>(std::ceil(1.92 * kappa))); }

/// alpha |0~> + beta |1~> with peaks of squeezing delta under an envelope of
/// width kappa. |k~> is normalized on its own before the superposition.
struct GkpTarget {
  cplx c0 = 1.0;
  cplx c1 = 0.0;
  double delta = 1.0;
  double kappa = 1.0;
  int s_max = 8;

  void validate() const {
    require(delta > 0.0 && kappa > 0.0, "GkpTarget: Delta and kappa must be positive");
    require(std::norm(c0) + std::norm(c1) > 0.0, "GkpTarget: zero logical amplitudes");
    require(s_max >= 1, "GkpTarget: s_max must be >= 1");
  }
};

/// Unnormalized sum_s exp(-x_s^2/(2 kappa^2)) D(x_s)|S_delta> with
/// x_s = (2s + k) sqrt(pi), projected on the first dim levels.
inline CVector codeword_amplitudes(int k, double delta, double kappa, int s_max, int dim) {
  require(k == 0 || k == 1, "codeword: k must be 0 or 1");
  CVector v = CVector::Zero(dim);
  for (int s = -s_max; s <= s_max; ++s) {
    const double x = (2.0 * s + k) * kSqrtPi;
    v += std::exp(-x * x / (2.0 * kappa * kappa)) * displaced_squeezed_amplitudes(x, delta, dim);
  }
  return v;
}

/// Squared norm of the same sum in the untruncated space.
inline double codeword_norm_squared(int k, double delta, double kappa, int s_max) {
  double total = 0.0;
  for (int s = -s_max; s <= s_max; ++s) {
    const double xs = (2.0 * s + k) * kSqrtPi;
    for (int r = -s_max; r <= s_max; ++r) {
      const double xr = (2.0 * r + k) * kSqrtPi;
      total += std::exp(-(xs * xs + xr * xr) / (2.0 * kappa * kappa) - delta * delta * (xs - xr) * (xs - xr) / 4.0);
    }
  }
  return total;
}

/// Normalized codeword |k~_{delta,kappa}>. Warns when the truncation drops
/// more than tail_tol of its norm.
inline FockState codeword(int k, double delta, double kappa, const TruncationPolicy& policy, Warnings* warnings = nullptr) {
  require(delta > 0.0 && kappa > 0.0, "codeword: Delta and kappa must be positive");
  const int s_max = default_s_max(kappa);
  const FockState raw(codeword_amplitudes(k, delta, kappa, s_max, policy.dim));
  const double lost = 1.0 - raw.norm_squared() / codeword_norm_squared(k, delta, kappa, s_max);
  if (lost > policy.tail_tol) {
    warn(warnings, "codeword " + std::to_string(k) + ": truncation drops " + sci(lost) + " of the norm");
  }
  return raw.normalized();
}

inline GkpTarget codeword_target(int k, double delta, double kappa) {
  require(k == 0 || k == 1, "codeword_target: k must be 0 or 1");
  return GkpTarget{k == 0 ? cplx(1.0) : cplx(0.0), k == 0 ? cplx(0.0) : cplx(1.0), delta, kappa, default_s_max(kappa)};
}

/// alpha |0~> + beta e^{i phi} |1~>.
inline GkpTarget qubit_target(cplx alpha, cplx beta, double phi, double delta, double kappa) {
  GkpTarget t{alpha, beta * std::exp(cplx(0.0, phi)), delta, kappa, default_s_max(kappa)};
  t.validate();
  return t;
}

/// X^N applied to the logical amplitudes.
inline GkpTarget logical_flip(GkpTarget target, int count) {
  if (count % 2 != 0) std::swap(target.c0, target.c1);
  return target;
}

inline FockState target_state(const GkpTarget& target, const TruncationPolicy& policy, Warnings* warnings = nullptr) {
  target.validate();
  CVector v = CVector::Zero(policy.dim);
  for (int k = 0; k < 2; ++k) {
    const cplx c = k == 0 ? target.c0 : target.c1;
    if (c == 0.0) continue;
    const FockState raw(codeword_amplitudes(k, target.delta, target.kappa, target.s_max, policy.dim));
    const double full = codeword_norm_squared(k, target.delta, target.kappa, target.s_max);
    if (1.0 - raw.norm_squared() / full > policy.tail_tol) {
      warn(warnings, "target codeword " + std::to_string(k) + ": truncation drops " + sci(1.0 - raw.norm_squared() / full) + " of the norm");
    }
    v += c * raw.amplitudes() / std::sqrt(full);
  }
  return FockState(std::move(v)).normalized();
}

// ---------------------------------------------------------------------------
// Fits

struct Maximum {
  double arg = 0.0;
  double value = 0.0;
  bool at_edge = false;
};

/// Coarse scan on [lo, hi] then golden-section refinement of the best
/// bracket down to `tol`.
inline Maximum maximize_1d(const std::function<double(double)>& f, double lo, double hi, double coarse, double tol) {
  require(hi > lo && coarse > 0.0 && tol > 0.0, "maximize_1d: bad bracket");
  const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) / coarse))) + 1;
  const double h = (hi - lo) / (count - 1);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const double v = f(lo + i * h);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(count - 1, best + 1) * h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  Maximum m{best_value >= std::max(fc, fd) ? lo + best * h : (fc > fd ? c : d), std::max({best_value, fc, fd}), false};
  m.at_edge = m.arg - lo < 2.0 * tol || hi - m.arg < 2.0 * tol;
  return m;
}

struct FitOptions {
  bool fit_kappa = true;  // false ties kappa = Delta during the search
  double db_lo = 0.0;
  double db_hi = 14.0;
  double kappa_db_lo = 0.0;
  double kappa_db_hi = 16.0;
  double resolution_db = 0.01;
};

struct FitResult {
  double delta = 0.0;
  double kappa = 0.0;
  double db = 0.0;
  double fidelity = 0.0;         // to the kappa = Delta target at the fitted Delta
  double family_fidelity = 0.0;  // maximum reached during the search
  bool at_edge = false;
};

inline double target_fidelity(const FockState& state, cplx c0, cplx c1, double delta, double kappa, const TruncationPolicy& policy) {
  return fidelity(state, target_state(GkpTarget{c0, c1, delta, kappa, default_s_max(kappa)}, policy));
}

/// Effective squeezing of `state` against the family c0|0~> + c1|1~>.
/// With fit_kappa the peak squeezing Delta comes from the joint maximum over
/// (Delta, kappa); the reported fidelity is always to the kappa = Delta state.
inline FitResult fit_effective_squeezing(const FockState& state, cplx c0, cplx c1, const TruncationPolicy& policy,
                                         const FitOptions& options = {}) {
  require(options.db_hi > options.db_lo, "fit_effective_squeezing: empty squeezing range");
  const FockState input = state.is_normalized() ? state : state.normalized();
  const double tol = options.resolution_db;
  FitResult out;
  if (!options.fit_kappa) {
    const auto m = maximize_1d(
        [&](double db) {
          const double d = delta_from_db(db);
          return target_fidelity(input, c0, c1, d, d, policy);
        },
        options.db_lo, options.db_hi, 0.25, tol);
    out.db = m.arg;
    out.family_fidelity = m.value;
    out.at_edge = m.at_edge;
    out.delta = out.kappa = delta_from_db(m.arg);
  } else {
    Maximum inner_best;
    bool inner_edge = false;
    auto inner = [&](double kappa_db) {
      const double kappa = delta_from_db(kappa_db);
      return maximize_1d([&](double db) { return target_fidelity(input, c0, c1, delta_from_db(db), kappa, policy); }, options.db_lo,
                         options.db_hi, 0.5, tol);
    };
    const auto outer = maximize_1d([&](double kappa_db) { return inner(kappa_db).value; }, options.kappa_db_lo, options.kappa_db_hi, 1.0, tol);
    inner_best = inner(outer.arg);
    inner_edge = inner_best.at_edge;
    out.db = inner_best.arg;
    out.delta = delta_from_db(inner_best.arg);
    out.kappa = delta_from_db(outer.arg);
    out.family_fidelity = inner_best.value;
    out.at_edge = inner_edge;
  }
  out.fidelity = target_fidelity(input, c0, c1, out.delta, out.delta, policy);
  return out;
}

struct EnvelopeResult {
  double t = 0.0;
  FockState state;
  double probability = 1.0;  // heralding probability of the damping circuit
  FitResult fit;
};

/// Chooses t in [0, t_max] for the envelope damping exp(-t x^2) maximizing
/// the kappa = Delta fidelity of the fitted state. The damping runs on the
/// n = 0 circuit with ancilla squeezing delta2. A flat objective gives t = 0.
inline EnvelopeResult optimize_envelope_damping(const FockState& state, cplx c0, cplx c1, double delta2, const TruncationPolicy& policy,
                                                const FitOptions& options = {}, double t_max = 2.0) {
  require(t_max > 0.0, "optimize_envelope_damping: t_max must be positive");
  const FockState input = state.is_normalized() ? state : state.normalized();
  const PositionDamper damper(policy);
  auto evaluate = [&](double t) -> EnvelopeResult {
    if (t <= 0.0) return {0.0, input, 1.0, fit_effective_squeezing(input, c0, c1, policy, options)};
    auto r = apply_conditioned(damper.op(t), input);
    auto fit = fit_effective_squeezing(r.state, c0, c1, policy, options);
    return {t, r.state, r.probability * damping_circuit_yield(delta2), fit};
  };

  // dense near zero where the optimum usually sits, sparse further out
  std::vector<double> grid;
  for (double t = 0.0; t < 0.1 - 1e-12; t += 0.005) grid.push_back(t);
  for (double t = 0.1; t < 0.5 - 1e-12; t += 0.02) grid.push_back(t);
  for (double t = 0.5; t <= t_max + 1e-12; t += 0.1) grid.push_back(t);

  std::vector<double> values;
  values.reserve(grid.size());
  for (double t : grid) values.push_back(evaluate(t).fit.fidelity);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*hi_it - *lo_it < 1e-12) return evaluate(0.0);

  const auto best = static_cast<std::size_t>(hi_it - values.begin());
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(grid.size() - 1, best + 1)];
  const auto m = maximize_1d([&](double t) { return evaluate(t).fit.fidelity; }, a, b, (b - a) / 4.0, 1e-4);
  return m.value >= *hi_it ? evaluate(m.arg) : evaluate(grid[best]);
}

// ---------------------------------------------------------------------------
// Wigner function

struct WignerSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  int n_x = 121;
  double p_min = -6.0;
  double p_max = 6.0;
  int n_p = 121;

  void validate() const {
    require(n_x >= 2 && n_p >= 2, "WignerSpec: at least two points per axis");
    require(x_max > x_min && p_max > p_min, "WignerSpec: empty range");
    require(static_cast<long long>(n_x) * n_p <= 4'000'000, "WignerSpec: grid larger than 4e6 points");
  }
  double x(int i) const { return x_min + i * (x_max - x_min) / (n_x - 1); }
  double p(int j) const { return p_min + j * (p_max - p_min) / (n_p - 1); }

  bool operator==(const WignerSpec&) const = default;
};

struct WignerGrid {
  WignerSpec spec;
  Eigen::MatrixXd values;  // rows over p, columns over x
};

/// W(x, p) of a pure state, normalized so that it integrates to 1 over dx dp.
/// Uses the Laguerre expansion with normalized associated-Laguerre functions
/// generated by a stable three-term recurrence.
inline double wigner_point(const CVector& c, double x, double p) {
  const int dim = static_cast<int>(c.size());
  const double b = 2.0 * (x * x + p * p);  // 4 |alpha|^2
  const double theta = std::atan2(p, x);
  double total = 0.0;
  std::vector<double> ell(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    // ell_m^k(B) = sqrt(m!/(m+k)!) B^{k/2} e^{-B/2} L_m^k(B), m = 0 .. dim-1-k
    const int count = dim - k;
    ell[0] = (b > 0.0 || k == 0) ? std::exp((k > 0 ? 0.5 * k * std::log(b) : 0.0) - 0.5 * b - 0.5 * std::lgamma(k + 1.0)) : 0.0;
    if (count > 1) ell[1] = (1.0 + k - b) * ell[0] / std::sqrt(1.0 + k);
    for (int m = 1; m + 1 < count; ++m) {
      ell[m + 1] = ((2.0 * m + 1.0 + k - b) * ell[m] - std::sqrt(m * (m + static_cast<double>(k))) * ell[m - 1]) / std::sqrt((m + 1.0) * (m + 1.0 + k));
    }
    const cplx phase = std::exp(cplx(0.0, k * theta));
    for (int m = 0; m < count; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      if (k == 0) {
        total += sign * std::norm(c(m)) * ell[m];
      } else {
        total += 2.0 * sign * std::real(c(m) * std::conj(c(m + k)) * phase) * ell[m];
      }
    }
  }
  return total / std::numbers::pi;
}

inline WignerGrid wigner(const FockState& state, const WignerSpec& spec) {
  spec.validate();
  const CVector c = state.is_normalized() ? state.amplitudes() : state.normalized().amplitudes();
  WignerGrid grid{spec, Eigen::MatrixXd(spec.n_p, spec.n_x)};
  for (int j = 0; j < spec.n_p; ++j) {
    for (int i = 0; i < spec.n_x; ++i) grid.values(j, i) = wigner_point(c, spec.x(i), spec.p(j));
  }
  return grid;
}

}  // namespace gkp
