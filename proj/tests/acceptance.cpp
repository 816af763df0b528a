// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 11).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "gkp/gkp.hpp"
#include "oracles.hpp"

using namespace gkp;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string row_detail(const Table1Outcome& o, double seconds) {
  return fmt("%s: P %.3e (ref %.2e, ratio %.2f), %.2f dB (ref %.1f), F %.4f (ref %.3f), %.1f s", o.row.label.c_str(),
             o.result.total_probability, o.row.probability, o.probability_ratio, o.result.squeezing_db, o.row.db, o.result.fidelity,
             o.row.fidelity, seconds);
}

Table1Outcome timed_row(int id, double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  auto o = reproduce_table1({id}).front();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

void table_rows() {
  double s1 = 0.0, s3 = 0.0, s5 = 0.0, s7 = 0.0;
  const auto r1 = timed_row(1, s1);
  report(1, r1.pass() && s1 < 300.0, row_detail(r1, s1));
  const auto r3 = timed_row(3, s3);
  report(2, r3.pass(), row_detail(r3, s3));
  const auto r5 = timed_row(5, s5);
  report(3, r5.pass(), row_detail(r5, s5));
  const auto r7 = timed_row(7, s7);
  const double seed_p = r7.result.seed_probability;
  const bool seed_order = seed_p > 1e-6 && seed_p < 1e-4;
  report(4, r7.pass() && seed_order, row_detail(r7, s7) + fmt(", seed P %.2e", seed_p));
}

void cat_approximation() {
  TruncationPolicy policy;
  bool pass = true;
  std::string detail;
  double previous_gap = 1.0;
  for (int n : {2, 4, 6, 10}) {
    const auto step = solve_step_params(n, kSqrtPi, std::exp(-1.0), 1.0);
    const auto r = bifurcate(squeezed_vacuum(step.delta1, policy).normalized(), step, policy);
    const double dc = delta_c(precision_after_qnd(step.delta1, step.delta2, step.delta3, step.g));
    const double x0 = std::sqrt(2.0 * n) / dc;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const FockState cat(displaced_squeezed_amplitudes(x0, dc, policy.dim) + sign * displaced_squeezed_amplitudes(-x0, dc, policy.dim));
    const double numeric = fidelity(r.state, cat);
    const double exact = cat_fidelity(n);
    pass = pass && std::abs(numeric - exact) < 2e-3;
    // 1 - F shrinks roughly like 0.03/n
    const double gap = 1.0 - exact;
    pass = pass && gap < previous_gap && std::abs(gap * n - 0.03) < 0.03;
    previous_gap = gap;
    detail += fmt("n=%d %.5f/%.5f ", n, numeric, exact);
  }
  report(5, pass, "numeric/closed form: " + detail);
}

void oracle_equivalence() {
  TruncationPolicy policy;
  policy.dim = 40;
  const auto step = solve_step_params(6, kSqrtPi, std::exp(-1.0), 1.0);
  const double kraus_err =
      (kraus_igps(step, policy).entries - oracle::brute_force_qnd_kraus(6, step.delta2, step.delta3, step.g, 40)).cwiseAbs().maxCoeff();

  TruncationPolicy small;
  small.dim = 24;
  double moment_err = 0.0;
  for (unsigned seed = 11; seed < 15; ++seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 5);
    GaussianState gs = GaussianState::vacuum(2);
    TwoModeState fs = tensor(FockState::vacuum(24), FockState::vacuum(24));
    const FockOperator id = FockOperator::identity(24);
    for (int k = 0; k < 5; ++k) {
      GateSpec gate;
      switch (pick(rng)) {
        case 0: gate = {GateKind::squeeze, std::exp(0.2 * unit(rng))}; break;
        case 1: gate = {GateKind::displace, 0.5 * unit(rng)}; break;
        case 2: gate = {GateKind::rotate, 3.0 * unit(rng)}; break;
        case 3: gate = {GateKind::quadratic_phase, 0.1 * unit(rng)}; break;
        case 4: gate = {GateKind::beamsplitter, 0.5 + 0.5 * unit(rng)}; break;
        default: gate = {GateKind::qnd, 0.3 * unit(rng)}; break;
      }
      if (gate.two_mode()) {
        gs = evolve(gs, gate, {0, 1});
        fs = apply(gaussian_unitary_two_mode(gate, small), fs);
      } else {
        const int m = k % 2;
        gs = evolve(gs, gate, {m});
        const FockOperator u = gaussian_unitary(gate, small);
        fs = apply(m == 0 ? tensor(u, id) : tensor(id, u), fs);
      }
    }
    const auto fm = oracle::two_mode_moments(fs);
    moment_err = std::max({moment_err, (fm.mean - gs.mean).cwiseAbs().maxCoeff(), (fm.cov - gs.cov).cwiseAbs().maxCoeff()});
  }
  report(6, kraus_err < 1e-10 && moment_err < 1e-6, fmt("Kraus max entry error %.2e, chain moment error %.2e", kraus_err, moment_err));
}

void displacement_covariance() {
  TruncationPolicy policy;
  const auto step = solve_step_params(4, kSqrtPi, std::exp(-1.0), 1.0);
  const FockOperator k = kraus_igps(step, policy);
  const FockState in = squeezed_vacuum(step.delta1, policy).normalized();
  auto defect = [&](const FockOperator& op, double d) {
    const CMatrix shift = gaussian_unitary({GateKind::displace, d}, policy).entries;
    const CVector a = op.entries * (shift * in.amplitudes());
    const CVector b = shift * (op.entries * in.amplitudes());
    return (a - b).norm() / b.norm();
  };
  double worst = 0.0;
  for (double d : {0.5, 1.0, kSqrtPi}) worst = std::max(worst, defect(k, d));
  const double gps = defect(kraus_gps(solve_gps_params(4, step.delta1), policy), 1.0);
  report(7, worst < 1e-6 && gps > 1e-2, fmt("QND defect %.2e, beamsplitter defect %.2e", worst, gps));
}

void linearity() {
  TruncationPolicy policy;
  const auto step = solve_step_params(6, kSqrtPi, std::exp(-1.0), 1.0);
  const FockOperator k = kraus_igps(step, policy);
  const CVector a = displaced_squeezed_amplitudes(0.4, step.delta1, policy.dim);
  const CVector b = displaced_squeezed_amplitudes(-kSqrtPi, step.delta1, policy.dim);
  const cplx ca(0.8, 0.1), cb(-0.3, 0.5);
  const double err = (k.entries * (ca * a + cb * b) - ca * (k.entries * a) - cb * (k.entries * b)).cwiseAbs().maxCoeff();
  report(8, err < 1e-12, fmt("max deviation %.2e", err));
}

void wigner_suite() {
  const double pi = std::numbers::pi;
  const double vac = wigner_point(FockState::vacuum(40).amplitudes(), 0.0, 0.0);
  TruncationPolicy policy;
  const FockState state = FockState(displaced_squeezed_amplitudes(1.2, 1.3, policy.dim) +
                                    cplx(0.0, 0.7) * oracle::coherent(cplx(-0.8, 0.9), policy.dim))
                              .normalized();
  const WignerSpec spec{-7.0, 7.0, 281, -7.0, 7.0, 281};
  const auto grid = wigner(state, spec);
  const double hx = 14.0 / 280.0;
  const double norm = grid.values.sum() * hx * hx;
  std::vector<double> axis;
  for (int i = 0; i < spec.n_x; ++i) axis.push_back(spec.x(i));
  const CVector px = wavefunction_x(state, axis);
  const CVector pp = wavefunction_p(state, axis);
  double marginal = 0.0;
  for (int i = 0; i < spec.n_x; ++i) {
    marginal = std::max(marginal, std::abs(grid.values.col(i).sum() * hx - std::norm(px(i))));
    marginal = std::max(marginal, std::abs(grid.values.row(i).sum() * hx - std::norm(pp(i))));
  }
  const bool pass = std::abs(vac - 1.0 / pi) < 1e-6 && std::abs(norm - 1.0) < 1e-3 && marginal < 1e-4;
  report(9, pass, fmt("vacuum %.8f (1/pi %.8f), normalization %.6f, marginal error %.2e", vac, 1.0 / pi, norm, marginal));
}

void binomial_envelope() {
  bool pass = true;
  std::string detail;
  double previous = 1.0;
  for (int total : {20, 40, 80, 160}) {
    const auto b = binomial_gaussian(total, total / 2);
    const double rel = std::abs(b.approx - b.exact) / b.exact;
    if (total == 20) pass = pass && rel < 0.02 && b.exact == static_cast<double>(oracle::binomial(20, 10));
    pass = pass && rel < previous;
    previous = rel;
    detail += fmt("N=%d %.3f%% ", total, 100.0 * rel);
  }
  report(10, pass, "relative error " + detail);
}

void closed_form_consistency() {
  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(closed_form_pmax(n) / closed_form_pn(n, 4.0 * n) - 1.0));
  TruncationPolicy policy;
  const auto step = solve_step_params(6, kSqrtPi, std::exp(-1.0), 1.0);
  const double numeric = apply(kraus_igps(step, policy), squeezed_vacuum(step.delta1, policy).normalized()).norm_squared();
  const double squared = closed_form_pn(6, pn_t_squared(step.g, step.delta1, step.delta2));
  const double printed = closed_form_pn(6, pn_t_printed(step.g, step.delta1, step.delta2));
  const bool symbol = std::abs(numeric / squared - 1.0) < 1e-8 && std::abs(numeric / printed - 1.0) > 0.05;
  report(11, worst < 1e-12 && symbol,
         fmt("pmax vs P(4n) worst %.1e; n=6 numeric P %.6e, t=g^2 D1^2/D2^2 gives %.6e, t=g^2 D1/D2 gives %.6e", worst, numeric, squared, printed));
}

}  // namespace

int main() {
  try {
    table_rows();
    cat_approximation();
    oracle_equivalence();
    displacement_covariance();
    linearity();
    wigner_suite();
    binomial_envelope();
    closed_form_consistency();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 11;
  }
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
