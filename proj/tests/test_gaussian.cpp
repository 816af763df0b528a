#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gkp/gkp.hpp"
#include "oracles.hpp"

using namespace gkp;

namespace {

std::vector<GateSpec> all_gates() {
  return {{GateKind::squeeze, 1.7},         {GateKind::displace, -0.4}, {GateKind::rotate, 0.9},
          {GateKind::quadratic_phase, 0.3}, {GateKind::beamsplitter, 0.35}, {GateKind::qnd, -0.8}};
}

TEST(Symplectic, EveryGatePreservesOmega) {
  const Eigen::MatrixXd omega = symplectic_form(2);
  for (const auto& gate : all_gates()) {
    const std::vector<int> modes = gate.two_mode() ? std::vector<int>{0, 1} : std::vector<int>{1};
    const auto map = symplectic_of(gate, modes, 2);
    EXPECT_LT((map.matrix * omega * map.matrix.transpose() - omega).cwiseAbs().maxCoeff(), 1e-14) << to_string(gate.kind);
  }
}

TEST(Symplectic, InvalidGatesAreRejected) {
  EXPECT_THROW(symplectic_of({GateKind::squeeze, 0.0}, {0}, 1), ValidationError);
  EXPECT_THROW(symplectic_of({GateKind::beamsplitter, 1.2}, {0, 1}, 2), ValidationError);
  EXPECT_THROW(symplectic_of({GateKind::qnd, 1.0}, {0, 0}, 2), ValidationError);
  EXPECT_THROW(symplectic_of({GateKind::rotate, 1.0}, {0, 1}, 2), ValidationError);
  EXPECT_THROW(symplectic_of({GateKind::displace, 1.0}, {3}, 2), ValidationError);
}

TEST(Symplectic, EvolvedStatesStayPhysical) {
  GaussianState s = GaussianState::vacuum(2);
  for (const auto& gate : all_gates()) s = evolve(s, gate, gate.two_mode() ? std::vector<int>{0, 1} : std::vector<int>{0});
  EXPECT_GT(uncertainty_margin(s), -1e-12);
  // a pure state saturates the bound
  EXPECT_LT(std::abs(uncertainty_margin(s)), 1e-12);
}

// Fock-space gate chains against the symplectic moments.
class ChainAgreement : public ::testing::TestWithParam<unsigned> {};

TEST_P(ChainAgreement, MomentsMatchGaussianEvolution) {
  std::mt19937 rng(GetParam());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> mode(0, 1);
  TruncationPolicy policy;
  policy.dim = 24;

  GaussianState gs = GaussianState::vacuum(2);
  TwoModeState fs = tensor(FockState::vacuum(24), FockState::vacuum(24));
  const FockOperator id = FockOperator::identity(24);
  for (int step = 0; step < 5; ++step) {
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
      fs = apply(gaussian_unitary_two_mode(gate, policy), fs);
    } else {
      const int m = mode(rng);
      gs = evolve(gs, gate, {m});
      const FockOperator u = gaussian_unitary(gate, policy);
      fs = apply(m == 0 ? tensor(u, id) : tensor(id, u), fs);
    }
  }
  const auto fm = oracle::two_mode_moments(fs);
  EXPECT_NEAR(fs.amplitudes.squaredNorm(), 1.0, 1e-6);
  EXPECT_LT((fm.mean - gs.mean).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((fm.cov - gs.cov).cwiseAbs().maxCoeff(), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ChainAgreement, ::testing::Values(1u, 2u, 3u, 4u, 5u, 6u));

TEST(Precision, ConstraintFixesSigma22) {
  const auto step = solve_step_params(6, kSqrtPi, std::exp(-1.0), 1.0);
  const auto p = precision_after_qnd(step.delta1, step.delta2, step.delta3, step.g);
  EXPECT_NEAR(p.sigma(1, 1), 1.0, 1e-12);
  EXPECT_TRUE(p.positive_definite());
  const double a = step.delta1 * step.delta1;
  EXPECT_NEAR(delta_c(p) * delta_c(p), a * (1.0 + step.delta2 * step.delta2 * step.delta3 * step.delta3), 1e-12);
}

TEST(Precision, BeamsplitterLimits) {
  const auto open = precision_after_bs(2.0, 0.5, 0.0);
  EXPECT_NEAR(open.sigma(0, 0), 4.0, 1e-15);
  EXPECT_NEAR(open.sigma(0, 1), 0.0, 1e-15);
  const auto swap = precision_after_bs(2.0, 0.5, 1.0);
  EXPECT_NEAR(swap.sigma(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(swap.sigma(1, 1), 4.0, 1e-15);
  PrecisionMatrix bad;
  bad.sigma << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(delta_c(bad), ValidationError);
}

TEST(HeraldingProbability, NumericMatchesClosedFormWithSquaredSymbol) {
  TruncationPolicy policy;
  for (int n : {2, 4, 6}) {
    for (double g : {0.7, 1.0, 1.3}) {
      const auto step = solve_step_params(n, kSqrtPi, std::exp(-1.0), g);
      const FockState in = squeezed_vacuum(step.delta1, policy).normalized();
      const double numeric = apply(kraus_igps(step, policy), in).norm_squared();
      const double squared = closed_form_pn(n, pn_t_squared(g, step.delta1, step.delta2));
      const double printed = closed_form_pn(n, pn_t_printed(g, step.delta1, step.delta2));
      EXPECT_NEAR(numeric / squared, 1.0, 1e-8) << "n=" << n << " g=" << g;
      if (g == 1.0) {
        EXPECT_GT(std::abs(numeric / printed - 1.0), 0.05) << "n=" << n;
      }
    }
  }
}

TEST(HeraldingProbability, NormalizesOverAllOutcomes) {
  // sum over n of P(n) at fixed t is 1
  for (double t : {0.3, 2.0, 9.0}) {
    double sum = 0.0;
    for (int n = 0; n < 4000; ++n) sum += closed_form_pn(n, t);
    EXPECT_NEAR(sum, 1.0, 1e-9) << t;
  }
}

TEST(HeraldingProbability, MaximumSitsAtFourN) {
  for (int n : {1, 2, 4, 6, 10, 16}) {
    const double peak = closed_form_pmax(n);
    EXPECT_NEAR(peak / closed_form_pn(n, 4.0 * n), 1.0, 1e-12) << n;
    EXPECT_LT(closed_form_pn(n, 4.0 * n * 1.01), peak);
    EXPECT_LT(closed_form_pn(n, 4.0 * n * 0.99), peak);
  }
  EXPECT_DOUBLE_EQ(closed_form_pmax(0), 1.0);
}

TEST(CatFidelity, MatchesGridIntegration) {
  // x^n e^{-x^2/4} against e^{-(x-x0)^2/2} +- e^{-(x+x0)^2/2}, x0 = sqrt(2n)
  for (int n : {1, 2, 3, 4, 6, 10, 16, 25}) {
    const double x0 = std::sqrt(2.0 * n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    auto heralded = [&](double x) { return cplx(std::pow(x, n) * std::exp(-x * x / 4.0)); };
    auto cat = [&](double x) { return cplx(std::exp(-0.5 * (x - x0) * (x - x0)) + sign * std::exp(-0.5 * (x + x0) * (x + x0))); };
    EXPECT_NEAR(cat_fidelity(n), oracle::grid_fidelity(heralded, cat, -40.0, 40.0, 80001), 1e-9) << n;
  }
  EXPECT_THROW(cat_fidelity(0), ValidationError);
}

TEST(CatFidelity, ApproachesAsymptote) {
  EXPECT_NEAR(cat_fidelity(200), cat_fidelity_asymptote(200), 2e-5);
  EXPECT_NEAR(cat_fidelity(16), cat_fidelity_asymptote(16), 2e-4);
  // H_3(iy) = -i (8 y^3 + 12 y)
  EXPECT_NEAR(log_abs_hermite_imag(3, 0.5), std::log(7.0), 1e-14);
}

TEST(Binomial, ExactAndGaussianEnvelope) {
  const auto mid = binomial_gaussian(20, 10);
  EXPECT_EQ(static_cast<std::uint64_t>(mid.exact), oracle::binomial(20, 10));
  EXPECT_EQ(oracle::binomial(20, 10), 184756u);
  EXPECT_NEAR((mid.approx - mid.exact) / mid.exact, 0.01257, 5e-5);
  for (int total : {4, 9, 30, 40}) {
    for (int l = 0; l <= total; ++l) EXPECT_EQ(binomial_gaussian(total, l).exact, static_cast<double>(oracle::binomial(total, l)));
  }
  EXPECT_THROW(binomial_gaussian(5, 6), ValidationError);
}

}  // namespace
