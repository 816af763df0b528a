#pragma once

// Reference constructions used only by the tests. Each follows a different
// route from the library code it checks.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "gkp/gkp.hpp"

namespace oracle {

using gkp::cplx;
using gkp::CMatrix;
using gkp::CVector;

/// Squeezer exp(i ln(delta)/2 (xp + px)) from Eigen's matrix exponential on
/// `dim` levels.
inline CMatrix squeezer(double delta, int dim) {
  const CMatrix x = gkp::position_matrix(dim);
  const CMatrix p = gkp::momentum_matrix(dim);
  const CMatrix gen = cplx(0.0, 0.5 * std::log(delta)) * (x * p + p * x);
  return gen.exp();
}

/// Kraus operator <n|_2 S_2(delta3) exp(i g p1 x2) |S_delta2>_2 from the
/// two-mode evolution. The QND gate is diagonal in the joint eigenbasis of the
/// truncated p1 (m1 levels) and x2 (m2 levels); the ancilla squeezers are
/// matrix exponentials on 2 m2 levels, cropped to m2.
inline CMatrix brute_force_qnd_kraus(int n, double delta2, double delta3, double g, int dim, int m1 = 240, int m2 = 200) {
  Eigen::SelfAdjointEigenSolver<CMatrix> p1(gkp::momentum_matrix(m1));
  Eigen::SelfAdjointEigenSolver<CMatrix> x2(gkp::position_matrix(m2));
  const CMatrix s2 = squeezer(delta2, 2 * m2);
  const CMatrix s3 = squeezer(delta3, 2 * m2);
  const CVector ancilla = s2.col(0).head(m2);
  const CVector out_row = s3.row(n).head(m2).transpose();
  const CVector a = x2.eigenvectors().adjoint() * ancilla;                 // <u_j|s>
  const CVector b = (out_row.transpose() * x2.eigenvectors()).transpose();  // <n|S3|u_j>

  CVector f(m1);
  for (int i = 0; i < m1; ++i) {
    cplx sum = 0.0;
    for (int j = 0; j < m2; ++j) sum += b(j) * a(j) * std::exp(cplx(0.0, g * p1.eigenvalues()(i) * x2.eigenvalues()(j)));
    f(i) = sum;
  }
  const CMatrix v = p1.eigenvectors().topRows(dim);
  return v * f.asDiagonal() * v.adjoint();
}

/// <m, N-m| B |j, N-j> for B = exp(theta (a1^dag a2 - a1 a2^dag)), by
/// expanding B a1^dag B^dag = c a1^dag - s a2^dag, B a2^dag B^dag = s a1^dag + c a2^dag
/// binomially.
inline double beamsplitter_element(double theta, int total, int m, int j) {
  const long double c = std::cos(static_cast<long double>(theta));
  const long double s = std::sin(static_cast<long double>(theta));
  const int k = total - j;
  long double sum = 0.0L;
  // (c a1 - s a2)^j (s a1 + c a2)^k, coefficient of a1^m a2^(total-m)
  for (int u = 0; u <= j; ++u) {
    const int v = m - u;  // a1 powers drawn from the second factor
    if (v < 0 || v > k) continue;
    const long double term = std::exp(std::lgamma(j + 1.0L) - std::lgamma(u + 1.0L) - std::lgamma(j - u + 1.0L) + std::lgamma(k + 1.0L) -
                                      std::lgamma(v + 1.0L) - std::lgamma(k - v + 1.0L));
    long double val = term;
    val *= std::pow(c, u) * std::pow(-s, j - u) * std::pow(s, v) * std::pow(c, k - v);
    sum += val;
  }
  const long double norm =
      std::exp(0.5L * (std::lgamma(m + 1.0L) + std::lgamma(total - m + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(k + 1.0L)));
  return static_cast<double>(sum * norm);
}

/// Squeezed-vacuum amplitudes from the textbook series
/// <2k|S> = (1/sqrt(cosh r)) (-tanh r)^k sqrt((2k)!)/(2^k k!), r = ln delta.
inline CVector squeezed_vacuum_series(double delta, int dim) {
  const double r = std::log(delta);
  CVector out = CVector::Zero(dim);
  for (int k = 0; 2 * k < dim; ++k) {
    const double mag = std::exp(0.5 * std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) - std::lgamma(k + 1.0));
    out(2 * k) = std::pow(-std::tanh(r), k) * mag / std::sqrt(std::cosh(r));
  }
  return out;
}

/// Coherent-state amplitudes e^{-|a|^2/2} a^m / sqrt(m!).
inline CVector coherent(cplx alpha, int dim) {
  CVector out(dim);
  out(0) = std::exp(-0.5 * std::norm(alpha));
  for (int m = 1; m < dim; ++m) out(m) = out(m - 1) * alpha / std::sqrt(static_cast<double>(m));
  return out;
}

/// Trapezoid integral of |f|^2-style integrands on [lo, hi].
inline cplx integrate(const std::function<cplx(double)>& f, double lo, double hi, int points) {
  const double h = (hi - lo) / (points - 1);
  cplx sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i + 1 < points; ++i) sum += f(lo + i * h);
  return sum * h;
}

/// Fidelity of two position wavefunctions by grid integration.
inline double grid_fidelity(const std::function<cplx(double)>& a, const std::function<cplx(double)>& b, double lo, double hi, int points) {
  const cplx ab = integrate([&](double x) { return std::conj(a(x)) * b(x); }, lo, hi, points);
  const double aa = integrate([&](double x) { return cplx(std::norm(a(x))); }, lo, hi, points).real();
  const double bb = integrate([&](double x) { return cplx(std::norm(b(x))); }, lo, hi, points).real();
  return std::norm(ab) / (aa * bb);
}

/// Exact binomial coefficient from Pascal's triangle.
inline std::uint64_t binomial(int n, int k) {
  std::vector<std::uint64_t> row(static_cast<std::size_t>(n) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j > 0; --j) row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j - 1)];
  }
  return row[static_cast<std::size_t>(k)];
}

struct TwoModeMoments {
  Eigen::Vector4d mean;
  Eigen::Matrix4d cov;
};

/// Means and symmetrized covariances of (x1, p1, x2, p2) from dense
/// Kronecker-product quadratures.
inline TwoModeMoments two_mode_moments(const gkp::TwoModeState& s) {
  const int d = s.dim1;
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix x = gkp::position_matrix(d);
  const CMatrix p = gkp::momentum_matrix(d);
  auto kron = [](const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  };
  const std::vector<CMatrix> ops = {kron(x, id), kron(p, id), kron(id, x), kron(id, p)};
  const CVector& v = s.amplitudes;
  const double nrm = v.squaredNorm();
  TwoModeMoments m;
  std::vector<CVector> applied;
  for (const auto& op : ops) applied.push_back(op * v);
  for (int i = 0; i < 4; ++i) m.mean(i) = v.dot(applied[static_cast<std::size_t>(i)]).real() / nrm;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double sym = applied[static_cast<std::size_t>(i)].dot(applied[static_cast<std::size_t>(j)]).real() / nrm;
      m.cov(i, j) = sym - m.mean(i) * m.mean(j);
    }
  }
  return m;
}

}  // namespace oracle
