#pragma once

// Hermite-function machinery shared by the Fock-space layer: evaluation of the
// number-state wavefunctions on grids and closed-form number-basis amplitudes
// of Gaussian wavepackets.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gkp/errors.hpp"

namespace gkp {

using cplx = std::complex<double>;

/// Values phi_0(x) .. phi_{count-1}(x) of the normalized Hermite functions
/// (position wavefunctions of the number states, vacuum variance 1/2).
inline std::vector<double> hermite_functions(int count, double x) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)), 0.0);
  if (count <= 0) return out;
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (int m = 1; m + 1 < count; ++m) {
    out[m + 1] = std::sqrt(2.0 / (m + 1)) * x * out[m] - std::sqrt(static_cast<double>(m) / (m + 1)) * out[m - 1];
  }
  return out;
}

/// Uniform quadrature grid with trapezoid weights. For the smooth, rapidly
/// decaying integrands used here the trapezoid rule is spectrally accurate.
struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;

  double step() const { return (hi - lo) / (points - 1); }
  double at(int i) const { return lo + i * step(); }
};

/// Grid that resolves every Hermite function below `dim` with margin.
inline UniformGrid hermite_grid(int dim, double step = 0.04) {
  const double half = std::sqrt(2.0 * dim + 1.0) + 9.0;
  const int points = static_cast<int>(std::ceil(2.0 * half / step)) + 1;
  return UniformGrid{-half, half, points};
}

/// Table phi_m(x_j) with rows m < dim and columns over the grid points.
inline Eigen::MatrixXd hermite_table(int dim, const UniformGrid& grid) {
  Eigen::MatrixXd table(dim, grid.points);
  for (int j = 0; j < grid.points; ++j) {
    const auto column = hermite_functions(dim, grid.at(j));
    for (int m = 0; m < dim; ++m) table(m, j) = column[m];
  }
  return table;
}

/// Number-basis amplitudes <m|psi> for m < dim of the (generally
/// unnormalized) Gaussian wavefunction psi(x) = exp(-A x^2/2 + B x + C),
/// Re(A) > 0. Evaluated in closed form through the generating function of
/// the Hermite functions, so no truncation of the wavefunction takes place.
inline Eigen::VectorXcd gaussian_amplitudes(cplx A, cplx B, cplx C, int dim) {
  require(std::real(A) > 0.0, "gaussian_amplitudes: Re(A) must be positive");
  require(dim >= 1, "gaussian_amplitudes: dim must be positive");
  const cplx one_plus = 1.0 + A;
  const cplx quad = (1.0 - A) / (2.0 * one_plus);
  const cplx lin = std::sqrt(2.0) * B / one_plus;
  const cplx log_scale = C + B * B / (2.0 * one_plus);
  const cplx prefactor = std::pow(std::numbers::pi, -0.25) * std::sqrt(2.0 * std::numbers::pi / one_plus) * std::exp(log_scale);

  // e_n = sqrt(n!) [u^n] exp(quad u^2 + lin u)
  Eigen::VectorXcd e(dim);
  e(0) = 1.0;
  if (dim > 1) e(1) = lin;
  for (int n = 1; n + 1 < dim; ++n) {
    e(n + 1) = (lin * e(n) + 2.0 * quad * std::sqrt(static_cast<double>(n)) * e(n - 1)) / std::sqrt(n + 1.0);
  }
  return prefactor * e;
}

/// Amplitudes of D(d)|S_delta>: a squeezed vacuum (position variance
/// 1/(2 delta^2)) shifted in position by d.
inline Eigen::VectorXcd displaced_squeezed_amplitudes(double d, double delta, int dim) {
  const double a = delta * delta;
  const double c = -0.5 * a * d * d + 0.25 * std::log(a / std::numbers::pi);
  return gaussian_amplitudes(a, a * d, c, dim);
}

/// Amplitudes of exp(i q x)|S_s>: a squeezed vacuum kicked in momentum by q.
inline Eigen::VectorXcd kicked_squeezed_amplitudes(double q, double s, int dim) {
  const double a = s * s;
  return gaussian_amplitudes(a, cplx(0.0, q), 0.25 * std::log(a / std::numbers::pi), dim);
}

}  // namespace gkp
