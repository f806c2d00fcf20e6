#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "tauforge/loop.hpp"

namespace testutil {

using tauforge::CMatrix;
using tauforge::cplx;
using tauforge::LoopSamples;
using tauforge::MatrixLoop;

inline constexpr cplx I(0.0, 1.0);
inline constexpr double kPi = std::numbers::pi;

inline double max_sample_gap(const LoopSamples& a, const LoopSamples& b) {
  double m = 0.0;
  for (int j = 0; j < a.M(); ++j) m = std::max(m, (a[j] - b[j]).norm());
  return m;
}

inline CMatrix diag2(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// exp of a traceless 2x2 matrix from cosh/sinh of s, s^2 = -det A
inline CMatrix exp_traceless2(const CMatrix& A) {
  const cplx s = std::sqrt(-A.determinant());
  const cplx sh = std::abs(s) < 1e-8 ? 1.0 + s * s / 6.0 : std::sinh(s) / s;
  return std::cosh(s) * CMatrix::Identity(2, 2) + sh * A;
}

inline CMatrix traceless(CMatrix A) {
  A -= (A.trace() / static_cast<double>(A.rows())) * CMatrix::Identity(A.rows(), A.cols());
  return A;
}

// A lambda^k - A^H lambda^-k: antihermitian on the circle
inline MatrixLoop single_mode_tangent(const CMatrix& A, int k, int N, int M = tauforge::kDefaultSamples) {
  return MatrixLoop::monomial(A, k, N, M) - MatrixLoop::monomial(A.adjoint(), -k, N, M);
}

// d/dtheta of eval() by a 6th-order central difference
inline CMatrix fd_theta(const MatrixLoop& a, double th, double h = 1e-3) {
  return (-a.eval(th - 3 * h) + 9.0 * a.eval(th - 2 * h) - 45.0 * a.eval(th - h) + 45.0 * a.eval(th + h) -
          9.0 * a.eval(th + 2 * h) + a.eval(th + 3 * h)) /
         (60.0 * h);
}

}  // namespace testutil
