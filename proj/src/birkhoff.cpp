#include "tauforge/birkhoff.hpp"

#include <cmath>
#include <string>

#include "tauforge/errors.hpp"

namespace tauforge {

CMatrix birkhoff_toeplitz(const MatrixLoop& gamma) {
  const int n = gamma.n(), N = gamma.N();
  const int dim = n * (N + 1);
  CMatrix T = CMatrix::Zero(dim, dim);
  for (int j = 0; j <= N; ++j)
    for (int k = 0; k <= N; ++k) {
      const cplx* g = gamma.mode_data(j - k);
      if (g) T.block(j * n, k * n, n, n) = Eigen::Map<const CMatrix>(g, n, n);
    }
  return T;
}

BirkhoffFactors factorize(const MatrixLoop& gamma, const FactorizeOptions& opts) {
  const int n = gamma.n(), N = gamma.N(), M = gamma.M();
  if (!gamma.has_tag(kUnimodular) && !gamma.satisfies(kUnimodular))
    throw NumericalCheckError("factorize: loop is not unimodular");
  const double tail = gamma.tail_mass();
  if (tail > opts.tail_threshold)
    throw TailMassError("factorize: tail mass " + std::to_string(tail) + " above threshold", tail);

  // rows j = -N..N of the convolution with gamma; rows 0..N form the system,
  // rows -N..-1 then give the strictly negative modes of g_minus directly
  const int dim = n * (N + 1);
  CMatrix full = CMatrix::Zero(n * (2 * N + 1), dim);
  for (int j = -N; j <= N; ++j)
    for (int k = 0; k <= N; ++k) {
      const cplx* g = gamma.mode_data(j - k);
      if (g) full.block((j + N) * n, k * n, n, n) = Eigen::Map<const CMatrix>(g, n, n);
    }
  Eigen::PartialPivLU<CMatrix> lu(full.bottomRows(dim));
  const double rc = lu.rcond();
  const double cond = rc > 0.0 ? 1.0 / rc : INFINITY;
  if (!(cond <= opts.max_condition))
    throw BigCellError("Toeplitz system singular (condition " + std::to_string(cond) +
                           "): loop outside the big cell",
                       cond, NAN);
  CMatrix rhs = CMatrix::Zero(dim, n);
  rhs.topRows(n).setIdentity();
  const CMatrix X = lu.solve(rhs);
  const CMatrix neg = full.topRows(n * N) * X;

  std::vector<CMatrix> plus(2 * N + 1, CMatrix::Zero(n, n));
  std::vector<CMatrix> minus(2 * N + 1, CMatrix::Zero(n, n));
  for (int k = 0; k <= N; ++k) plus[k + N] = X.middleRows(k * n, n);
  for (int j = -N; j < 0; ++j) minus[j + N] = neg.middleRows((j + N) * n, n);
  minus[N] = CMatrix::Identity(n, n);

  BirkhoffFactors f;
  f.g_minus = MatrixLoop::from_coeffs(N, M, minus);
  f.g_plus = MatrixLoop::from_coeffs(N, M, plus);
  f.condition = cond;

  const LoopSamples sg = gamma.samples(), sm = f.g_minus.samples(), sp = f.g_plus.samples();
  double res = 0.0;
  for (int j = 0; j < M; ++j) {
    const CMatrix rec = CMatrix(sm[j]) * CMatrix(sp[j]).inverse();
    res = std::max(res, (CMatrix(sg[j]) - rec).norm());
  }
  f.residual = res;
  if (!(res <= opts.tol))
    throw BigCellError("factorization residual " + std::to_string(res) + " exceeds tolerance",
                       cond, res);
  return f;
}

std::vector<CMatrix> negative_part_expansion(const BirkhoffFactors& f, int order) {
  std::vector<CMatrix> out;
  out.reserve(order + 1);
  for (int i = 0; i <= order; ++i) out.push_back(f.g_minus.coeff(-i));
  return out;
}

BirkhoffFactors right_twist(const BirkhoffFactors& f, const CMatrix& C) {
  BirkhoffFactors out = f;
  out.g_minus = multiply(f.g_minus, MatrixLoop::constant(C, f.g_minus.N(), f.g_minus.M()));
  out.g_plus = multiply(f.g_plus, MatrixLoop::constant(C, f.g_plus.N(), f.g_plus.M()));
  return out;
}

}  // namespace tauforge
