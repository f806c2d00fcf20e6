#include "tauforge/random_loops.hpp"

#include <cmath>

namespace tauforge {

CMatrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix A(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) A(r, c) = cplx(g(rng), g(rng));
  return A;
}

CMatrix random_unimodular(std::mt19937_64& rng, int n) {
  CMatrix A = random_matrix(rng, n) + 2.0 * CMatrix::Identity(n, n);
  const cplx d = A.determinant();
  return A / std::pow(d, 1.0 / n);
}

MatrixLoop random_algebra_loop(std::mt19937_64& rng, int n, int max_mode, double sup, int N, int M,
                               bool antihermitian) {
  std::vector<CMatrix> modes(2 * N + 1, CMatrix::Zero(n, n));
  const CMatrix Id = CMatrix::Identity(n, n);
  for (int k = 0; k <= max_mode; ++k) {
    CMatrix A = random_matrix(rng, n) / std::pow(2.0, k);
    A -= (A.trace() / static_cast<double>(n)) * Id;
    if (!antihermitian) {
      modes[k + N] = A;
      if (k > 0) modes[-k + N] = random_matrix(rng, n) / std::pow(2.0, k);
      if (k > 0) modes[-k + N] -= (modes[-k + N].trace() / static_cast<double>(n)) * Id;
      continue;
    }
    if (k == 0) {
      modes[N] = 0.5 * (A - A.adjoint());
    } else {
      modes[k + N] = A;
      modes[-k + N] = -A.adjoint();
    }
  }
  MatrixLoop u = MatrixLoop::from_coeffs(N, M, modes);
  const double s = sup_norm(u);
  return s > 0.0 ? cplx(sup / s) * u : u;
}

MatrixLoop random_group_loop(std::mt19937_64& rng, int n, int max_mode, double sup, int N, int M) {
  return exp_pointwise(random_algebra_loop(rng, n, max_mode, sup, N, M)).with_tag(kUnimodular);
}

MatrixLoop random_smooth_loop(std::mt19937_64& rng, int n, int N, int M, double decay) {
  std::vector<CMatrix> modes(2 * N + 1);
  for (int k = -N; k <= N; ++k) modes[k + N] = random_matrix(rng, n) * std::pow(decay, std::abs(k));
  return MatrixLoop::from_coeffs(N, M, modes);
}

}  // namespace tauforge
