#pragma once

#include <vector>

#include "tauforge/loop.hpp"

namespace tauforge {

struct FactorizeOptions {
  double tol = 1e-9;             // reconstruction residual bound
  double max_condition = 1e12;   // Toeplitz condition bound
  double tail_threshold = kDefaultTailThreshold;
};

// gamma = g_minus * g_plus^{-1}, g_minus(inf) = I.
struct BirkhoffFactors {
  MatrixLoop g_minus;  // modes k <= 0, mode 0 exactly I
  MatrixLoop g_plus;   // modes k >= 0
  double residual = 0.0;
  double condition = 0.0;
};

// Solves the block-Toeplitz system sum_k gamma_{j-k} X_k = delta_{j0} I,
// j, k = 0..N, for the coefficients X_k of g_plus. Throws BigCellError when
// the system is too ill-conditioned or the reconstruction misses tol.
BirkhoffFactors factorize(const MatrixLoop& gamma, const FactorizeOptions& opts = {});

// The assembled block-Toeplitz matrix (exposed for rank diagnostics).
CMatrix birkhoff_toeplitz(const MatrixLoop& gamma);

// [P^0, ..., P^m] with g_minus = sum_i P^i lambda^{-i}.
std::vector<CMatrix> negative_part_expansion(const BirkhoffFactors& f, int order);

// (g_minus C, g_plus C): the same gamma, other normalization.
BirkhoffFactors right_twist(const BirkhoffFactors& f, const CMatrix& C);

}  // namespace tauforge
