#pragma once

#include <cstdint>
#include <random>

#include "tauforge/loop.hpp"

namespace tauforge {

// Random traceless loop with |modes| <= max_mode, antihermitian on the circle
// when `antihermitian`, rescaled so max_j ||u(theta_j)||_F = sup.
MatrixLoop random_algebra_loop(std::mt19937_64& rng, int n, int max_mode, double sup, int N,
                               int M = kDefaultSamples, bool antihermitian = true);

// exp of random_algebra_loop: smooth, unimodular, unitary on the circle.
MatrixLoop random_group_loop(std::mt19937_64& rng, int n, int max_mode, double sup, int N,
                             int M = kDefaultSamples);

// Arbitrary complex loop with geometrically decaying modes (|c_k| ~ decay^|k|).
MatrixLoop random_smooth_loop(std::mt19937_64& rng, int n, int N, int M = kDefaultSamples,
                              double decay = 0.5);

CMatrix random_matrix(std::mt19937_64& rng, int n);
// random matrix with determinant 1
CMatrix random_unimodular(std::mt19937_64& rng, int n);

}  // namespace tauforge
