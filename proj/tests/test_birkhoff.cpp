#include <doctest.h>

#include <Eigen/SVD>

#include "helpers.hpp"
#include "tauforge/birkhoff.hpp"
#include "tauforge/errors.hpp"
#include "tauforge/random_loops.hpp"

using namespace tauforge;
using namespace testutil;

namespace {

MatrixLoop diag_lambda(int N, int M = kDefaultSamples) {
  std::vector<CMatrix> modes(2 * N + 1, CMatrix::Zero(2, 2));
  modes[N + 1](0, 0) = 1.0;
  modes[N - 1](1, 1) = 1.0;
  return MatrixLoop::from_coeffs(N, M, modes).with_tag(kUnimodular);
}

}  // namespace

TEST_SUITE("birkhoff") {

TEST_CASE("identity factorizes trivially") {
  const BirkhoffFactors f = factorize(MatrixLoop::identity(2, 16).with_tag(kUnimodular));
  CHECK(coefficient_distance(f.g_minus, MatrixLoop::identity(2, 16)) < 1e-15);
  CHECK(coefficient_distance(f.g_plus, MatrixLoop::identity(2, 16)) < 1e-15);
  const std::vector<CMatrix> P = negative_part_expansion(f, 3);
  CHECK((P[0] - CMatrix::Identity(2, 2)).norm() == 0.0);
  for (int i = 1; i <= 3; ++i) CHECK(P[i].norm() < 1e-15);
}

TEST_CASE("diag(lambda, 1/lambda) lies outside the big cell") {
  const MatrixLoop g = diag_lambda(16);
  // rank oracle: the assembled Toeplitz matrix is singular
  const CMatrix T = birkhoff_toeplitz(g);
  Eigen::JacobiSVD<CMatrix> svd(T);
  const auto& sv = svd.singularValues();
  CHECK(sv(sv.size() - 1) / sv(0) < 1e-14);
  CHECK_THROWS_AS(factorize(g), BigCellError);
}

TEST_CASE("known factors are recovered") {
  // g_minus = I + B / lambda, g_plus = I + C lambda with B, C nilpotent
  const CMatrix B = mat2(0.3, 0.09, -1.0, -0.3), C = mat2(0.0, 0.0, cplx(0.4, 0.2), 0.0);
  const int N = 16;
  const MatrixLoop gm = MatrixLoop::identity(2, N) + MatrixLoop::monomial(B, -1, N);
  const MatrixLoop gp = MatrixLoop::identity(2, N) + MatrixLoop::monomial(C, 1, N);
  // (I + C lambda)^-1 = I - C lambda exactly
  const MatrixLoop gamma = multiply(gm, MatrixLoop::identity(2, N) - MatrixLoop::monomial(C, 1, N));
  const BirkhoffFactors f = factorize(gamma.with_tag(kUnimodular));
  CHECK(coefficient_distance(f.g_minus, gm) < 1e-13);
  CHECK(coefficient_distance(f.g_plus, gp) < 1e-13);
}

TEST_CASE("random unimodular loops round trip") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const MatrixLoop g = random_group_loop(rng, 2, 3, 0.5, 32);
    const BirkhoffFactors f = factorize(g);
    CHECK(f.residual <= 1e-9);
    CHECK(sup_norm_diff(g, multiply(f.g_minus, inverse(f.g_plus))) <= 1e-9);
    CHECK((f.g_minus.coeff(0) - CMatrix::Identity(2, 2)).norm() == 0.0);
    for (int k = 1; k <= 32; ++k) {
      CHECK(f.g_minus.coeff(k).norm() == 0.0);
      CHECK(f.g_plus.coeff(-k).norm() == 0.0);
    }
  }
}

TEST_CASE("uniqueness, determinant and right twist") {
  std::mt19937_64 rng(22);
  const MatrixLoop g = random_group_loop(rng, 2, 3, 0.5, 32);
  const BirkhoffFactors f = factorize(g);
  const BirkhoffFactors f2 = factorize(multiply(f.g_minus, inverse(f.g_plus)).with_tag(kUnimodular));
  CHECK(coefficient_distance(f.g_minus, f2.g_minus) <= 1e-8);
  CHECK(coefficient_distance(f.g_plus, f2.g_plus) <= 1e-8);

  const LoopSamples a = f.g_minus.samples(), b = f.g_plus.samples();
  for (int j = 0; j < a.M(); ++j) CHECK(std::abs(a[j].determinant() / b[j].determinant() - 1.0) <= 1e-9);

  const BirkhoffFactors t = right_twist(f, random_unimodular(rng, 2));
  CHECK(sup_norm_diff(multiply(t.g_minus, inverse(t.g_plus)), g) <= 1e-9);
}

TEST_CASE("smooth dependence on a parameter") {
  std::mt19937_64 rng(23);
  const MatrixLoop u = random_algebra_loop(rng, 2, 3, 0.5, 32);
  auto gm = [&](double e) { return factorize(exp_pointwise(cplx(e) * u).with_tag(kUnimodular)).g_minus; };
  auto central = [&](double h) { return cplx(1.0 / (2.0 * h)) * (gm(1.0 + h) - gm(1.0 - h)); };
  const MatrixLoop d1 = central(1e-3), d2 = central(5e-4);
  CHECK(coefficient_distance(d1, d2) <= 1e-6);
  // Richardson-extrapolated value sits closer to the fine estimate than the coarse one
  const MatrixLoop rich = cplx(4.0 / 3.0) * d2 - cplx(1.0 / 3.0) * d1;
  CHECK(coefficient_distance(rich, d2) <= coefficient_distance(rich, d1));
}

TEST_CASE("input guards") {
  CHECK_THROWS_AS(factorize(MatrixLoop::constant(2.0 * CMatrix::Identity(2, 2), 8)), NumericalCheckError);
  // modes beyond N/2 carry most of the mass
  std::vector<CMatrix> modes(9, CMatrix::Zero(2, 2));
  modes[4] = CMatrix::Identity(2, 2);
  modes[8](0, 1) = 5.0;
  CHECK_THROWS_AS(factorize(MatrixLoop::from_coeffs(4, 64, modes).with_tag(kUnimodular)), TailMassError);
}

}  // TEST_SUITE
