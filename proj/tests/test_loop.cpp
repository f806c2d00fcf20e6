#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "tauforge/errors.hpp"
#include "tauforge/loop_io.hpp"
#include "tauforge/random_loops.hpp"

using namespace tauforge;
using namespace testutil;

TEST_SUITE("loop_algebra") {

TEST_CASE("eval of identity and single-mode loops") {
  const MatrixLoop id = MatrixLoop::identity(2, 8, 64);
  for (double th : {0.0, 0.7, 3.1}) CHECK((id.eval(th) - CMatrix::Identity(2, 2)).norm() == 0.0);
  const CMatrix A = mat2(1.0, 2.0, cplx(0, 3), -1.0);
  CHECK((MatrixLoop::monomial(A, 1, 8, 64).eval(0.0) - A).norm() == 0.0);
  CHECK((MatrixLoop::monomial(A, 1, 8, 64).eval(0.5) - std::polar(1.0, 0.5) * A).norm() < 1e-15);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(MatrixLoop(2, 10, 20), std::invalid_argument);
  CHECK_NOTHROW(MatrixLoop(2, 10, 21));
  CHECK_THROWS_AS(MatrixLoop::monomial(CMatrix::Identity(2, 2), 5, 4, 16), std::invalid_argument);
}

TEST_CASE("FFT coefficients match a direct DFT") {
  std::mt19937_64 rng(1);
  const MatrixLoop a = random_smooth_loop(rng, 2, 12, 64);
  const LoopSamples s = a.samples();
  for (int k = -12; k <= 12; ++k)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK(std::abs(s.coefficient(k, r, c) - a.coeff(k)(r, c)) < 1e-14);
  // eval by direct summation agrees with the inverse transform
  for (int j : {0, 5, 33}) CHECK((a.eval(LoopSamples::theta(j, 64)) - s[j]).norm() < 1e-13);
}

TEST_CASE("samples to coefficients round trip") {
  std::mt19937_64 rng(2);
  const MatrixLoop a = random_smooth_loop(rng, 2, 32);
  const LoopSamples s = a.samples();
  double sup = 0.0;
  for (int j = 0; j < s.M(); ++j) sup = std::max(sup, s[j].norm());
  CHECK(max_sample_gap(MatrixLoop::from_samples(s, 32).samples(), s) / sup <= 1e-12);
}

TEST_CASE("tail mass guard") {
  // 1 / (1 - 0.9 / lambda) has modes 0.9^k, far too slow for N = 8
  auto f = [](cplx l) {
    CMatrix m(1, 1);
    m(0, 0) = 1.0 / (1.0 - 0.9 / l);
    return m;
  };
  CHECK_THROWS_AS(MatrixLoop::sample_function(1, 8, 256, f), TailMassError);
  const MatrixLoop ok = MatrixLoop::sample_function(1, 100, 256, f, -1.0);
  CHECK(ok.tail_mass() > 1e-8);
  const MatrixLoop fast = MatrixLoop::sample_function(
      1, 32, 256, [](cplx l) { CMatrix m(1, 1); m(0, 0) = 1.0 / (1.0 - 0.2 / l); return m; });
  CHECK(fast.tail_mass() < 1e-8);
}

TEST_CASE("multiply") {
  const MatrixLoop a = MatrixLoop::monomial(CMatrix::Identity(2, 2), 1, 4, 64);
  const MatrixLoop b = MatrixLoop::monomial(CMatrix::Identity(2, 2), -1, 4, 64);
  CHECK(coefficient_distance(multiply(a, b), MatrixLoop::identity(2, 4, 64)) < 1e-15);

  std::mt19937_64 rng(3);
  const MatrixLoop x = random_smooth_loop(rng, 2, 16), y = random_smooth_loop(rng, 2, 16);
  CHECK(coefficient_distance(multiply(x, MatrixLoop::identity(2, 16)), x) < 1e-14);
  const MatrixLoop p = multiply(x, y, kDefaultTailThreshold, 32);
  CHECK(p.N() == 32);
  const LoopSamples sx = x.samples(), sy = y.samples(), sp = p.samples();
  double gap = 0.0, scale = 0.0;
  for (int j = 0; j < sp.M(); ++j) {
    gap = std::max(gap, (sp[j] - sx[j] * sy[j]).norm());
    scale = std::max(scale, sx[j].norm() * sy[j].norm());
  }
  CHECK(gap / scale <= 1e-12);
  // default truncation drops modes 17..32 of a slowly decaying product
  CHECK_THROWS_AS(multiply(x, y), TailMassError);
  // too few samples to dealias
  CHECK_THROWS(multiply(random_smooth_loop(rng, 2, 40, 128), random_smooth_loop(rng, 2, 40, 128)));
}

TEST_CASE("multiply is associative") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const MatrixLoop a = random_smooth_loop(rng, 2, 10), b = random_smooth_loop(rng, 2, 10),
                     c = random_smooth_loop(rng, 2, 10);
    const double t = kDefaultTailThreshold;
    const MatrixLoop l = multiply(multiply(a, b, t, 20), c, t, 30);
    const MatrixLoop r = multiply(a, multiply(b, c, t, 20), t, 30);
    CHECK(sup_norm_diff(l, r) <= 1e-11 * sup_norm(a) * sup_norm(b) * sup_norm(c));
  }
}

TEST_CASE("scalar loops broadcast") {
  const MatrixLoop s = MatrixLoop::scalar_monomial(2.0, 1, 4, 64);
  const MatrixLoop a = MatrixLoop::constant(mat2(1, 2, 3, 4), 4, 64);
  const MatrixLoop p = multiply(s, a);
  CHECK((p.coeff(1) - 2.0 * mat2(1, 2, 3, 4)).norm() < 1e-14);
  CHECK(p.coeff(0).norm() < 1e-14);
}

TEST_CASE("inverse") {
  CHECK(coefficient_distance(inverse(MatrixLoop::identity(2, 6, 64)), MatrixLoop::identity(2, 6, 64)) < 1e-15);
  // diag(e^{i theta}, e^{-i theta}) -> diag(e^{-i theta}, e^{i theta})
  std::vector<CMatrix> modes(13, CMatrix::Zero(2, 2));
  modes[7](0, 0) = 1.0;
  modes[5](1, 1) = 1.0;
  const MatrixLoop d = MatrixLoop::from_coeffs(6, 64, modes);
  const MatrixLoop di = inverse(d);
  CHECK(std::abs(di.coeff(-1)(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(di.coeff(1)(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(di.coeff(1)(0, 0)) < 1e-14);

  std::mt19937_64 rng(5);
  const MatrixLoop r = random_smooth_loop(rng, 2, 32, kDefaultSamples, 0.3);
  const MatrixLoop a = MatrixLoop::identity(2, 32) + cplx(0.4 / sup_norm(r)) * r;
  CHECK(sup_norm_diff(multiply(a, inverse(a)), MatrixLoop::identity(2, 32)) <= 1e-10);

  // 1 + lambda vanishes at lambda = -1, a sample point
  std::vector<CMatrix> sm(9, CMatrix::Zero(2, 2));
  sm[4] = CMatrix::Identity(2, 2);
  sm[5](0, 0) = 1.0;
  CHECK_THROWS_AS(inverse(MatrixLoop::from_coeffs(4, 64, sm)), SingularLoopError);
}

TEST_CASE("projections") {
  const CMatrix A = mat2(1, 2, 3, 4);
  CHECK(sup_norm(project(MatrixLoop::monomial(CMatrix::Identity(2, 2), -1, 4, 64), ModePart::nonnegative)) == 0.0);
  const MatrixLoop a = MatrixLoop::identity(2, 4, 64) + MatrixLoop::monomial(A, 1, 4, 64);
  CHECK(coefficient_distance(project(a, ModePart::strictly_positive), MatrixLoop::monomial(A, 1, 4, 64)) == 0.0);

  std::mt19937_64 rng(6);
  const MatrixLoop r = random_smooth_loop(rng, 2, 12);
  for (ModePart p : {ModePart::strictly_positive, ModePart::nonnegative, ModePart::strictly_negative,
                     ModePart::nonpositive})
    CHECK(coefficient_distance(project(project(r, p), p), project(r, p)) == 0.0);
  CHECK(coefficient_distance(project(r, ModePart::strictly_positive) + project(r, ModePart::nonpositive), r) == 0.0);
  CHECK(coefficient_distance(project(r, ModePart::strictly_negative) + project(r, ModePart::nonnegative), r) == 0.0);
  const MatrixLoop pos = project(r, ModePart::strictly_positive), neg = project(r, ModePart::nonpositive);
  for (int k = -12; k <= 12; ++k) CHECK(pos.coeff(k).norm() * neg.coeff(k).norm() == 0.0);
}

TEST_CASE("contour integral convention") {
  const double two_pi = 2.0 * kPi;
  CHECK(std::abs(contour_integral_dlambda(MatrixLoop::scalar_monomial(1.0, -1, 4)) - cplx(0, two_pi)) < 1e-15);
  CHECK(std::abs(contour_integral_dlambda(MatrixLoop::scalar_monomial(1.0, 2, 4))) == 0.0);
  // trapezoid quadrature of f(lambda) i lambda d theta
  std::mt19937_64 rng(7);
  const MatrixLoop f = random_smooth_loop(rng, 1, 10, 64);
  cplx quad = 0.0;
  for (int j = 0; j < 64; ++j) {
    const cplx l = LoopSamples::lambda(j, 64);
    quad += f.eval_scalar(LoopSamples::theta(j, 64)) * I * l * (two_pi / 64);
  }
  CHECK(std::abs(contour_integral_dlambda(f) - quad) < 1e-13);
}

TEST_CASE("derivatives") {
  const CMatrix A = mat2(1, cplx(0, 1), 2, -1);
  const MatrixLoop a = MatrixLoop::monomial(A, 1, 4, 64);
  CHECK(coefficient_distance(derivative_theta(a), MatrixLoop::monomial(I * A, 1, 4, 64)) < 1e-15);
  CHECK(sup_norm(derivative_theta(MatrixLoop::constant(A, 4, 64))) == 0.0);
  CHECK(sup_norm(derivative_lambda(MatrixLoop::constant(A, 4, 64))) == 0.0);

  std::mt19937_64 rng(8);
  const MatrixLoop r = random_smooth_loop(rng, 2, 32);
  const LoopSamples dl = derivative_lambda(r).samples(), dt = derivative_theta(r).samples();
  double gap = 0.0, sup = 0.0;
  for (int j = 0; j < dl.M(); ++j) {
    gap = std::max(gap, (dl[j] - dt[j] / (I * LoopSamples::lambda(j, dl.M()))).norm());
    sup = std::max(sup, dl[j].norm());
  }
  CHECK(gap / sup <= 1e-12);
  // finite differences of eval() as an independent oracle
  for (double th : {0.3, 2.0}) CHECK((derivative_theta(r).eval(th) - fd_theta(r, th)).norm() < 1e-8);
  // exactness
  CHECK(contour_integral_dlambda_entries(derivative_lambda(r)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pointwise exponential") {
  CHECK(coefficient_distance(exp_pointwise(MatrixLoop(2, 4, 64)), MatrixLoop::identity(2, 4, 64)) == 0.0);
  const cplx c(0.3, -0.2);
  const MatrixLoop d = exp_pointwise(MatrixLoop::constant(diag2(c, -c), 4, 64));
  CHECK(std::abs(d.coeff(0)(0, 0) - std::exp(c)) < 1e-15);
  CHECK(std::abs(d.coeff(0)(1, 1) - std::exp(-c)) < 1e-15);
  // nilpotent per sample
  std::vector<CMatrix> modes(9, CMatrix::Zero(2, 2));
  for (int k = -4; k <= 4; ++k) modes[k + 4](1, 0) = cplx(0.5 / (1 + k * k), -0.1 * k);
  const MatrixLoop n = MatrixLoop::from_coeffs(4, 64, modes);
  CHECK(coefficient_distance(exp_pointwise(n), MatrixLoop::identity(2, 4, 64) + n) <= 1e-15);
  // random antihermitian data against the cosh/sinh closed form
  std::mt19937_64 rng(9);
  const MatrixLoop u = random_algebra_loop(rng, 2, 3, 0.5, 32);
  const LoopSamples su = u.samples(), se = exp_pointwise(u).samples();
  double gap = 0.0;
  for (int j = 0; j < su.M(); ++j) gap = std::max(gap, (se[j] - exp_traceless2(su[j])).norm());
  CHECK(gap <= 1e-10);
}

TEST_CASE("trace, adjoint and commutator") {
  std::mt19937_64 rng(10);
  // modes |k| <= 4 in an N = 8 container: the truncated product is exact
  const MatrixLoop a = random_smooth_loop(rng, 2, 4, 64).retruncated(8);
  const MatrixLoop b = random_smooth_loop(rng, 2, 4, 64).retruncated(8);
  for (double th : {0.1, 1.9}) {
    CHECK(std::abs(trace(a).eval_scalar(th) - a.eval(th).trace()) < 1e-13);
    CHECK((adjoint_on_circle(a).eval(th) - a.eval(th).adjoint()).norm() < 1e-13);
    const CMatrix x = a.eval(th), y = b.eval(th);
    CHECK((commutator(a, b, -1.0).eval(th) - (x * y - y * x)).norm() < 1e-12);
  }
}

TEST_CASE("unimodular tag") {
  std::mt19937_64 rng(11);
  const MatrixLoop g1 = random_group_loop(rng, 2, 3, 0.5, 32), g2 = random_group_loop(rng, 2, 3, 0.5, 32);
  CHECK(g1.has_tag(kUnimodular));
  const MatrixLoop p = multiply(g1, g2), q = inverse(g1);
  CHECK(p.has_tag(kUnimodular));
  CHECK(q.has_tag(kUnimodular));
  CHECK(p.satisfies(kUnimodular));
  CHECK(q.satisfies(kUnimodular));
  CHECK_THROWS_AS(MatrixLoop::constant(2.0 * CMatrix::Identity(2, 2), 4, 64).with_tag(kUnimodular), NumericalCheckError);
  CHECK(MatrixLoop::scalar_monomial(1.0, 0, 4, 64).with_tag(kRealOnCircle).has_tag(kRealOnCircle));
  CHECK_THROWS(MatrixLoop::scalar_monomial(1.0, 1, 4, 64).with_tag(kRealOnCircle));
}

TEST_CASE("serialization round trip is exact") {
  std::mt19937_64 rng(12);
  const MatrixLoop a = random_smooth_loop(rng, 2, 8, 64);
  CHECK(coefficient_distance(loop_from_json(loop_to_json(a)), a) == 0.0);
  const auto path = std::filesystem::temp_directory_path() / "tauforge_loop_roundtrip.json";
  write_loop_file(path.string(), a);
  const MatrixLoop b = read_loop_file(path.string());
  std::filesystem::remove(path);
  CHECK(coefficient_distance(a, b) == 0.0);
  CHECK(b.N() == 8);
  CHECK(b.M() == 64);
  CHECK_THROWS_AS(loop_from_json("{\"n\": 2}"), ConfigError);
  CHECK_THROWS_AS(loop_from_json("not json"), ConfigError);
}

}  // TEST_SUITE
