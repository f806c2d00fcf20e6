#include "tauforge/twistor.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tauforge/errors.hpp"

namespace tauforge {

namespace {

constexpr cplx I(0.0, 1.0);

using Vec3 = Eigen::Vector3cd;

Vec3 v0(cplx l) { return Vec3(-l, 1.0, 0.0); }
Vec3 v1(cplx l) { return Vec3(0.0, -l, 1.0); }

cplx det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  Eigen::Matrix3cd m;
  m << a, b, c;
  return m.determinant();
}

// exact quadratic through values at 0, 1, -1
Polynomial quadratic_from(cplx p0, cplx p1, cplx pm1) {
  return Polynomial({p0, 0.5 * (p1 - pm1), 0.5 * (p1 + pm1) - p0});
}

}  // namespace

SymmetryGenerator SymmetryGenerator::translation(cplx dv, cplx dx, cplx dt) {
  SymmetryGenerator g;
  g.c = dv;
  g.b = dx;
  g.a = dt;
  return g;
}

bool SymmetryGenerator::is_translation() const {
  return alpha == cplx(0.0) && beta == cplx(0.0) && gamma == cplx(0.0) && delta == cplx(0.0);
}

std::array<cplx, 3> SymmetryGenerator::at(const SpacetimePoint& p) const {
  return {c + beta * p.v - gamma * p.x + delta * p.v,
          b + 2.0 * alpha * p.v - 2.0 * gamma * p.t + delta * p.x,
          a + alpha * p.x - beta * p.t + delta * p.t};
}

Rational SymmetryGenerator::v_coeff() const { return Rational(Polynomial({gamma, beta, alpha})); }

cplx incidence(const SpacetimePoint& p, cplx lambda) { return p.v + lambda * p.x + lambda * lambda * p.t; }

std::array<Polynomial, 2> lax_fields_on_incidence() {
  // d mu / d(v, x, t) = (1, l, l^2)
  const Polynomial dv({1.0}), dx({0.0, 1.0}), dt({0.0, 0.0, 1.0});
  const Polynomial l({0.0, 1.0});
  return {dx - l * dv, dt - l * dx};
}

double decomposition_residual(const DirectionDecomposition& d, const SymmetryGenerator& Y,
                              const SymmetryGenerator& X, const SpacetimePoint& p,
                              const std::vector<cplx>& lambdas) {
  const auto xa = X.at(p), ya = Y.at(p);
  const Vec3 xv(xa[0], xa[1], xa[2]), yv(ya[0], ya[1], ya[2]);
  double worst = 0.0;
  for (const cplx& l : lambdas) {
    const Vec3 rec = d.f0(l) * v0(l) + d.f1(l) * v1(l) + d.h(l) * xv;
    worst = std::max(worst, (rec - yv).norm() / std::max(1.0, yv.norm()));
  }
  return worst;
}

DirectionDecomposition decompose(const SymmetryGenerator& Y, const SymmetryGenerator& X,
                                 const SpacetimePoint& p) {
  if (!Y.is_translation()) throw std::invalid_argument("decompose: Y must be a translation");
  const auto xa = X.at(p), ya = Y.at(p);
  const Vec3 xv(xa[0], xa[1], xa[2]), yv(ya[0], ya[1], ya[2]);
  const cplx nodes[3] = {0.0, 1.0, -1.0};
  cplx D[3], F0[3], F1[3], H[3];
  for (int i = 0; i < 3; ++i) {
    const cplx l = nodes[i];
    D[i] = det3(v0(l), v1(l), xv);
    F0[i] = det3(yv, v1(l), xv);
    F1[i] = det3(v0(l), yv, xv);
    H[i] = det3(v0(l), v1(l), yv);
  }
  const Polynomial den = quadratic_from(D[0], D[1], D[2]);
  if (den.is_zero()) throw DegenerateFrameError("decompose: X is tangent to the null planes for every l");

  DirectionDecomposition d;
  d.f0 = Rational(quadratic_from(F0[0], F0[1], F0[2]), den);
  d.f1 = Rational(quadratic_from(F1[0], F1[1], F1[2]), den);
  d.h = Rational(quadratic_from(H[0], H[1], H[2]), den);
  d.v_coeff = X.v_coeff();

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::vector<cplx> probe;
  while (probe.size() < 8) {
    const cplx l(U(rng), U(rng));
    if (std::abs(den(l)) > 1e-6) probe.push_back(l);
  }
  const double res = decomposition_residual(d, Y, X, p, probe);
  if (!(res <= 1e-12))
    throw NumericalCheckError("decompose: identity residual " + std::to_string(res));
  return d;
}

DirectionDecomposition ernst_frame(double r, double /*z*/, ErnstDirection dir) {
  if (!(r > 0.0)) throw std::invalid_argument("ernst_frame: r must be positive");
  DirectionDecomposition d;
  d.h = Rational(Polynomial::constant(1.0));
  if (dir == ErnstDirection::wbar) {
    // (zeta^2 + i zeta) / (2 i r zeta + 2 r)
    d.v_coeff = Rational(Polynomial({0.0, I, 1.0}), Polynomial({2.0 * r, 2.0 * I * r}));
    d.pole = I;
  } else {
    // (i zeta^2 + zeta) / (2 r zeta + 2 i r)
    d.v_coeff = Rational(Polynomial({0.0, 1.0, I}), Polynomial({2.0 * I * r, 2.0 * r}));
    d.pole = -I;
  }
  return d;
}

}  // namespace tauforge
