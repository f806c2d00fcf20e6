#pragma once

#include <array>
#include <optional>

#include "tauforge/rational.hpp"

namespace tauforge {

struct SpacetimePoint {
  cplx v = 0.0, x = 0.0, t = 0.0;
};

// X = a d_t + b d_x + c d_v + alpha(2v d_x + x d_t) + beta(v d_v - t d_t)
//     - gamma(x d_v + 2t d_x) + delta(v d_v + x d_x + t d_t),
// lifted to the correspondence space by V = (alpha l^2 + beta l + gamma) d_l.
struct SymmetryGenerator {
  cplx a = 0.0, b = 0.0, c = 0.0;
  cplx alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;

  static SymmetryGenerator translation(cplx dv, cplx dx, cplx dt);
  bool is_translation() const;
  // components (v, x, t) of X at p
  std::array<cplx, 3> at(const SpacetimePoint& p) const;
  Rational v_coeff() const;
};

// Y = f0 V0 + f1 V1 + h X with V0 = d_x - l d_v, V1 = d_t - l d_x.
struct DirectionDecomposition {
  Rational f0, f1, h;
  Rational v_coeff;  // d/d lambda coefficient of the lift of X (h multiplies it)
  std::optional<cplx> pole;  // simple pole of v_coeff, when there is exactly one
};

// mu = v + l x + l^2 t
cplx incidence(const SpacetimePoint& p, cplx lambda);

// V0 and V1 applied to mu, as polynomials in l (identically zero).
std::array<Polynomial, 2> lax_fields_on_incidence();

// Cramer solve of the 3x3 system in the (d_v, d_x, d_t) basis; numerators
// and denominator recovered exactly from l in {0, 1, -1} (all have degree <= 2),
// then checked at 8 random l to 1e-12.
DirectionDecomposition decompose(const SymmetryGenerator& Y, const SymmetryGenerator& X,
                                 const SpacetimePoint& p = {});

// max over the given l of |f0 V0 + f1 V1 + h X - Y|
double decomposition_residual(const DirectionDecomposition& d, const SymmetryGenerator& Y,
                              const SymmetryGenerator& X, const SpacetimePoint& p,
                              const std::vector<cplx>& lambdas);

enum class ErnstDirection { w, wbar };

// d/d zeta coefficient of the lifted d_w or d_wbar at radius r:
//   wbar: (zeta + i) zeta / (2 i r (zeta - i)),  pole at  i
//   w:    i (zeta - i) zeta / (2 r (zeta + i)),   pole at -i
DirectionDecomposition ernst_frame(double r, double z, ErnstDirection dir);

}  // namespace tauforge
