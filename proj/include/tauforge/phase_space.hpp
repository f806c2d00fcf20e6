#pragma once

#include "tauforge/birkhoff.hpp"
#include "tauforge/loop.hpp"

namespace tauforge {

struct LoopTangent {
  MatrixLoop u;
  bool antihermitian_on_circle = false;
  bool traceless = false;

  // Flags measured at the samples (tolerance 1e-10).
  static LoopTangent classify(const MatrixLoop& u);
  // Element of the real loop algebra; throws NumericalCheckError otherwise.
  static LoopTangent unitary(const MatrixLoop& u);
  // Complexified tangent: the antihermitian flag is dropped.
  static LoopTangent complexified(const MatrixLoop& u);
};

// Restrictions to |lambda| = 1 of the multiplier h, the symmetry matrix Phi
// and the d/d lambda coefficient of the twistor vector field.
struct TauVariationInput {
  MatrixLoop h;
  MatrixLoop phi;
  MatrixLoop v_coeff;
};

// 1/(2 pi) \oint tr(ubar dvbar), ubar = gamma^{-1} u gamma, antisymmetrized.
double reduced_symplectic(const MatrixLoop& gamma, const LoopTangent& u, const LoopTangent& v);

// -1/(2 pi) \oint tr(d gamma gamma^{-1} u)
double hamiltonian_gauge(const MatrixLoop& gamma, const LoopTangent& u);

// 1/(4 pi) \oint xi tr((gamma' gamma^{-1})^2) d theta, ' = d/d theta
double hamiltonian_diffeo(const MatrixLoop& gamma, const MatrixLoop& xi);

// 1/(2 pi) \oint tr(u dv), antisymmetrized
cplx cocycle(const LoopTangent& u, const LoopTangent& v);

// e^{eps u} gamma
MatrixLoop left_flow(const MatrixLoop& gamma, const MatrixLoop& u, double eps);

// Central difference of H_v along gamma -> e^{eps u} gamma, plus H_[u,v](gamma),
// minus c(u, v). Vanishes up to O(eps^2).
cplx poisson_anomaly(const MatrixLoop& gamma, const LoopTangent& u, const LoopTangent& v,
                     double eps);

struct AnomalyRichardson {
  cplx coarse;        // anomaly at eps
  cplx fine;          // anomaly at eps / 2
  cplx extrapolated;  // (4 fine - coarse) / 3
  double ratio;       // |coarse| / |fine|, 4 for clean quadratic convergence
  bool passed;
};
AnomalyRichardson poisson_anomaly_richardson(const MatrixLoop& gamma, const LoopTangent& u,
                                             const LoopTangent& v, double eps,
                                             double floor = 1e-9, double tol = 1e-6);

// -1/(2 pi i) \oint tr(dg g^{-1} u), g = g_minus
cplx vacuum_logderiv_gauge(const BirkhoffFactors& f, const MatrixLoop& u);
cplx vacuum_logderiv_gauge(const MatrixLoop& gamma, const MatrixLoop& u,
                           const FactorizeOptions& opts = {});

struct DiffeoTerms {
  cplx minus_term;  // -1/(4 pi i) \oint xi10 tr((g' g^{-1})^2) d lambda
  cplx plus_term;   // same with g_plus
  cplx value;       // minus_term - plus_term
};
DiffeoTerms vacuum_logderiv_diffeo_terms(const BirkhoffFactors& f, const MatrixLoop& xi10);
cplx vacuum_logderiv_diffeo(const BirkhoffFactors& f, const MatrixLoop& xi10);
cplx vacuum_logderiv_diffeo(const MatrixLoop& gamma, const MatrixLoop& xi10,
                            const FactorizeOptions& opts = {});

// gauge part with u = h Phi plus diffeo part with xi10 = h V
cplx tau_variation(const BirkhoffFactors& f, const TauVariationInput& in);
cplx tau_variation(const MatrixLoop& gamma, const TauVariationInput& in,
                   const FactorizeOptions& opts = {});

// d_u F_v - d_v F_u + F_[u,v] for F_w = vacuum_logderiv_gauge(., w), flows
// gamma -> e^{eps w} gamma, central differences.
cplx tau_form_curvature(const MatrixLoop& gamma, const MatrixLoop& u, const MatrixLoop& v,
                        double eps, const FactorizeOptions& opts = {});

}  // namespace tauforge
