#include "tauforge/phase_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tauforge/errors.hpp"

namespace tauforge {

namespace {

constexpr double kRealTol = 1e-10;

cplx mean(const std::vector<cplx>& f) {
  cplx s = 0.0;
  for (const cplx& v : f) s += v;
  return s / static_cast<double>(f.size());
}

cplx coeff_of(const std::vector<cplx>& f, int k) {
  LoopSamples s(1, static_cast<int>(f.size()));
  std::copy(f.begin(), f.end(), s.data());
  return s.coefficient(k);
}

double checked_real(cplx v, const char* what) {
  if (std::abs(v.imag()) > kRealTol)
    throw NumericalCheckError(std::string(what) + ": imaginary part " +
                              std::to_string(v.imag()) + " exceeds 1e-10");
  return v.real();
}

void require_same_grid(const MatrixLoop& a, const MatrixLoop& b) {
  if (a.M() != b.M()) throw std::invalid_argument("loops sampled on different grids");
}

// Share of coefficient mass in negative modes, from samples.
bool only_nonnegative_modes(const LoopSamples& s) {
  const MatrixLoop c = MatrixLoop::from_samples(s, (s.M() - 1) / 2, -1.0);
  double neg = 0.0, total = 0.0;
  for (int k = -c.N(); k <= c.N(); ++k) {
    const double m = c.coeff(k).norm();
    total += m;
    if (k < 0) neg += m;
  }
  return neg <= 1e-13 * std::max(total, 1e-300);
}

struct FactorSamples {
  LoopSamples g, dg_ginv;
};

// samples of g and of (dg/d lambda) g^{-1}
FactorSamples factor_samples(const MatrixLoop& g) {
  FactorSamples out{g.samples(), derivative_lambda(g).samples()};
  for (int j = 0; j < g.M(); ++j) out.dg_ginv[j] = CMatrix(out.dg_ginv[j]) * CMatrix(out.g[j]).inverse();
  return out;
}

cplx gauge_core(const FactorSamples& m, const LoopSamples& u) {
  std::vector<cplx> f(u.M());
  for (int j = 0; j < u.M(); ++j) f[j] = (m.dg_ginv[j] * u[j]).trace();
  return -coeff_of(f, -1);
}

DiffeoTerms diffeo_core(const FactorSamples& m, const FactorSamples& p, const LoopSamples& xi) {
  const int M = xi.M();
  std::vector<cplx> fm(M), fp(M);
  for (int j = 0; j < M; ++j) {
    const cplx x = xi[j](0, 0);
    fm[j] = x * (m.dg_ginv[j] * m.dg_ginv[j]).trace();
    fp[j] = x * (p.dg_ginv[j] * p.dg_ginv[j]).trace();
  }
  DiffeoTerms t;
  t.minus_term = -0.5 * coeff_of(fm, -1);
  t.plus_term = -0.5 * coeff_of(fp, -1);
  t.value = t.minus_term - t.plus_term;
  if (only_nonnegative_modes(xi) && std::abs(t.plus_term) > 1e-9)
    throw NumericalCheckError("g_plus term " + std::to_string(std::abs(t.plus_term)) +
                              " should vanish for a multiplier holomorphic inside the disc");
  return t;
}

}  // namespace

LoopTangent LoopTangent::classify(const MatrixLoop& u) {
  LoopTangent t{u, true, true};
  const LoopSamples s = u.samples();
  for (int j = 0; j < u.M(); ++j) {
    if ((s[j] + s[j].adjoint()).norm() > 1e-10) t.antihermitian_on_circle = false;
    if (std::abs(s[j].trace()) > 1e-10) t.traceless = false;
  }
  return t;
}

LoopTangent LoopTangent::unitary(const MatrixLoop& u) {
  LoopTangent t = classify(u);
  if (!t.antihermitian_on_circle || !t.traceless)
    throw NumericalCheckError("tangent is not in the traceless antihermitian loop algebra");
  return t;
}

LoopTangent LoopTangent::complexified(const MatrixLoop& u) {
  LoopTangent t = classify(u);
  t.antihermitian_on_circle = false;
  return t;
}

double reduced_symplectic(const MatrixLoop& gamma, const LoopTangent& u, const LoopTangent& v) {
  if (!u.antihermitian_on_circle || !v.antihermitian_on_circle)
    throw std::invalid_argument("reduced_symplectic: antihermitian tangents required");
  require_same_grid(gamma, u.u);
  require_same_grid(gamma, v.u);
  const int M = gamma.M();
  const LoopSamples G = gamma.samples(), Gt = derivative_theta(gamma).samples();
  const LoopSamples U = u.u.samples(), Ut = derivative_theta(u.u).samples();
  const LoopSamples V = v.u.samples(), Vt = derivative_theta(v.u).samples();
  std::vector<cplx> iuv(M), ivu(M);
  for (int j = 0; j < M; ++j) {
    const CMatrix g = G[j], gi = g.inverse();
    const CMatrix A = Gt[j] * gi;
    const CMatrix ub = gi * U[j] * g, vb = gi * V[j] * g;
    // d/dtheta (g^{-1} w g) = g^{-1} (w' + w A - A w) g
    const CMatrix dub = gi * (Ut[j] + U[j] * A - A * U[j]) * g;
    const CMatrix dvb = gi * (Vt[j] + V[j] * A - A * V[j]) * g;
    iuv[j] = (ub * dvb).trace();
    ivu[j] = (vb * dub).trace();
  }
  const cplx a = mean(iuv), b = mean(ivu);
  checked_real(0.5 * (a - b), "reduced_symplectic");
  return 0.5 * (a.real() - b.real());
}

double hamiltonian_gauge(const MatrixLoop& gamma, const LoopTangent& u) {
  if (!u.antihermitian_on_circle)
    throw std::invalid_argument("hamiltonian_gauge: antihermitian tangent required");
  require_same_grid(gamma, u.u);
  const LoopSamples G = gamma.samples(), Gt = derivative_theta(gamma).samples(), U = u.u.samples();
  std::vector<cplx> f(gamma.M());
  for (int j = 0; j < gamma.M(); ++j) f[j] = (Gt[j] * CMatrix(G[j]).inverse() * U[j]).trace();
  return checked_real(-mean(f), "hamiltonian_gauge");
}

double hamiltonian_diffeo(const MatrixLoop& gamma, const MatrixLoop& xi) {
  if (!xi.is_scalar()) throw std::invalid_argument("hamiltonian_diffeo: scalar vector field expected");
  if (!xi.has_tag(kRealOnCircle) && !xi.satisfies(kRealOnCircle))
    throw std::invalid_argument("hamiltonian_diffeo: vector field must be real on the circle");
  require_same_grid(gamma, xi);
  const LoopSamples G = gamma.samples(), Gt = derivative_theta(gamma).samples(), X = xi.samples();
  std::vector<cplx> f(gamma.M());
  for (int j = 0; j < gamma.M(); ++j) {
    const CMatrix A = Gt[j] * CMatrix(G[j]).inverse();
    f[j] = X[j](0, 0) * (A * A).trace();
  }
  return checked_real(0.5 * mean(f), "hamiltonian_diffeo");
}

cplx cocycle(const LoopTangent& u, const LoopTangent& v) {
  require_same_grid(u.u, v.u);
  const LoopSamples U = u.u.samples(), Ut = derivative_theta(u.u).samples();
  const LoopSamples V = v.u.samples(), Vt = derivative_theta(v.u).samples();
  std::vector<cplx> f(U.M());
  for (int j = 0; j < U.M(); ++j) f[j] = 0.5 * ((U[j] * Vt[j]).trace() - (V[j] * Ut[j]).trace());
  return mean(f);
}

MatrixLoop left_flow(const MatrixLoop& gamma, const MatrixLoop& u, double eps) {
  return multiply(exp_pointwise(cplx(eps) * u), gamma);
}

cplx poisson_anomaly(const MatrixLoop& gamma, const LoopTangent& u, const LoopTangent& v,
                     double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) throw std::invalid_argument("poisson_anomaly: eps outside [1e-6, 1e-3]");
  const double hp = hamiltonian_gauge(left_flow(gamma, u.u, eps), v);
  const double hm = hamiltonian_gauge(left_flow(gamma, u.u, -eps), v);
  const LoopTangent uv = LoopTangent::classify(commutator(u.u, v.u));
  return (hp - hm) / (2.0 * eps) + hamiltonian_gauge(gamma, uv) - cocycle(u, v);
}

AnomalyRichardson poisson_anomaly_richardson(const MatrixLoop& gamma, const LoopTangent& u,
                                             const LoopTangent& v, double eps, double floor,
                                             double tol) {
  AnomalyRichardson r;
  r.coarse = poisson_anomaly(gamma, u, v, eps);
  r.fine = poisson_anomaly(gamma, u, v, std::max(eps / 2.0, 1e-6));
  r.extrapolated = (4.0 * r.fine - r.coarse) / 3.0;
  r.ratio = std::abs(r.fine) > 0.0 ? std::abs(r.coarse) / std::abs(r.fine) : INFINITY;
  const bool below_floor = std::max(std::abs(r.coarse), std::abs(r.fine)) <= floor;
  const bool quadratic = r.ratio >= 3.5 && r.ratio <= 4.5;
  r.passed = (below_floor || quadratic) && std::abs(r.extrapolated) <= tol;
  return r;
}

cplx vacuum_logderiv_gauge(const BirkhoffFactors& f, const MatrixLoop& u) {
  require_same_grid(f.g_minus, u);
  return gauge_core(factor_samples(f.g_minus), u.samples());
}

cplx vacuum_logderiv_gauge(const MatrixLoop& gamma, const MatrixLoop& u, const FactorizeOptions& opts) {
  return vacuum_logderiv_gauge(factorize(gamma, opts), u);
}

DiffeoTerms vacuum_logderiv_diffeo_terms(const BirkhoffFactors& f, const MatrixLoop& xi10) {
  if (!xi10.is_scalar()) throw std::invalid_argument("vacuum_logderiv_diffeo: scalar loop expected");
  require_same_grid(f.g_minus, xi10);
  return diffeo_core(factor_samples(f.g_minus), factor_samples(f.g_plus), xi10.samples());
}

cplx vacuum_logderiv_diffeo(const BirkhoffFactors& f, const MatrixLoop& xi10) {
  return vacuum_logderiv_diffeo_terms(f, xi10).value;
}

cplx vacuum_logderiv_diffeo(const MatrixLoop& gamma, const MatrixLoop& xi10,
                            const FactorizeOptions& opts) {
  return vacuum_logderiv_diffeo(factorize(gamma, opts), xi10);
}

cplx tau_variation(const BirkhoffFactors& f, const TauVariationInput& in) {
  if (!in.h.is_scalar() || !in.v_coeff.is_scalar())
    throw std::invalid_argument("tau_variation: h and V must be scalar loops");
  require_same_grid(f.g_minus, in.h);
  require_same_grid(f.g_minus, in.phi);
  require_same_grid(f.g_minus, in.v_coeff);
  const int M = f.g_minus.M();
  const LoopSamples H = in.h.samples(), P = in.phi.samples(), V = in.v_coeff.samples();
  LoopSamples u(P.n(), M), xi(1, M);
  bool any_v = false;
  for (int j = 0; j < M; ++j) {
    const cplx h = H[j](0, 0);
    u[j] = h * P[j];
    xi[j](0, 0) = h * V[j](0, 0);
    if (!std::isfinite(std::abs(h)) || !std::isfinite(u[j].norm()) ||
        !std::isfinite(std::abs(xi[j](0, 0))))
      throw std::invalid_argument("tau_variation: h Phi or h V not finite on the circle");
    any_v = any_v || xi[j](0, 0) != cplx(0.0);
  }
  const FactorSamples m = factor_samples(f.g_minus);
  cplx value = gauge_core(m, u);
  if (any_v) value += diffeo_core(m, factor_samples(f.g_plus), xi).value;
  return value;
}

cplx tau_variation(const MatrixLoop& gamma, const TauVariationInput& in, const FactorizeOptions& opts) {
  return tau_variation(factorize(gamma, opts), in);
}

cplx tau_form_curvature(const MatrixLoop& gamma, const MatrixLoop& u, const MatrixLoop& v,
                        double eps, const FactorizeOptions& opts) {
  auto F = [&](const MatrixLoop& g, const MatrixLoop& w) {
    return vacuum_logderiv_gauge(g, w, opts);
  };
  const cplx du_fv = (F(left_flow(gamma, u, eps), v) - F(left_flow(gamma, u, -eps), v)) / (2.0 * eps);
  const cplx dv_fu = (F(left_flow(gamma, v, eps), u) - F(left_flow(gamma, v, -eps), u)) / (2.0 * eps);
  return du_fv - dv_fu + F(gamma, commutator(u, v));
}

}  // namespace tauforge
