#include "tauforge/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "tauforge/birkhoff.hpp"
#include "tauforge/ernst.hpp"
#include "tauforge/errors.hpp"
#include "tauforge/kdv.hpp"
#include "tauforge/loop_io.hpp"
#include "tauforge/phase_space.hpp"
#include "tauforge/random_loops.hpp"
#include "tauforge/twistor.hpp"

namespace tauforge {

namespace {

constexpr cplx I(0.0, 1.0);

struct Outcome {
  double value;
  bool passed;
  std::string detail;
};

Outcome le(double v, double thr, std::string detail = {}) { return {v, v <= thr, std::move(detail)}; }
Outcome ge(double v, double thr, std::string detail = {}) { return {v, v >= thr, std::move(detail)}; }

class Suite {
 public:
  explicit Suite(std::ostream* log) : log_(log) {}

  void check(const std::string& module, const std::string& name, double threshold,
             const std::string& relation, const std::function<Outcome()>& fn) {
    CheckResult r{module, name, NAN, threshold, relation, false, {}};
    try {
      const Outcome o = fn();
      r.value = o.value;
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    if (log_)
      *log_ << (r.passed ? "PASS " : "FAIL ") << module << "/" << name << "  value=" << r.value
            << " " << relation << " " << threshold << (r.detail.empty() ? "" : "  " + r.detail)
            << "\n";
    report.checks.push_back(std::move(r));
  }
  void le_check(const std::string& m, const std::string& n, double thr, const std::function<double()>& f) {
    check(m, n, thr, "<=", [&] { return le(f(), thr); });
  }
  void ge_check(const std::string& m, const std::string& n, double thr, const std::function<double()>& f) {
    check(m, n, thr, ">=", [&] { return ge(f(), thr); });
  }

  SelftestReport report;

 private:
  std::ostream* log_;
};

// max_j ||s(theta_j) - t(theta_j)||_F
double sample_gap(const LoopSamples& s, const LoopSamples& t) {
  double m = 0.0;
  for (int j = 0; j < s.M(); ++j) m = std::max(m, (s[j] - t[j]).norm());
  return m;
}

double sample_sup(const LoopSamples& s) {
  double m = 0.0;
  for (int j = 0; j < s.M(); ++j) m = std::max(m, s[j].norm());
  return m;
}

// exp of a traceless 2x2 matrix: cosh(s) I + sinh(s)/s A, s^2 = -det A
CMatrix exp_traceless2(const CMatrix& A) {
  const cplx s = std::sqrt(-A.determinant());
  const cplx sh = std::abs(s) < 1e-8 ? 1.0 + s * s / 6.0 : std::sinh(s) / s;
  return std::cosh(s) * CMatrix::Identity(2, 2) + sh * A;
}

MatrixLoop single_mode_tangent(const CMatrix& A, int k, int N, int M) {
  return MatrixLoop::monomial(A, k, N, M) - MatrixLoop::monomial(A.adjoint(), -k, N, M);
}

CMatrix traceless(CMatrix A) {
  A -= (A.trace() / static_cast<double>(A.rows())) * CMatrix::Identity(A.rows(), A.cols());
  return A;
}

void loop_algebra_checks(Suite& s, std::mt19937_64& rng) {
  const std::string m = "loop_algebra";
  s.le_check(m, "sample_roundtrip_rel", 1e-12, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 32);
    const LoopSamples sa = a.samples();
    return sample_gap(MatrixLoop::from_samples(sa, 32).samples(), sa) / sample_sup(sa);
  });
  s.le_check(m, "product_pointwise_rel", 1e-12, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 16), b = random_smooth_loop(rng, 2, 16);
    const LoopSamples sa = a.samples(), sb = b.samples();
    const LoopSamples sp = multiply(a, b, kDefaultTailThreshold, 32).samples();
    double gap = 0.0;
    for (int j = 0; j < sa.M(); ++j) gap = std::max(gap, (sp[j] - sa[j] * sb[j]).norm());
    return gap / (sample_sup(sa) * sample_sup(sb));
  });
  s.le_check(m, "associativity", 1e-11, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 10), b = random_smooth_loop(rng, 2, 10),
                     c = random_smooth_loop(rng, 2, 10);
    const double t = kDefaultTailThreshold;
    const MatrixLoop l = multiply(multiply(a, b, t, 20), c, t, 30);
    const MatrixLoop r = multiply(a, multiply(b, c, t, 20), t, 30);
    return sup_norm_diff(l, r) / (sup_norm(a) * sup_norm(b) * sup_norm(c));
  });
  s.le_check(m, "inverse_roundtrip", 1e-10, [&] {
    const MatrixLoop r = random_smooth_loop(rng, 2, 32, kDefaultSamples, 0.3);
    const MatrixLoop a = MatrixLoop::identity(2, 32) + cplx(0.3 / sup_norm(r)) * r;
    return sup_norm_diff(multiply(a, inverse(a)), MatrixLoop::identity(2, 32));
  });
  s.le_check(m, "chain_rule_rel", 1e-12, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 32);
    const LoopSamples dl = derivative_lambda(a).samples(), dt = derivative_theta(a).samples();
    double gap = 0.0;
    for (int j = 0; j < dl.M(); ++j) {
      const cplx lam = LoopSamples::lambda(j, dl.M());
      gap = std::max(gap, (dl[j] - dt[j] / (I * lam)).norm());
    }
    return gap / sample_sup(dl);
  });
  s.le_check(m, "contour_exactness", 1e-12, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 32);
    return contour_integral_dlambda_entries(derivative_lambda(a)).cwiseAbs().maxCoeff();
  });
  s.le_check(m, "cauchy_inverse_power", 1e-15, [&] {
    return std::abs(contour_integral_dlambda(MatrixLoop::scalar_monomial(1.0, -1, 4)) -
                    2.0 * std::numbers::pi * I);
  });
  s.le_check(m, "exp_nilpotent_exact", 1e-15, [&] {
    std::vector<CMatrix> modes(9, CMatrix::Zero(2, 2));
    for (int k = -4; k <= 4; ++k) modes[k + 4](0, 1) = cplx(0.3 / (1 + k * k), 0.1 * k);
    const MatrixLoop a = MatrixLoop::from_coeffs(4, 64, modes);
    return coefficient_distance(exp_pointwise(a), MatrixLoop::identity(2, 4, 64) + a);
  });
  s.le_check(m, "exp_closed_form", 1e-10, [&] {
    const MatrixLoop u = random_algebra_loop(rng, 2, 3, 0.5, 32);
    const LoopSamples su = u.samples(), se = exp_pointwise(u).samples();
    double gap = 0.0;
    for (int j = 0; j < su.M(); ++j) gap = std::max(gap, (se[j] - exp_traceless2(su[j])).norm());
    return gap;
  });
  s.le_check(m, "projection_partition", 0.0, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 12);
    const MatrixLoop pos = project(a, ModePart::strictly_positive);
    double d = coefficient_distance(pos + project(a, ModePart::nonpositive), a);
    d = std::max(d, coefficient_distance(project(a, ModePart::strictly_negative) +
                                             project(a, ModePart::nonnegative),
                                         a));
    d = std::max(d, coefficient_distance(project(pos, ModePart::strictly_positive), pos));
    return d;
  });
  s.le_check(m, "serialization_exact", 0.0, [&] {
    const MatrixLoop a = random_smooth_loop(rng, 2, 8, 64);
    return coefficient_distance(loop_from_json(loop_to_json(a)), a);
  });
  s.check(m, "unimodular_tag_preserved", 0.0, "==", [&] {
    const MatrixLoop g1 = random_group_loop(rng, 2, 3, 0.5, 32);
    const MatrixLoop g2 = random_group_loop(rng, 2, 3, 0.5, 32);
    const MatrixLoop p = multiply(g1, g2), q = inverse(g1);
    const bool ok = p.has_tag(kUnimodular) && q.has_tag(kUnimodular) && p.satisfies(kUnimodular) &&
                    q.satisfies(kUnimodular);
    return Outcome{ok ? 0.0 : 1.0, ok, {}};
  });
}

void birkhoff_checks(Suite& s, std::mt19937_64& rng) {
  const std::string m = "birkhoff";
  s.le_check(m, "roundtrip_10_random", 1e-9, [&] {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const MatrixLoop g = random_group_loop(rng, 2, 3, 0.5, 32);
      const BirkhoffFactors f = factorize(g);
      worst = std::max(worst, sup_norm_diff(g, multiply(f.g_minus, inverse(f.g_plus))));
    }
    return worst;
  });
  s.check(m, "diag_lambda_outside_big_cell", 0.0, "throws", [&] {
    std::vector<CMatrix> modes(65, CMatrix::Zero(2, 2));
    modes[33](0, 0) = 1.0;
    modes[31](1, 1) = 1.0;
    const MatrixLoop g = MatrixLoop::from_coeffs(32, kDefaultSamples, modes).with_tag(kUnimodular);
    try {
      factorize(g);
    } catch (const BigCellError& e) {
      return Outcome{e.condition, true, "BigCellError raised"};
    }
    return Outcome{0.0, false, "no BigCellError"};
  });
  s.le_check(m, "uniqueness", 1e-8, [&] {
    const BirkhoffFactors f = factorize(random_group_loop(rng, 2, 3, 0.5, 32));
    const MatrixLoop g = multiply(f.g_minus, inverse(f.g_plus)).with_tag(kUnimodular);
    const BirkhoffFactors f2 = factorize(g);
    return std::max(coefficient_distance(f.g_minus, f2.g_minus), coefficient_distance(f.g_plus, f2.g_plus));
  });
  s.le_check(m, "det_ratio_one", 1e-9, [&] {
    const BirkhoffFactors f = factorize(random_group_loop(rng, 2, 3, 0.5, 32));
    const LoopSamples a = f.g_minus.samples(), b = f.g_plus.samples();
    double gap = 0.0;
    for (int j = 0; j < a.M(); ++j) gap = std::max(gap, std::abs(a[j].determinant() / b[j].determinant() - 1.0));
    return gap;
  });
  s.le_check(m, "normalization_P0_identity", 0.0, [&] {
    const BirkhoffFactors f = factorize(random_group_loop(rng, 2, 3, 0.5, 32));
    const std::vector<CMatrix> P = negative_part_expansion(f, 2);
    double d = (P[0] - CMatrix::Identity(2, 2)).norm();
    for (int k = 1; k <= f.g_minus.N(); ++k) d = std::max(d, f.g_minus.coeff(k).norm());
    for (int k = 1; k <= f.g_plus.N(); ++k) d = std::max(d, f.g_plus.coeff(-k).norm());
    return d;
  });
}

void phase_space_checks(Suite& s, std::mt19937_64& rng) {
  const std::string m = "loop_phase_space";
  const int N = 32, M = kDefaultSamples;
  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = -1.0;
  s.le_check(m, "cocycle_minus_2i", 1e-12, [&] {
    const LoopTangent u = LoopTangent::complexified(MatrixLoop::monomial(A, 1, N, M));
    const LoopTangent v = LoopTangent::complexified(MatrixLoop::monomial(A, -1, N, M));
    return std::abs(cocycle(u, v) - cplx(0.0, -2.0));
  });
  s.le_check(m, "cocycle_mode_orthogonality", 1e-14, [&] {
    const LoopTangent u = LoopTangent::complexified(MatrixLoop::monomial(random_matrix(rng, 2), 2, N, M));
    const LoopTangent v = LoopTangent::complexified(MatrixLoop::monomial(random_matrix(rng, 2), -1, N, M));
    return std::abs(cocycle(u, v));
  });
  s.le_check(m, "symplectic_antisymmetry", 0.0, [&] {
    const MatrixLoop g = random_group_loop(rng, 2, 3, 0.5, N);
    const LoopTangent u = LoopTangent::unitary(random_algebra_loop(rng, 2, 2, 0.5, N));
    const LoopTangent v = LoopTangent::unitary(random_algebra_loop(rng, 2, 2, 0.5, N));
    return std::abs(reduced_symplectic(g, u, v) + reduced_symplectic(g, v, u));
  });
  s.check(m, "poisson_anomaly_richardson", 1e-6, "passed", [&] {
    const MatrixLoop g = random_group_loop(rng, 2, 3, 0.5, N);
    const LoopTangent u = LoopTangent::unitary(single_mode_tangent(traceless(random_matrix(rng, 2)), 1, N, M));
    const LoopTangent v = LoopTangent::unitary(single_mode_tangent(traceless(random_matrix(rng, 2)), 2, N, M));
    const AnomalyRichardson r = poisson_anomaly_richardson(g, u, v, 1e-3);
    return Outcome{std::abs(r.extrapolated), r.passed,
                   "coarse=" + std::to_string(std::abs(r.coarse)) + " ratio=" + std::to_string(r.ratio)};
  });
  s.le_check(m, "gauge_right_twist_invariance", 1e-10, [&] {
    const BirkhoffFactors f = factorize(random_group_loop(rng, 2, 3, 0.5, N));
    const MatrixLoop u = random_smooth_loop(rng, 2, 4, M);
    return std::abs(vacuum_logderiv_gauge(f, u) - vacuum_logderiv_gauge(right_twist(f, random_unimodular(rng, 2)), u));
  });
  s.le_check(m, "diffeo_plus_term_drops", 1e-9, [&] {
    const BirkhoffFactors f = factorize(random_group_loop(rng, 2, 3, 0.5, N));
    const DiffeoTerms t = vacuum_logderiv_diffeo_terms(f, MatrixLoop::scalar_monomial(1.0, 2, N, M));
    return std::abs(t.plus_term) + std::abs(t.value - t.minus_term);
  });
  s.le_check(m, "curvature_equals_cocycle", 1e-5, [&] {
    const MatrixLoop g = random_group_loop(rng, 2, 3, 0.3, N);
    const MatrixLoop u = single_mode_tangent(traceless(random_matrix(rng, 2)) * 0.3, 1, N, M);
    const MatrixLoop v = single_mode_tangent(traceless(random_matrix(rng, 2)) * 0.3, -1, N, M);
    const cplx c = cocycle(LoopTangent::complexified(u), LoopTangent::complexified(v));
    return std::abs(tau_form_curvature(g, u, v, 1e-3) + I * c);
  });
}

void twistor_checks(Suite& s) {
  const std::string m = "twistor_geometry";
  const SymmetryGenerator dv = SymmetryGenerator::translation(1, 0, 0);
  const std::vector<cplx> probes{cplx(0.3, 0.4), cplx(-1.2, 0.5), cplx(2.0, -0.7)};
  auto gap = [&](const Rational& r, const std::function<cplx(cplx)>& f) {
    double g = 0.0;
    for (cplx l : probes) g = std::max(g, std::abs(r(l) - f(l)));
    return g;
  };
  s.le_check(m, "incidence_1_2_3", 0.0, [&] { return std::abs(incidence({1, 2, 3}, 1.0) - 6.0); });
  s.le_check(m, "decompose_dx_h_lambda", 1e-13, [&] {
    const DirectionDecomposition d = decompose(SymmetryGenerator::translation(0, 1, 0), dv);
    return gap(d.h, [](cplx l) { return l; });
  });
  s.le_check(m, "decompose_dt", 1e-13, [&] {
    const DirectionDecomposition d = decompose(SymmetryGenerator::translation(0, 0, 1), dv);
    return std::max({gap(d.h, [](cplx l) { return l * l; }), gap(d.f0, [](cplx l) { return l; }),
                     gap(d.f1, [](cplx) { return cplx(1.0); })});
  });
  s.le_check(m, "decompose_dv_trivial", 1e-13, [&] {
    const DirectionDecomposition d = decompose(dv, dv);
    return std::max({gap(d.h, [](cplx) { return cplx(1.0); }), gap(d.f0, [](cplx) { return cplx(0.0); }),
                     gap(d.f1, [](cplx) { return cplx(0.0); })});
  });
  s.le_check(m, "ernst_frame_residue_i_over_r", 1e-14, [&] {
    const double r = 1.7;
    const DirectionDecomposition d = ernst_frame(r, 0.0, ErnstDirection::wbar);
    return std::abs(d.v_coeff.residue(*d.pole) - I / r) + std::abs(*d.pole - I);
  });
  s.le_check(m, "ernst_frame_value_at_2i", 1e-14, [&] {
    return std::abs(ernst_frame(1.0, 0.0, ErnstDirection::wbar).v_coeff(2.0 * I) - 3.0);
  });
}

void kdv_checks(Suite& s, int threads) {
  const std::string m = "tau_kdv";
  KdVConfig cfg;
  cfg.threads = threads;
  const KdVSeed pole = KdVSeed::one_pole(0.2, 0.5, 0.5);

  s.le_check(m, "branch_independence", 1e-13, [&] {
    double worst = 0.0;
    for (int j = 0; j < 8; ++j) {
      const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.3) / 8.0);
      const cplx mu = cplx(0.7, -0.4) * lam + 0.5 * lam * lam;
      const CMatrix E = normal_form_exponential(mu, lam);
      for (double sign : {1.0, -1.0}) {
        const cplx root = sign * std::sqrt(lam);
        const CMatrix F = std::cosh(mu / root) * CMatrix::Identity(2, 2) - root * std::sinh(mu / root) * kdv_phi(lam);
        worst = std::max(worst, (E - F).norm() / F.norm());
      }
    }
    return worst;
  });
  s.check(m, "vacuum_grid", 1e-8, "<=", [&] {
    const TauGrid g = tau_grid(KdVSeed::vacuum(), linspace(-1, 1, 11), linspace(-1, 1, 11), cfg);
    const double q = max_abs_q(g), lt = max_abs_logtau(g), r = kdv_residual(g);
    return Outcome{q, q <= 1e-8 && lt <= 1e-7 && r <= 1e-7,
                   "max|log tau|=" + std::to_string(lt) + " residual=" + std::to_string(r)};
  });
  TauGrid patch;
  s.check(m, "one_pole_patch_build", 0.0, "==", [&] {
    patch = tau_grid(pole, linspace(-0.24, 0.24, 13), linspace(-0.24, 0.24, 13), cfg);
    const int bad = bad_node_count(patch);
    return Outcome{static_cast<double>(bad), bad == 0, {}};
  });
  s.le_check(m, "one_pole_formula_gap", 1e-8, [&] { return max_formula_gap(patch); });
  s.le_check(m, "one_pole_dx_logtau_eq_q", 1e-5, [&] { return max_dx_logtau_mismatch(patch); });
  s.le_check(m, "one_pole_dt_logtau", 1e-5, [&] { return max_dt_logtau_mismatch(patch); });
  s.le_check(m, "one_pole_closedness", 1e-6, [&] { return max_ordering_gap(patch); });
  s.le_check(m, "one_pole_logtau_origin", 0.0, [&] { return std::abs(patch.at(6, 6).log_tau); });
  double r08 = NAN, r04 = NAN;
  s.le_check(m, "one_pole_residual_d0.02", 1e-4, [&] { return kdv_residual_point(pole, 0.3, 0.2, 0.02, cfg); });
  s.check(m, "one_pole_residual_order", 3.5, "in [3.5,4.5]", [&] {
    r08 = kdv_residual_point(pole, 0.3, 0.2, 0.08, cfg);
    r04 = kdv_residual_point(pole, 0.3, 0.2, 0.04, cfg);
    const double order = std::log2(r08 / r04);
    return Outcome{order, order >= 3.5 && order <= 4.5,
                   "r(0.08)=" + std::to_string(r08) + " r(0.04)=" + std::to_string(r04)};
  });
  s.ge_check(m, "corrupted_u_detected", 1e-4, [&] {
    TauGrid g = tau_grid(pole, linspace(0.3, 0.6, 11), linspace(0.0, 0.3, 11), cfg, TauGridOptions{false, true});
    // u -> u + 1e-3 x^2 through q -> q - 1e-3 x^3 / 6
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int it = 0; it < g.nt(); ++it) g.at(ix, it).q -= 1e-3 * std::pow(g.xs[ix], 3) / 6.0;
    return kdv_residual(g);
  });
  s.le_check(m, "right_multiplied_P0_invariance", 1e-9, [&] {
    CMatrix C(2, 2);
    C << 1.3, 0.4, -0.2, 0.7;
    C /= std::sqrt(C.determinant());
    const KdVSeed twisted = pole.right_multiplied(C);
    double worst = 0.0;
    for (const SpacetimePoint p : {SpacetimePoint{0, 0.3, -0.2}, SpacetimePoint{0, -0.7, 0.5}}) {
      worst = std::max(worst, std::abs(q_expansion(pole, p, cfg) - q_expansion(twisted, p, cfg)));
      worst = std::max(worst, std::abs(dlogtau_t(pole, p, cfg) - dlogtau_t(twisted, p, cfg)));
    }
    return worst;
  });
}

void ernst_checks(Suite& s, int threads) {
  const std::string m = "tau_ernst";
  const ErnstSolution point = ErnstSolution::point_source(0.8, 0.1);
  s.le_check(m, "residue_route", 1e-12, [&] {
    double worst = 0.0;
    for (const ErnstSolution& sol : {point, ErnstSolution::kasner(0.7), ErnstSolution::flat()})
      for (double r : {0.4, 1.0, 2.3})
        for (double z : {-0.8, 0.0, 0.9}) worst = std::max(worst, residue_check(sol, r, z));
    return worst;
  });
  s.le_check(m, "kasner_dr_closed_form", 1e-10, [&] {
    double worst = 0.0;
    for (double a : {0.0, 0.3, 0.7, 1.2})
      for (double r : {0.5, 1.0, 2.5}) {
        const ErnstSolution k = ErnstSolution::kasner(a);
        worst = std::max(worst, std::abs(dlogtau_r(k, r, 0.2) - (1.0 + a * a) / (2.0 * r)));
        worst = std::max(worst, std::abs(dlogtau_z(k, r, 0.2)));
      }
    return worst;
  });
  s.le_check(m, "field_residual_solutions", 1e-12, [&] {
    return std::max(field_residual(ErnstSolution::kasner(0.7), 1.3, 0.2), field_residual(point, 1.3, 0.2));
  });
  s.ge_check(m, "field_residual_non_solution", 1e-3, [&] { return field_residual(ErnstSolution::linear_r(), 1.3, 0.2); });
  s.le_check(m, "reality_conjugation", 1e-12, [&] {
    return std::abs(dlogtau(point, 0.9, 0.4, ErnstDirection::w) - std::conj(dlogtau(point, 0.9, 0.4, ErnstDirection::wbar)));
  });
  s.le_check(m, "kasner_logtau_closed_form", 1e-8, [&] {
    const double a = 0.7;
    const ErnstTauField f = logtau_field(ErnstSolution::kasner(a), linspace(0.5, 2.0, 7), linspace(-1, 1, 7), 1e-12, threads);
    double worst = 0.0;
    for (int ir = 0; ir < 7; ++ir)
      for (int iz = 0; iz < 7; ++iz)
        worst = std::max(worst, std::abs(f.at(ir, iz).log_tau - 0.5 * (1.0 + a * a) * std::log(f.rs[ir])));
    return worst;
  });
  s.check(m, "conformal_candidate", 1e-7, "<=", [&] {
    const ErnstTauField f = logtau_field(point, linspace(0.5, 2.0, 7), linspace(-1, 1, 7), 1e-12, threads);
    const ConformalReport rep = conformal_factor_check(f, 1e-7);
    return Outcome{rep.std_candidate1, rep.constant_candidate == 1,
                   "candidate2 std=" + std::to_string(rep.std_candidate2)};
  });
  s.le_check(m, "rectangle_closed_on_solution", 1e-8, [&] {
    return std::abs(rectangle_loop_integral(point, 0.8, 1.2, 0.3, 0.7));
  });
  s.ge_check(m, "rectangle_open_on_non_solution", 1e-6, [&] {
    return std::abs(rectangle_loop_integral(ErnstSolution::product_rz(), 0.8, 1.2, 0.3, 0.7));
  });
}

}  // namespace

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

SelftestReport run_selftest(int threads, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  Suite s(log);
  std::mt19937_64 rng(20241015);
  loop_algebra_checks(s, rng);
  birkhoff_checks(s, rng);
  phase_space_checks(s, rng);
  twistor_checks(s);
  kdv_checks(s, threads);
  ernst_checks(s, threads);
  s.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s.report;
}

}  // namespace tauforge
