#include "tauforge/kdv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tauforge/errors.hpp"
#include "tauforge/parallel.hpp"
#include "tauforge/phase_space.hpp"
#include "tauforge/quadrature.hpp"

namespace tauforge {

namespace {

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

struct DirectionLoops {
  MatrixLoop phi, hx, ht, zero;
};

DirectionLoops direction_loops(int N, int M) {
  const SymmetryGenerator X = SymmetryGenerator::translation(1.0, 0.0, 0.0);
  const DirectionDecomposition dx = decompose(SymmetryGenerator::translation(0.0, 1.0, 0.0), X);
  const DirectionDecomposition dt = decompose(SymmetryGenerator::translation(0.0, 0.0, 1.0), X);
  return {kdv_phi_loop(N, M), restrict_to_circle(dx.h, N, M), restrict_to_circle(dt.h, N, M),
          MatrixLoop(1, 0, M)};
}

cplx gauge_along(const BirkhoffFactors& f, const MatrixLoop& h, const DirectionLoops& d) {
  return tau_variation(f, TauVariationInput{h, d.phi, d.zero});
}

struct PointValues {
  bool ok = false;
  cplx q = NAN, qc = NAN, dt = NAN;
};

PointValues evaluate_point(const KdVSeed& seed, double x, double t, const KdVConfig& cfg,
                           const DirectionLoops& d) {
  PointValues out;
  try {
    const BirkhoffFactors f = factorize(pullback_patching(seed, {0.0, x, t}, cfg), cfg.factor);
    out.q = q_expansion(f);
    out.qc = gauge_along(f, d.hx, d);
    out.dt = gauge_along(f, d.ht, d);
    out.ok = true;
  } catch (const BigCellError&) {
    out.ok = false;
  }
  return out;
}

// Integrates f from 0 to every entry of coords (sorted ascending). node(i)
// is f at coords[i] (NaN marks a bad cell), at(s) evaluates f anywhere and
// throws BigCellError off the big cell. Unreachable entries come back NaN.
std::vector<cplx> integrate_from_zero(const std::vector<double>& coords,
                                      const std::function<cplx(int)>& node,
                                      const std::function<cplx(double)>& at, double tol,
                                      int& evaluations) {
  const int n = static_cast<int>(coords.size());
  std::vector<double> bp;
  std::vector<cplx> fv;
  std::vector<int> owner;  // coords index, -1 for the inserted origin
  bool has_zero = false;
  for (int i = 0; i < n; ++i) has_zero = has_zero || coords[i] == 0.0;
  for (int i = 0; i < n; ++i) {
    if (!has_zero && (i == 0 ? 0.0 < coords[0] : (coords[i - 1] < 0.0 && 0.0 < coords[i]))) {
      bp.push_back(0.0);
      cplx f0 = NAN;
      try {
        f0 = at(0.0);
      } catch (const BigCellError&) {
      }
      fv.push_back(f0);
      owner.push_back(-1);
    }
    bp.push_back(coords[i]);
    fv.push_back(node(i));
    owner.push_back(i);
  }
  if (!has_zero && coords.back() < 0.0) {
    bp.push_back(0.0);
    cplx f0 = NAN;
    try {
      f0 = at(0.0);
    } catch (const BigCellError&) {
    }
    fv.push_back(f0);
    owner.push_back(-1);
  }
  const int nb = static_cast<int>(bp.size());
  const int z = static_cast<int>(std::find(bp.begin(), bp.end(), 0.0) - bp.begin());
  std::vector<cplx> acc(nb, cplx(NAN, NAN));
  if (finite(fv[z])) acc[z] = 0.0;
  auto step = [&](int from, int to) {
    if (!finite(acc[from]) || !finite(fv[to])) return;
    try {
      const RombergResult r = romberg(at, bp[from], bp[to], fv[from], fv[to], tol);
      evaluations += r.evaluations;
      if (!r.converged)
        throw NumericalCheckError("path integration did not converge on [" + std::to_string(bp[from]) +
                                  ", " + std::to_string(bp[to]) + "]");
      acc[to] = acc[from] + r.value;
    } catch (const BigCellError&) {
    }
  };
  for (int i = z + 1; i < nb; ++i) step(i - 1, i);
  for (int i = z - 1; i >= 0; --i) step(i + 1, i);
  std::vector<cplx> out(n, cplx(NAN, NAN));
  for (int b = 0; b < nb; ++b)
    if (owner[b] >= 0) out[owner[b]] = acc[b];
  return out;
}

cplx window_derivative(const std::vector<double>& coords, int i, int order, int width,
                       const std::function<cplx(int)>& val) {
  const int n = static_cast<int>(coords.size());
  if (n < width) return cplx(NAN, NAN);
  int lo = std::clamp(i - width / 2, 0, n - width);
  std::vector<double> xs(coords.begin() + lo, coords.begin() + lo + width);
  const std::vector<double> w = fd_weights(xs, coords[i], order);
  cplx s = 0.0;
  for (int k = 0; k < width; ++k) s += w[k] * val(lo + k);
  return s;
}

bool uniform(const std::vector<double>& c) {
  if (c.size() < 2) return false;
  const double h = c[1] - c[0];
  for (size_t i = 1; i < c.size(); ++i)
    if (std::abs((c[i] - c[i - 1]) - h) > 1e-12 * std::max(1.0, std::abs(h))) return false;
  return h > 0.0;
}

}  // namespace

KdVSeed KdVSeed::vacuum() {
  return {"vacuum", [](cplx) -> CMatrix { return CMatrix::Identity(2, 2); }};
}

KdVSeed KdVSeed::one_pole(cplx a, double c, double s) {
  CMatrix n(2, 2);
  n << -s, 1.0, -s * s, s;
  const std::string desc = "one-pole a=" + std::to_string(a.real()) +
                           (a.imag() != 0.0 ? "+" + std::to_string(a.imag()) + "i" : "") +
                           " c=" + std::to_string(c) + " s=" + std::to_string(s);
  return {desc, [a, c, n](cplx l) -> CMatrix {
            return CMatrix::Identity(2, 2) + (c / (l - a)) * n;
          }};
}

KdVSeed KdVSeed::from_loop(const MatrixLoop& p0, const std::string& description) {
  if (p0.n() != 2) throw std::invalid_argument("KdV seed must be a 2x2 loop");
  return {description, [p0](cplx l) -> CMatrix {
            CMatrix out = CMatrix::Zero(2, 2);
            for (int k = -p0.N(); k <= p0.N(); ++k) out += std::pow(l, k) * p0.coeff(k);
            return out;
          }};
}

KdVSeed KdVSeed::right_multiplied(const CMatrix& C) const {
  auto base = p0;
  return {description + " * C", [base, C](cplx l) -> CMatrix { return base(l) * C; }};
}

CMatrix kdv_phi(cplx lambda) {
  CMatrix P(2, 2);
  P << 0.0, 1.0 / lambda, 1.0, 0.0;
  return P;
}

CMatrix kdv_phi0() {
  CMatrix P = CMatrix::Zero(2, 2);
  P(1, 0) = 1.0;
  return P;
}

MatrixLoop kdv_phi_loop(int N, int M) {
  std::vector<CMatrix> modes(2 * N + 1, CMatrix::Zero(2, 2));
  modes[N] = kdv_phi0();
  modes[N - 1](0, 1) = 1.0;
  return MatrixLoop::from_coeffs(N, M, modes);
}

namespace {

Eigen::Matrix2cd normal_form_exponential2(cplx mu, cplx lambda) {
  const cplx w = mu * mu / lambda;
  cplx C = 0.0, S = 0.0;
  cplx term = 1.0;  // w^m / (2m)!
  for (int m = 0; m < 400; ++m) {
    const cplx sterm = term / static_cast<double>(2 * m + 1);
    C += term;
    S += sterm;
    if (std::abs(term) <= 1e-18 * std::abs(C) && std::abs(sterm) <= 1e-18 * std::abs(S)) break;
    term *= w / static_cast<double>((2 * m + 1) * (2 * m + 2));
  }
  Eigen::Matrix2cd E;
  E << C, -mu * S / lambda, -mu * S, C;
  return E;
}

}  // namespace

CMatrix normal_form_exponential(cplx mu, cplx lambda) { return normal_form_exponential2(mu, lambda); }

MatrixLoop pullback_patching(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg) {
  LoopSamples s(2, cfg.M);
  for (int j = 0; j < cfg.M; ++j) {
    const cplx l = LoopSamples::lambda(j, cfg.M);
    const Eigen::Matrix2cd P0 = seed.p0(l);
    s[j].noalias() = normal_form_exponential2(incidence(p, l), l) * P0;
  }
  return MatrixLoop::from_samples(s, cfg.N, cfg.factor.tail_threshold).with_tag(kUnimodular);
}

cplx q_expansion(const BirkhoffFactors& f) {
  const std::vector<CMatrix> P = negative_part_expansion(f, 1);
  return (P[1] * P[0].inverse() * kdv_phi0()).trace();
}

cplx q_expansion(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg) {
  return q_expansion(factorize(pullback_patching(seed, p, cfg), cfg.factor));
}

cplx dlogtau_translation(const BirkhoffFactors& f, const SymmetryGenerator& Y) {
  const int N = f.g_minus.N(), M = f.g_minus.M();
  const DirectionDecomposition d = decompose(Y, SymmetryGenerator::translation(1.0, 0.0, 0.0));
  return tau_variation(f, TauVariationInput{restrict_to_circle(d.h, N, M), kdv_phi_loop(N, M),
                                            MatrixLoop(1, 0, M)});
}

cplx q_contour(const BirkhoffFactors& f) {
  return dlogtau_translation(f, SymmetryGenerator::translation(0.0, 1.0, 0.0));
}

cplx q_contour(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg) {
  return q_contour(factorize(pullback_patching(seed, p, cfg), cfg.factor));
}

cplx dlogtau_t(const BirkhoffFactors& f) {
  return dlogtau_translation(f, SymmetryGenerator::translation(0.0, 0.0, 1.0));
}

cplx dlogtau_t(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg) {
  return dlogtau_t(factorize(pullback_patching(seed, p, cfg), cfg.factor));
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be positive");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  // snap values that should be exactly zero
  for (double& x : v)
    if (std::abs(x) < 1e-14 * std::max(std::abs(lo), std::abs(hi))) x = 0.0;
  return v;
}

std::vector<double> fd_weights(const std::vector<double>& x, double x0, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

TauGrid tau_grid(const KdVSeed& seed, const std::vector<double>& xs, const std::vector<double>& ts,
                 const KdVConfig& cfg, const TauGridOptions& opts) {
  if (xs.empty() || ts.empty()) throw std::invalid_argument("tau_grid: empty axis");
  if (!std::is_sorted(xs.begin(), xs.end()) || !std::is_sorted(ts.begin(), ts.end()))
    throw std::invalid_argument("tau_grid: axes must be ascending");
  TauGrid g;
  g.xs = xs;
  g.ts = ts;
  g.N = cfg.N;
  g.M = cfg.M;
  const int nx = g.nx(), nt = g.nt();
  g.nodes.assign(static_cast<size_t>(nx) * nt, KdVNode{});
  const DirectionLoops d = direction_loops(cfg.N, cfg.M);

  parallel_for(nx * nt, cfg.threads, [&](int idx) {
    const int ix = idx / nt, it = idx % nt;
    const PointValues v = evaluate_point(seed, xs[ix], ts[it], cfg, d);
    KdVNode& n = g.nodes[idx];
    n.bigcell = v.ok;
    n.q = v.q;
    n.q_contour = v.qc;
    n.dlogtau_t = v.dt;
  });

  for (int ix = 0; ix < nx; ++ix)
    for (int it = 0; it < nt; ++it) {
      bool ok = true;
      const int lo = std::clamp(ix - 2, 0, std::max(0, nx - 5));
      for (int k = lo; k < std::min(nx, lo + 5); ++k) ok = ok && g.at(k, it).bigcell;
      if (ok && nx >= 5)
        g.at(ix, it).u = -2.0 * window_derivative(xs, ix, 1, 5, [&](int k) { return g.at(k, it).q; });
    }

  if (!opts.integrate) return g;

  auto contour_at = [&](double x, double t, const MatrixLoop& h) {
    const BirkhoffFactors f = factorize(pullback_patching(seed, {0.0, x, t}, cfg), cfg.factor);
    return gauge_along(f, h, d);
  };
  auto q_at = [&](double x, double t) { return contour_at(x, t, d.hx); };
  auto dt_at = [&](double x, double t) { return contour_at(x, t, d.ht); };

  int base_evals[2] = {0, 0};
  // first leg of each ordering: along t = 0 in x, along x = 0 in t
  auto node_or_direct = [&](const std::vector<double>& axis, double other, bool along_x, int k,
                            bool want_q) -> cplx {
    const std::vector<double>& off = along_x ? ts : xs;
    const auto pos = std::find(off.begin(), off.end(), other);
    if (pos != off.end()) {
      const int o = static_cast<int>(pos - off.begin());
      const KdVNode& n = along_x ? g.at(k, o) : g.at(o, k);
      if (!n.bigcell) return cplx(NAN, NAN);
      return want_q ? n.q_contour : n.dlogtau_t;
    }
    try {
      return along_x ? (want_q ? q_at(axis[k], other) : dt_at(axis[k], other))
                     : (want_q ? q_at(other, axis[k]) : dt_at(other, axis[k]));
    } catch (const BigCellError&) {
      return cplx(NAN, NAN);
    }
  };
  const std::vector<cplx> base_x = integrate_from_zero(
      xs, [&](int k) { return node_or_direct(xs, 0.0, true, k, true); },
      [&](double s) { return q_at(s, 0.0); }, cfg.path_tol, base_evals[0]);
  const std::vector<cplx> base_t =
      opts.alt_ordering
          ? integrate_from_zero(
                ts, [&](int k) { return node_or_direct(ts, 0.0, false, k, false); },
                [&](double s) { return dt_at(0.0, s); }, cfg.path_tol, base_evals[1])
          : std::vector<cplx>(nt, cplx(NAN, NAN));

  std::vector<int> col_evals(nx, 0), row_evals(nt, 0);
  parallel_for(nx, cfg.threads, [&](int ix) {
    const std::vector<cplx> leg = integrate_from_zero(
        ts,
        [&](int it) {
          const KdVNode& n = g.at(ix, it);
          return n.bigcell ? n.dlogtau_t : cplx(NAN, NAN);
        },
        [&](double s) { return dt_at(xs[ix], s); }, cfg.path_tol, col_evals[ix]);
    for (int it = 0; it < nt; ++it) g.at(ix, it).log_tau = base_x[ix] + leg[it];
  });
  if (opts.alt_ordering) parallel_for(nt, cfg.threads, [&](int it) {
    const std::vector<cplx> leg = integrate_from_zero(
        xs,
        [&](int ix) {
          const KdVNode& n = g.at(ix, it);
          return n.bigcell ? n.q_contour : cplx(NAN, NAN);
        },
        [&](double s) { return q_at(s, ts[it]); }, cfg.path_tol, row_evals[it]);
    for (int ix = 0; ix < nx; ++ix) g.at(ix, it).log_tau_alt = base_t[it] + leg[ix];
  });

  g.path_evaluations = base_evals[0] + base_evals[1];
  for (int e : col_evals) g.path_evaluations += e;
  for (int e : row_evals) g.path_evaluations += e;

  for (auto& n : g.nodes) {
    n.path_ok = n.bigcell && finite(n.log_tau) && (!opts.alt_ordering || finite(n.log_tau_alt));
    if (!n.path_ok && opts.strict)
      throw PathCrossesBadCellError("integration path to a grid node leaves the big cell");
  }
  return g;
}

double kdv_residual_at(const TauGrid& g, int ix, int it) {
  const int nx = g.nx(), nt = g.nt();
  if (nx < 7 || nt < 7) throw std::invalid_argument("kdv_residual: need at least 7 nodes per axis");
  if (!uniform(g.xs) || !uniform(g.ts)) throw std::invalid_argument("kdv_residual: grid must be uniform");
  if (ix < 3 || ix >= nx - 3 || it < 2 || it >= nt - 2)
    throw std::invalid_argument("kdv_residual: node outside the stencil interior");
  for (int a = -3; a <= 3; ++a)
    for (int b = -2; b <= 2; ++b)
      if (!g.at(ix + a, it + b).bigcell) return NAN;
  const double hx = g.xs[1] - g.xs[0], ht = g.ts[1] - g.ts[0];
  static const std::vector<double> off5{-2, -1, 0, 1, 2}, off7{-3, -2, -1, 0, 1, 2, 3};
  static const std::vector<double> d1 = fd_weights(off5, 0.0, 1), d2 = fd_weights(off5, 0.0, 2),
                                   d4 = fd_weights(off7, 0.0, 4);
  auto q = [&](int i, int j) { return g.at(i, j).q; };
  auto qx = [&](int i, int j) {
    cplx s = 0.0;
    for (int k = 0; k < 5; ++k) s += d1[k] * q(i + k - 2, j);
    return s / hx;
  };
  cplx qxx = 0.0, qxxxx = 0.0, qxt = 0.0;
  for (int k = 0; k < 5; ++k) qxx += d2[k] * q(ix + k - 2, it);
  for (int k = 0; k < 7; ++k) qxxxx += d4[k] * q(ix + k - 3, it);
  for (int k = 0; k < 5; ++k) qxt += d1[k] * qx(ix, it + k - 2);
  const cplx u = -2.0 * qx(ix, it);
  const cplx ux = -2.0 * qxx / (hx * hx);
  const cplx uxxx = -2.0 * qxxxx / (hx * hx * hx * hx);
  const cplx ut = -2.0 * qxt / ht;
  return std::abs(4.0 * ut - uxxx - 6.0 * u * ux);
}

double kdv_residual(const TauGrid& g) {
  double worst = 0.0;
  bool any = false;
  for (int ix = 3; ix < g.nx() - 3; ++ix)
    for (int it = 2; it < g.nt() - 2; ++it) {
      const double r = kdv_residual_at(g, ix, it);
      if (std::isnan(r)) continue;
      worst = std::max(worst, r);
      any = true;
    }
  if (!any) throw std::invalid_argument("kdv_residual: no interior big-cell stencil");
  return worst;
}

double kdv_residual_point(const KdVSeed& seed, double x, double t, double delta, const KdVConfig& cfg) {
  std::vector<double> xs(7), ts(7);
  for (int k = 0; k < 7; ++k) {
    xs[k] = x + (k - 3) * delta;
    ts[k] = t + (k - 3) * delta;
  }
  const TauGrid g = tau_grid(seed, xs, ts, cfg, TauGridOptions{false, false});
  return kdv_residual_at(g, 3, 3);
}

double max_abs_q(const TauGrid& g) {
  double m = 0.0;
  for (const auto& n : g.nodes)
    if (n.bigcell) m = std::max(m, std::abs(n.q));
  return m;
}

double max_formula_gap(const TauGrid& g) {
  double m = 0.0;
  for (const auto& n : g.nodes)
    if (n.bigcell) m = std::max(m, std::abs(n.q - n.q_contour));
  return m;
}

namespace {

double fd_mismatch(const TauGrid& g, bool along_x) {
  const int nx = g.nx(), nt = g.nt();
  const int n_axis = along_x ? nx : nt;
  const int width = std::min(7, n_axis);
  if (width < 3) return NAN;
  double m = 0.0;
  for (int ix = 0; ix < nx; ++ix)
    for (int it = 0; it < nt; ++it) {
      const int i = along_x ? ix : it;
      const int lo = std::clamp(i - width / 2, 0, n_axis - width);
      bool ok = true;
      for (int k = lo; k < lo + width; ++k)
        ok = ok && (along_x ? g.at(k, it).path_ok : g.at(ix, k).path_ok);
      if (!ok) continue;
      const cplx d = window_derivative(along_x ? g.xs : g.ts, i, 1, width, [&](int k) {
        return along_x ? g.at(k, it).log_tau : g.at(ix, k).log_tau;
      });
      const cplx ref = along_x ? g.at(ix, it).q : g.at(ix, it).dlogtau_t;
      m = std::max(m, std::abs(d - ref));
    }
  return m;
}

}  // namespace

double max_dx_logtau_mismatch(const TauGrid& g) { return fd_mismatch(g, true); }
double max_dt_logtau_mismatch(const TauGrid& g) { return fd_mismatch(g, false); }

double max_ordering_gap(const TauGrid& g) {
  double m = 0.0;
  for (const auto& n : g.nodes)
    if (n.path_ok) {
      if (!finite(n.log_tau_alt)) return NAN;  // grid built without the second ordering
      m = std::max(m, std::abs(n.log_tau - n.log_tau_alt));
    }
  return m;
}

double max_abs_logtau(const TauGrid& g) {
  double m = 0.0;
  for (const auto& n : g.nodes)
    if (n.path_ok) m = std::max(m, std::abs(n.log_tau));
  return m;
}

int bad_node_count(const TauGrid& g) {
  int c = 0;
  for (const auto& n : g.nodes) c += n.bigcell ? 0 : 1;
  return c;
}

}  // namespace tauforge
