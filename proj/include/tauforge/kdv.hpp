#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tauforge/birkhoff.hpp"
#include "tauforge/loop.hpp"
#include "tauforge/twistor.hpp"

namespace tauforge {

// Symmetry matrix in exact normal form, Phi(l) = [[0, 1/l], [1, 0]], and
// the initial patching matrix P0(l), evaluated exactly on the circle.
struct KdVSeed {
  std::string description;
  std::function<CMatrix(cplx)> p0;

  static KdVSeed vacuum();
  // P0 = I + c/(l - a) n, n = v w^T with v = (1, s), w = (-s, 1) (nilpotent).
  static KdVSeed one_pole(cplx a, double c, double s);
  static KdVSeed from_loop(const MatrixLoop& p0, const std::string& description);
  KdVSeed right_multiplied(const CMatrix& C) const;
};

CMatrix kdv_phi(cplx lambda);
CMatrix kdv_phi0();  // mode 0 of Phi: [[0, 0], [1, 0]]
MatrixLoop kdv_phi_loop(int N, int M);

// exp(-mu Phi) = C(w) I - mu S(w) Phi, w = mu^2 / l,
// C = sum w^m / (2m)!, S = sum w^m / (2m+1)!.
CMatrix normal_form_exponential(cplx mu, cplx lambda);

struct KdVConfig {
  int N = 40;
  int M = 256;
  FactorizeOptions factor{};
  double path_tol = 1e-10;
  int threads = 1;
};

// exp(-mu(l) Phi(l)) P0(l) on |l| = 1, mu = incidence(p, l)
MatrixLoop pullback_patching(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg);

// tr(P^1 (P^0)^{-1} Phi0) from g_minus = sum P^i l^{-i}
cplx q_expansion(const BirkhoffFactors& f);
cplx q_expansion(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg);

// Directional derivative of log tau along a translation Y, from the
// multiplier h of decompose(Y, d_v); no lifted part since d_v lifts
// horizontally.
cplx dlogtau_translation(const BirkhoffFactors& f, const SymmetryGenerator& Y);
cplx q_contour(const BirkhoffFactors& f);  // Y = d_x, h = l
cplx q_contour(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg);
cplx dlogtau_t(const BirkhoffFactors& f);  // Y = d_t, h = l^2
cplx dlogtau_t(const KdVSeed& seed, const SpacetimePoint& p, const KdVConfig& cfg);

struct KdVNode {
  bool bigcell = false;
  bool path_ok = false;
  cplx q = NAN;           // expansion formula
  cplx q_contour = NAN;   // contour formula
  cplx dlogtau_t = NAN;
  cplx log_tau = NAN;     // path (0,0) -> (x,0) -> (x,t)
  cplx log_tau_alt = NAN; // path (0,0) -> (0,t) -> (x,t)
  cplx u = NAN;           // -2 dq/dx, 4th-order differences
};

struct TauGrid {
  std::vector<double> xs, ts;
  std::vector<KdVNode> nodes;  // index ix * ts.size() + it
  int N = 0, M = 0;
  int path_evaluations = 0;

  const KdVNode& at(int ix, int it) const { return nodes[static_cast<size_t>(ix) * ts.size() + it]; }
  KdVNode& at(int ix, int it) { return nodes[static_cast<size_t>(ix) * ts.size() + it]; }
  int nx() const { return static_cast<int>(xs.size()); }
  int nt() const { return static_cast<int>(ts.size()); }
};

struct TauGridOptions {
  bool integrate = true;  // false: q, q_contour, dlogtau_t and u only
  bool strict = true;     // throw PathCrossesBadCellError instead of flagging
  bool alt_ordering = true;  // false: skip log_tau_alt (about half the path cost)
};

TauGrid tau_grid(const KdVSeed& seed, const std::vector<double>& xs, const std::vector<double>& ts,
                 const KdVConfig& cfg, const TauGridOptions& opts = {});

// max over interior nodes of |4u_t - u_xxx - 6 u u_x|, u = -2 q_x, all
// derivatives taken from q with 4th-order central differences. Needs a
// uniform grid with at least 7 nodes per axis.
double kdv_residual(const TauGrid& g);
// Same at one node; NaN when the stencil touches a non-big-cell node.
double kdv_residual_at(const TauGrid& g, int ix, int it);

// Residual at the centre node of a 7 x 7 q-only grid centred on
// (x, t) with spacing delta in both directions.
double kdv_residual_point(const KdVSeed& seed, double x, double t, double delta, const KdVConfig& cfg);

// Diagnostics over big-cell nodes.
double max_abs_q(const TauGrid& g);
double max_formula_gap(const TauGrid& g);            // |q - q_contour|
double max_dx_logtau_mismatch(const TauGrid& g);     // |D_x log tau - q|, 6th-order D_x
double max_dt_logtau_mismatch(const TauGrid& g);     // |D_t log tau - dlogtau_t|
double max_ordering_gap(const TauGrid& g);           // |log_tau - log_tau_alt|
double max_abs_logtau(const TauGrid& g);
int bad_node_count(const TauGrid& g);

std::vector<double> linspace(double lo, double hi, int count);

// Finite-difference weights for derivative `order` at x0 from nodes xs.
std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int order);

}  // namespace tauforge
