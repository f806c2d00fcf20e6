#include "tauforge/ernst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tauforge/errors.hpp"
#include "tauforge/parallel.hpp"
#include "tauforge/quadrature.hpp"

namespace tauforge {

namespace {

constexpr cplx I(0.0, 1.0);

CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

void require_r(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("Ernst fields need r > 0");
}

// Integral of f from origin to each coords entry; coords need not contain origin.
std::vector<cplx> cumulative(const std::vector<double>& coords, double origin,
                             const std::function<cplx(double)>& f, double tol) {
  std::vector<cplx> out(coords.size());
  for (size_t i = 0; i < coords.size(); ++i) {
    // split at grid points between origin and target so intervals stay short
    std::vector<double> bp{origin};
    const double target = coords[i];
    for (double c : coords)
      if ((c - origin) * (target - c) > 0.0) bp.push_back(c);
    bp.push_back(target);
    std::sort(bp.begin(), bp.end());
    if (target < origin) std::reverse(bp.begin(), bp.end());
    cplx acc = 0.0;
    for (size_t k = 1; k < bp.size(); ++k) {
      if (bp[k] == bp[k - 1]) continue;
      const RombergResult r = romberg(f, bp[k - 1], bp[k], f(bp[k - 1]), f(bp[k]), tol, 14);
      if (!r.converged) throw NumericalCheckError("Ernst path integration did not converge");
      acc += r.value;
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

ErnstSolution ErnstSolution::flat() {
  return {"flat", [](double, double) { return WeylPotential{}; }};
}

ErnstSolution ErnstSolution::kasner(double a) {
  return {"kasner a=" + std::to_string(a), [a](double r, double) {
            WeylPotential p;
            p.psi = a * std::log(r);
            p.psi_r = a / r;
            p.psi_rr = -a / (r * r);
            return p;
          }};
}

ErnstSolution ErnstSolution::point_source(double a, double z0) {
  return {"point a=" + std::to_string(a) + " z0=" + std::to_string(z0), [a, z0](double r, double z) {
            const double dz = z - z0;
            const double rho2 = r * r + dz * dz, rho = std::sqrt(rho2);
            const double rho3 = rho2 * rho, rho5 = rho3 * rho2;
            WeylPotential p;
            p.psi = a / rho;
            p.psi_r = -a * r / rho3;
            p.psi_z = -a * dz / rho3;
            p.psi_rr = -a / rho3 + 3.0 * a * r * r / rho5;
            p.psi_zz = -a / rho3 + 3.0 * a * dz * dz / rho5;
            return p;
          }};
}

ErnstSolution ErnstSolution::linear_r() {
  return {"linear psi=r", [](double r, double) {
            WeylPotential p;
            p.psi = r;
            p.psi_r = 1.0;
            return p;
          }};
}

ErnstSolution ErnstSolution::product_rz() {
  return {"product psi=rz", [](double r, double z) {
            WeylPotential p;
            p.psi = r * z;
            p.psi_r = z;
            p.psi_z = r;
            return p;
          }};
}

JField j_field(const ErnstSolution& sol, double r, double z) {
  require_r(r);
  const WeylPotential p = sol.psi(r, z);
  const double ep = std::exp(p.psi), em = std::exp(-p.psi);
  JField f;
  f.J = diag2(r * ep, -r * em);
  f.Jr = diag2(ep * (1.0 + r * p.psi_r), -em * (1.0 - r * p.psi_r));
  f.Jz = diag2(r * p.psi_z * ep, r * p.psi_z * em);
  f.Jrr = diag2(ep * (2.0 * p.psi_r + r * p.psi_r * p.psi_r + r * p.psi_rr),
                em * (2.0 * p.psi_r - r * p.psi_r * p.psi_r + r * p.psi_rr));
  f.Jzz = diag2(r * ep * (p.psi_z * p.psi_z + p.psi_zz), -r * em * (p.psi_z * p.psi_z - p.psi_zz));
  return f;
}

double harmonicity_residual(const ErnstSolution& sol, double r, double z) {
  require_r(r);
  const WeylPotential p = sol.psi(r, z);
  return p.psi_rr + p.psi_r / r + p.psi_zz;
}

double field_residual(const ErnstSolution& sol, double r, double z) {
  const JField f = j_field(sol, r, z);
  const CMatrix Ji = f.J.inverse();
  const CMatrix Ar = Ji * f.Jr, Az = Ji * f.Jz;
  // (1/r) d_r(r J^-1 J_r) + d_z(J^-1 J_z)
  const CMatrix lhs = (Ar + r * (-Ar * Ar + Ji * f.Jrr)) / r + (-Az * Az + Ji * f.Jzz);
  return lhs.norm();
}

cplx dlogtau(const ErnstSolution& sol, double r, double z, ErnstDirection dir) {
  const JField f = j_field(sol, r, z);
  const CMatrix Ji = f.J.inverse();
  if (dir == ErnstDirection::w) {
    const CMatrix A = Ji * (0.5 * (f.Jz - I * f.Jr));
    return (I * r / 2.0) * (A * A).trace();
  }
  const CMatrix A = Ji * (0.5 * (f.Jz + I * f.Jr));
  return -(I * r / 2.0) * (A * A).trace();
}

cplx dlogtau_r(const ErnstSolution& sol, double r, double z) {
  return I * (dlogtau(sol, r, z, ErnstDirection::w) - dlogtau(sol, r, z, ErnstDirection::wbar));
}

cplx dlogtau_z(const ErnstSolution& sol, double r, double z) {
  return dlogtau(sol, r, z, ErnstDirection::w) + dlogtau(sol, r, z, ErnstDirection::wbar);
}

ResidueRoute residue_route(const ErnstSolution& sol, double r, double z) {
  const JField f = j_field(sol, r, z);
  const DirectionDecomposition frame = ernst_frame(r, z, ErnstDirection::wbar);
  ResidueRoute out;
  out.direct = dlogtau(sol, r, z, ErnstDirection::wbar);
  out.residue = frame.v_coeff.residue(*frame.pole);
  // any invertible value of P at the pole; the trace is conjugation invariant
  CMatrix P(2, 2);
  P << 1.0, 0.3, -0.2, 1.1;
  const CMatrix dP = r * f.J.inverse() * (0.5 * (f.Jz + I * f.Jr)) * P;
  const CMatrix A = P.inverse() * dP;
  out.via_residue = (I / (4.0 * std::numbers::pi)) * (2.0 * std::numbers::pi * I) * out.residue * (A * A).trace();
  out.mismatch = std::abs(out.direct - out.via_residue);
  return out;
}

double residue_check(const ErnstSolution& sol, double r, double z) {
  return residue_route(sol, r, z).mismatch;
}

double log_r_omega2_r(const ErnstSolution& sol, double r, double z) {
  require_r(r);
  const WeylPotential p = sol.psi(r, z);
  return 0.5 / r + 0.5 * r * (p.psi_r * p.psi_r - p.psi_z * p.psi_z);
}

double log_r_omega2_z(const ErnstSolution& sol, double r, double z) {
  require_r(r);
  const WeylPotential p = sol.psi(r, z);
  return r * p.psi_r * p.psi_z;
}

ErnstTauField logtau_field(const ErnstSolution& sol, const std::vector<double>& rs,
                           const std::vector<double>& zs, double path_tol, int threads, double r0,
                           double z0) {
  for (double r : rs) require_r(r);
  require_r(r0);
  ErnstTauField field;
  field.rs = rs;
  field.zs = zs;
  field.r0 = r0;
  field.z0 = z0;
  const int nr = static_cast<int>(rs.size()), nz = static_cast<int>(zs.size());
  field.nodes.assign(static_cast<size_t>(nr) * nz, ErnstNode{});

  const std::vector<cplx> tau_r = cumulative(
      rs, r0, [&](double s) { return dlogtau_r(sol, s, z0); }, path_tol);
  const std::vector<cplx> L_r = cumulative(
      rs, r0, [&](double s) { return cplx(log_r_omega2_r(sol, s, z0)); }, path_tol);

  std::vector<double> imag_max(nr, 0.0);
  parallel_for(nr, threads, [&](int ir) {
    const double r = rs[ir];
    const std::vector<cplx> tau_z = cumulative(
        zs, z0, [&](double s) { return dlogtau_z(sol, r, s); }, path_tol);
    const std::vector<cplx> L_z = cumulative(
        zs, z0, [&](double s) { return cplx(log_r_omega2_z(sol, r, s)); }, path_tol);
    for (int iz = 0; iz < nz; ++iz) {
      ErnstNode& n = field.at(ir, iz);
      const double z = zs[iz];
      const cplx lt = tau_r[ir] + tau_z[iz];
      imag_max[ir] = std::max(imag_max[ir], std::abs(lt.imag()));
      n.log_tau = lt.real();
      n.log_r_omega2 = (L_r[ir] + L_z[iz]).real();
      n.dlogtau_w = dlogtau(sol, r, z, ErnstDirection::w);
      n.dlogtau_wbar = dlogtau(sol, r, z, ErnstDirection::wbar);
      n.field_residual = field_residual(sol, r, z);
      n.candidate1 = n.log_tau - n.log_r_omega2;
      // log(r^2 Omega) = (3/2) log r + (1/2) log(r Omega^2)
      n.candidate2 = n.log_tau + 1.5 * std::log(r) + 0.5 * n.log_r_omega2;
    }
  });
  for (double v : imag_max) field.max_imag_logtau = std::max(field.max_imag_logtau, v);
  if (field.max_imag_logtau > 1e-9)
    throw NumericalCheckError("log tau has imaginary part " + std::to_string(field.max_imag_logtau) +
                              " for a real J");
  return field;
}

ConformalReport conformal_factor_check(const ErnstTauField& field, double tol) {
  auto stddev = [&](double ErnstNode::*m) {
    double s = 0.0, s2 = 0.0;
    for (const auto& n : field.nodes) s += n.*m;
    const double mean = s / static_cast<double>(field.nodes.size());
    for (const auto& n : field.nodes) s2 += (n.*m - mean) * (n.*m - mean);
    return std::sqrt(s2 / static_cast<double>(field.nodes.size()));
  };
  ConformalReport rep;
  rep.tol = tol;
  rep.std_candidate1 = stddev(&ErnstNode::candidate1);
  rep.std_candidate2 = stddev(&ErnstNode::candidate2);
  if (rep.std_candidate1 <= tol && rep.std_candidate2 > tol)
    rep.constant_candidate = 1;
  else if (rep.std_candidate2 <= tol && rep.std_candidate1 > tol)
    rep.constant_candidate = 2;
  return rep;
}

cplx rectangle_loop_integral(const ErnstSolution& sol, double r1, double r2, double z1, double z2,
                             double tol) {
  auto leg = [&](const std::function<cplx(double)>& f, double a, double b) {
    const RombergResult r = romberg(f, a, b, f(a), f(b), tol, 14);
    if (!r.converged) throw NumericalCheckError("rectangle integral did not converge");
    return r.value;
  };
  const cplx bottom = leg([&](double s) { return dlogtau_r(sol, s, z1); }, r1, r2);
  const cplx right = leg([&](double s) { return dlogtau_z(sol, r2, s); }, z1, z2);
  const cplx top = leg([&](double s) { return dlogtau_r(sol, s, z2); }, r2, r1);
  const cplx left = leg([&](double s) { return dlogtau_z(sol, r1, s); }, z2, z1);
  return bottom + right + top + left;
}

}  // namespace tauforge
