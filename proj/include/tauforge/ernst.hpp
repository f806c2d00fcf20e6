#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tauforge/loop.hpp"
#include "tauforge/twistor.hpp"

namespace tauforge {

struct WeylPotential {
  double psi = 0.0, psi_r = 0.0, psi_z = 0.0, psi_rr = 0.0, psi_zz = 0.0;
};

// J(r, z) = diag(r e^psi, -r e^-psi), det J = -r^2.
struct ErnstSolution {
  std::string description;
  std::function<WeylPotential(double r, double z)> psi;

  static ErnstSolution flat();
  static ErnstSolution kasner(double a);                  // psi = a log r
  static ErnstSolution point_source(double a, double z0); // psi = a / sqrt(r^2 + (z - z0)^2)
  static ErnstSolution linear_r();                        // psi = r, not a solution
  static ErnstSolution product_rz();                      // psi = r z, not a solution
};

struct JField {
  CMatrix J, Jr, Jz, Jrr, Jzz;
};
JField j_field(const ErnstSolution& sol, double r, double z);

// psi_rr + psi_r / r + psi_zz
double harmonicity_residual(const ErnstSolution& sol, double r, double z);

// || (1/r) d_r (r J^-1 J_r) + d_z (J^-1 J_z) ||_F
double field_residual(const ErnstSolution& sol, double r, double z);

// d_w log tau = (i r / 2) tr((J^-1 d_w J)^2), d_wbar log tau = -(i r / 2) tr((J^-1 d_wbar J)^2),
// d_w = (d_z - i d_r) / 2, d_wbar = (d_z + i d_r) / 2.
cplx dlogtau(const ErnstSolution& sol, double r, double z, ErnstDirection dir);
cplx dlogtau_r(const ErnstSolution& sol, double r, double z);  // i (d_w - d_wbar)
cplx dlogtau_z(const ErnstSolution& sol, double r, double z);  // d_w + d_wbar

struct ResidueRoute {
  cplx direct;         // dlogtau(wbar)
  cplx residue;        // residue of the frame coefficient at its pole
  cplx via_residue;    // (i / 4 pi) 2 pi i Res{coef tr((P^-1 dP)^2)} with dP = r J^-1 d_wbar J P
  double mismatch;     // |direct - via_residue|
};
ResidueRoute residue_route(const ErnstSolution& sol, double r, double z);
double residue_check(const ErnstSolution& sol, double r, double z);

// log(r Omega^2) derivatives for the Weyl class
double log_r_omega2_r(const ErnstSolution& sol, double r, double z);
double log_r_omega2_z(const ErnstSolution& sol, double r, double z);

struct ErnstNode {
  cplx dlogtau_w = NAN, dlogtau_wbar = NAN;
  double log_tau = NAN;
  double log_r_omega2 = NAN;
  double field_residual = NAN;
  double candidate1 = NAN;  // log tau - log(r Omega^2)
  double candidate2 = NAN;  // log tau + log(r^2 Omega)
};

struct ErnstTauField {
  std::vector<double> rs, zs;
  std::vector<ErnstNode> nodes;  // index ir * zs.size() + iz
  double r0 = 1.0, z0 = 0.0;
  double max_imag_logtau = 0.0;

  const ErnstNode& at(int ir, int iz) const { return nodes[static_cast<size_t>(ir) * zs.size() + iz]; }
  ErnstNode& at(int ir, int iz) { return nodes[static_cast<size_t>(ir) * zs.size() + iz]; }
};

// Integrates d log tau from (r0, z0) along z = z0 to r, then along z, with
// per-interval Romberg to path_tol. Throws NumericalCheckError when log tau
// picks up an imaginary part above 1e-9.
ErnstTauField logtau_field(const ErnstSolution& sol, const std::vector<double>& rs,
                           const std::vector<double>& zs, double path_tol = 1e-12,
                           int threads = 1, double r0 = 1.0, double z0 = 0.0);

struct ConformalReport {
  double std_candidate1 = NAN;  // grid standard deviation of log tau - log(r Omega^2)
  double std_candidate2 = NAN;  // of log tau + log(r^2 Omega)
  int constant_candidate = 0;   // 1, 2, or 0 when neither is constant to tol
  double tol = 1e-7;
};
ConformalReport conformal_factor_check(const ErnstTauField& field, double tol = 1e-7);

// Counterclockwise integral of d log tau around [r1, r2] x [z1, z2].
cplx rectangle_loop_integral(const ErnstSolution& sol, double r1, double r2, double z1, double z2,
                             double tol = 1e-13);

}  // namespace tauforge
