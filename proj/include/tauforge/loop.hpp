#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace tauforge {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultTrunc = 32;
inline constexpr int kDefaultSamples = 256;
inline constexpr double kDefaultTailThreshold = 1e-8;
inline constexpr double kDefaultInverseCondition = 1e10;

enum class ModePart { strictly_positive, nonnegative, strictly_negative, nonpositive };

enum LoopTag : unsigned {
  kNoTag = 0u,
  kUnimodular = 1u,    // |det - 1| <= 1e-10 at every sample
  kRealOnCircle = 2u,  // scalar loop, |Im| <= 1e-12 at every sample
};

// Point values on theta_j = 2 pi j / M, one column-major n x n block per sample.
class LoopSamples {
 public:
  LoopSamples(int n, int M);

  int n() const { return n_; }
  int M() const { return M_; }

  Eigen::Map<CMatrix> operator[](int j) {
    return Eigen::Map<CMatrix>(data_.data() + static_cast<size_t>(j) * n_ * n_, n_, n_);
  }
  Eigen::Map<const CMatrix> operator[](int j) const {
    return Eigen::Map<const CMatrix>(data_.data() + static_cast<size_t>(j) * n_ * n_, n_, n_);
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  static double theta(int j, int M);
  static cplx lambda(int j, int M);

  // Fourier coefficient k of entry (r, c), by direct summation over samples.
  cplx coefficient(int k, int r = 0, int c = 0) const;

 private:
  int n_;
  int M_;
  std::vector<cplx> data_;
};

// Truncated Fourier series sum_{k=-N}^{N} c_k lambda^k, lambda = e^{i theta}.
// Immutable once built. A loop with n == 1 doubles as a scalar loop.
class MatrixLoop {
 public:
  MatrixLoop() : MatrixLoop(1, 0, 1) {}
  MatrixLoop(int n, int N, int M = kDefaultSamples);

  static MatrixLoop identity(int n, int N, int M = kDefaultSamples);
  static MatrixLoop constant(const CMatrix& A, int N, int M = kDefaultSamples);
  static MatrixLoop monomial(const CMatrix& A, int k, int N, int M = kDefaultSamples);
  static MatrixLoop scalar_monomial(cplx a, int k, int N, int M = kDefaultSamples);
  // modes[k + N] is the coefficient of lambda^k.
  static MatrixLoop from_coeffs(int N, int M, const std::vector<CMatrix>& modes);
  // Keeps modes |k| <= N; throws TailMassError if the discarded share of the
  // coefficient mass exceeds tail_threshold (pass a negative value to skip).
  static MatrixLoop from_samples(const LoopSamples& s, int N,
                                 double tail_threshold = kDefaultTailThreshold);
  // Samples f(lambda_j) on the circle and transforms.
  static MatrixLoop sample_function(int n, int N, int M,
                                    const std::function<CMatrix(cplx)>& f,
                                    double tail_threshold = kDefaultTailThreshold);

  int n() const { return n_; }
  int N() const { return N_; }
  int M() const { return M_; }
  bool is_scalar() const { return n_ == 1; }

  CMatrix coeff(int k) const;
  // Pointer to the column-major block of mode k, nullptr when |k| > N.
  const cplx* mode_data(int k) const;
  cplx scalar_coeff(int k) const;

  LoopSamples samples() const;
  CMatrix eval(double theta) const;
  cplx eval_scalar(double theta) const;

  // sum_{|k| > N/2} |c_k| / sum_k |c_k|  (Frobenius norms); 0 for the zero loop.
  double tail_mass() const;

  unsigned tags() const { return tags_; }
  bool has_tag(LoopTag t) const { return (tags_ & t) != 0u; }
  // Copy carrying the tag; throws NumericalCheckError when the loop fails it.
  MatrixLoop with_tag(LoopTag t) const;
  bool satisfies(LoopTag t) const;

  // Same loop at truncation N2: pads with zeros, or drops modes with a tail check.
  MatrixLoop retruncated(int N2, double tail_threshold = kDefaultTailThreshold) const;

 private:
  int n_;
  int N_;
  int M_;
  unsigned tags_ = kNoTag;
  std::vector<cplx> c_;  // (2N+1) blocks of n*n
};

MatrixLoop operator+(const MatrixLoop& a, const MatrixLoop& b);
MatrixLoop operator-(const MatrixLoop& a, const MatrixLoop& b);
MatrixLoop operator*(cplx s, const MatrixLoop& a);

// Dealiased product, truncated to result_trunc (default max(Na, Nb); Na + Nb
// keeps it exact). A scalar loop times a matrix loop broadcasts.
MatrixLoop multiply(const MatrixLoop& a, const MatrixLoop& b,
                    double tail_threshold = kDefaultTailThreshold, int result_trunc = -1);
MatrixLoop inverse(const MatrixLoop& a, double max_condition = kDefaultInverseCondition,
                   double tail_threshold = kDefaultTailThreshold);
MatrixLoop project(const MatrixLoop& a, ModePart part);
MatrixLoop derivative_theta(const MatrixLoop& a);
// d/d lambda; the result has truncation N + 1 (mode -N-1 appears).
MatrixLoop derivative_lambda(const MatrixLoop& a);
MatrixLoop exp_pointwise(const MatrixLoop& a, double tail_threshold = kDefaultTailThreshold);
MatrixLoop trace(const MatrixLoop& a);
// a(theta)^* on the circle: mode k of the result is c_{-k}^H.
MatrixLoop adjoint_on_circle(const MatrixLoop& a);
MatrixLoop commutator(const MatrixLoop& a, const MatrixLoop& b,
                      double tail_threshold = kDefaultTailThreshold);

// Counterclockwise contour integral over |lambda| = 1 of f d lambda = 2 pi i c_{-1}.
cplx contour_integral_dlambda(const MatrixLoop& f);
CMatrix contour_integral_dlambda_entries(const MatrixLoop& f);

// max_j ||a(theta_j)||_F
double sup_norm(const MatrixLoop& a);
double sup_norm_diff(const MatrixLoop& a, const MatrixLoop& b);
double coefficient_distance(const MatrixLoop& a, const MatrixLoop& b);

}  // namespace tauforge
