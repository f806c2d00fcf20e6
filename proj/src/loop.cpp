#include "tauforge/loop.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "tauforge/errors.hpp"

namespace tauforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(int k, int M) { return ((k % M) + M) % M; }

void check_same_grid(const MatrixLoop& a, const MatrixLoop& b, const char* op) {
  if (a.M() != b.M())
    throw std::invalid_argument(std::string(op) + ": sample counts differ");
}

}  // namespace

LoopSamples::LoopSamples(int n, int M)
    : n_(n), M_(M), data_(static_cast<size_t>(M) * n * n, cplx(0.0)) {
  if (n < 1 || M < 1) throw std::invalid_argument("LoopSamples: bad shape");
}

double LoopSamples::theta(int j, int M) { return kTwoPi * j / M; }

cplx LoopSamples::lambda(int j, int M) { return std::polar(1.0, theta(j, M)); }

cplx LoopSamples::coefficient(int k, int r, int c) const {
  cplx s = 0.0;
  const int kk = wrap(k, M_);
  for (int j = 0; j < M_; ++j) {
    // e^{-i k theta_j} taken from an exact index so large |k| stays accurate
    const int idx = static_cast<int>((static_cast<long long>(kk) * j) % M_);
    s += data_[static_cast<size_t>(j) * n_ * n_ + c * n_ + r] * std::polar(1.0, -theta(idx, M_));
  }
  return s / static_cast<double>(M_);
}

MatrixLoop::MatrixLoop(int n, int N, int M)
    : n_(n), N_(N), M_(M), c_(static_cast<size_t>(2 * N + 1) * n * n, cplx(0.0)) {
  if (n < 1 || N < 0) throw std::invalid_argument("MatrixLoop: bad shape");
  if (M < 2 * N + 1)
    throw std::invalid_argument("MatrixLoop: sample count " + std::to_string(M) +
                                " cannot resolve truncation " + std::to_string(N));
}

MatrixLoop MatrixLoop::identity(int n, int N, int M) {
  return constant(CMatrix::Identity(n, n), N, M);
}

MatrixLoop MatrixLoop::constant(const CMatrix& A, int N, int M) { return monomial(A, 0, N, M); }

MatrixLoop MatrixLoop::monomial(const CMatrix& A, int k, int N, int M) {
  if (A.rows() != A.cols()) throw std::invalid_argument("monomial: matrix not square");
  if (std::abs(k) > N) throw std::invalid_argument("monomial: mode outside truncation");
  MatrixLoop out(static_cast<int>(A.rows()), N, M);
  const int nn = out.n_ * out.n_;
  std::copy(A.data(), A.data() + nn, out.c_.begin() + static_cast<long>(k + N) * nn);
  return out;
}

MatrixLoop MatrixLoop::scalar_monomial(cplx a, int k, int N, int M) {
  CMatrix A(1, 1);
  A(0, 0) = a;
  return monomial(A, k, N, M);
}

MatrixLoop MatrixLoop::from_coeffs(int N, int M, const std::vector<CMatrix>& modes) {
  if (modes.size() != static_cast<size_t>(2 * N + 1))
    throw std::invalid_argument("from_coeffs: expected 2N+1 modes");
  const int n = static_cast<int>(modes[0].rows());
  MatrixLoop out(n, N, M);
  for (int k = -N; k <= N; ++k) {
    const CMatrix& A = modes[k + N];
    if (A.rows() != n || A.cols() != n) throw std::invalid_argument("from_coeffs: shape mismatch");
    std::copy(A.data(), A.data() + n * n, out.c_.begin() + static_cast<long>(k + N) * n * n);
  }
  return out;
}

MatrixLoop MatrixLoop::from_samples(const LoopSamples& s, int N, double tail_threshold) {
  const int n = s.n(), M = s.M();
  MatrixLoop out(n, N, M);
  std::vector<cplx> buf(M);
  double kept = 0.0, dropped = 0.0;
  std::vector<double> kept_mode(2 * N + 1, 0.0);
  std::vector<double> drop_mode(M, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int j = 0; j < M; ++j) buf[j] = s[j](r, c);
      detail::dft_inplace(buf.data(), M, -1);
      for (int idx = 0; idx < M; ++idx) {
        const int k = idx <= M / 2 ? idx : idx - M;
        const cplx v = buf[idx] / static_cast<double>(M);
        if (std::abs(k) <= N) {
          out.c_[static_cast<size_t>(k + N) * n * n + c * n + r] = v;
          kept_mode[k + N] += std::norm(v);
        } else {
          drop_mode[idx] += std::norm(v);
        }
      }
    }
  }
  for (double v : kept_mode) kept += std::sqrt(v);
  for (double v : drop_mode) dropped += std::sqrt(v);
  if (tail_threshold >= 0.0 && kept + dropped > 0.0) {
    const double share = dropped / (kept + dropped);
    if (share > tail_threshold)
      throw TailMassError("discarded mode mass " + std::to_string(share) +
                              " exceeds threshold at truncation " + std::to_string(N),
                          share);
  }
  return out;
}

MatrixLoop MatrixLoop::sample_function(int n, int N, int M,
                                       const std::function<CMatrix(cplx)>& f,
                                       double tail_threshold) {
  LoopSamples s(n, M);
  for (int j = 0; j < M; ++j) s[j] = f(LoopSamples::lambda(j, M));
  return from_samples(s, N, tail_threshold);
}

CMatrix MatrixLoop::coeff(int k) const {
  if (std::abs(k) > N_) return CMatrix::Zero(n_, n_);
  return Eigen::Map<const CMatrix>(mode_data(k), n_, n_);
}

const cplx* MatrixLoop::mode_data(int k) const {
  if (std::abs(k) > N_) return nullptr;
  return c_.data() + static_cast<size_t>(k + N_) * n_ * n_;
}

cplx MatrixLoop::scalar_coeff(int k) const {
  if (n_ != 1) throw std::invalid_argument("scalar_coeff on a matrix loop");
  return std::abs(k) > N_ ? cplx(0.0) : c_[k + N_];
}

LoopSamples MatrixLoop::samples() const {
  LoopSamples s(n_, M_);
  std::vector<cplx> buf(M_);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      std::fill(buf.begin(), buf.end(), cplx(0.0));
      for (int k = -N_; k <= N_; ++k) buf[wrap(k, M_)] += c_[static_cast<size_t>(k + N_) * n_ * n_ + c * n_ + r];
      detail::dft_inplace(buf.data(), M_, +1);
      for (int j = 0; j < M_; ++j) s[j](r, c) = buf[j];
    }
  }
  return s;
}

CMatrix MatrixLoop::eval(double theta) const {
  CMatrix out = CMatrix::Zero(n_, n_);
  for (int k = -N_; k <= N_; ++k)
    out += std::polar(1.0, k * theta) * Eigen::Map<const CMatrix>(mode_data(k), n_, n_);
  return out;
}

cplx MatrixLoop::eval_scalar(double theta) const {
  if (n_ != 1) throw std::invalid_argument("eval_scalar on a matrix loop");
  return eval(theta)(0, 0);
}

double MatrixLoop::tail_mass() const {
  double total = 0.0, tail = 0.0;
  for (int k = -N_; k <= N_; ++k) {
    const double m = Eigen::Map<const CMatrix>(mode_data(k), n_, n_).norm();
    total += m;
    if (2 * std::abs(k) > N_) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

bool MatrixLoop::satisfies(LoopTag t) const {
  if (t == kNoTag) return true;
  LoopSamples s = samples();
  for (int j = 0; j < M_; ++j) {
    if ((t & kUnimodular) && std::abs(s[j].determinant() - 1.0) > 1e-10) return false;
    if (t & kRealOnCircle) {
      if (n_ != 1) return false;
      if (std::abs(s[j](0, 0).imag()) > 1e-12) return false;
    }
  }
  return true;
}

MatrixLoop MatrixLoop::with_tag(LoopTag t) const {
  if (!satisfies(t))
    throw NumericalCheckError(t == kUnimodular ? "loop is not unimodular on the circle"
                                               : "loop is not real on the circle");
  MatrixLoop out = *this;
  out.tags_ |= t;
  return out;
}

MatrixLoop MatrixLoop::retruncated(int N2, double tail_threshold) const {
  if (N2 >= N_) {
    MatrixLoop out(n_, N2, M_);
    const int nn = n_ * n_;
    std::copy(c_.begin(), c_.end(), out.c_.begin() + static_cast<long>(N2 - N_) * nn);
    out.tags_ = tags_;
    return out;
  }
  double kept = 0.0, dropped = 0.0;
  for (int k = -N_; k <= N_; ++k) {
    const double m = Eigen::Map<const CMatrix>(mode_data(k), n_, n_).norm();
    (std::abs(k) <= N2 ? kept : dropped) += m;
  }
  if (tail_threshold >= 0.0 && kept + dropped > 0.0 && dropped / (kept + dropped) > tail_threshold)
    throw TailMassError("retruncation drops too much mass", dropped / (kept + dropped));
  MatrixLoop out(n_, N2, M_);
  const int nn = n_ * n_;
  std::copy(c_.begin() + static_cast<long>(N_ - N2) * nn,
            c_.begin() + static_cast<long>(N_ + N2 + 1) * nn, out.c_.begin());
  return out;
}

namespace {

template <class Op>
MatrixLoop combine(const MatrixLoop& a, const MatrixLoop& b, Op op) {
  check_same_grid(a, b, "add");
  if (a.n() != b.n()) throw std::invalid_argument("add: dimension mismatch");
  const int N = std::max(a.N(), b.N());
  std::vector<CMatrix> modes(2 * N + 1);
  for (int k = -N; k <= N; ++k) modes[k + N] = op(a.coeff(k), b.coeff(k));
  return MatrixLoop::from_coeffs(N, a.M(), modes);
}

}  // namespace

MatrixLoop operator+(const MatrixLoop& a, const MatrixLoop& b) {
  return combine(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x + y; });
}

MatrixLoop operator-(const MatrixLoop& a, const MatrixLoop& b) {
  return combine(a, b, [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x - y; });
}

MatrixLoop operator*(cplx s, const MatrixLoop& a) {
  std::vector<CMatrix> modes(2 * a.N() + 1);
  for (int k = -a.N(); k <= a.N(); ++k) modes[k + a.N()] = s * a.coeff(k);
  return MatrixLoop::from_coeffs(a.N(), a.M(), modes);
}

MatrixLoop multiply(const MatrixLoop& a, const MatrixLoop& b, double tail_threshold,
                    int result_trunc) {
  check_same_grid(a, b, "multiply");
  const int M = a.M();
  if (M < 2 * (a.N() + b.N()) + 1)
    throw std::invalid_argument("multiply: sample count too small to dealias the product");
  const bool broadcast_a = a.n() == 1 && b.n() > 1;
  const bool broadcast_b = b.n() == 1 && a.n() > 1;
  if (a.n() != b.n() && !broadcast_a && !broadcast_b)
    throw std::invalid_argument("multiply: dimension mismatch");
  const int n = std::max(a.n(), b.n());
  LoopSamples sa = a.samples(), sb = b.samples(), out(n, M);
  for (int j = 0; j < M; ++j) {
    if (broadcast_a)
      out[j] = sa[j](0, 0) * sb[j];
    else if (broadcast_b)
      out[j] = sb[j](0, 0) * sa[j];
    else
      out[j].noalias() = sa[j] * sb[j];
  }
  MatrixLoop r = MatrixLoop::from_samples(
      out, result_trunc >= 0 ? result_trunc : std::max(a.N(), b.N()), tail_threshold);
  if (a.has_tag(kUnimodular) && b.has_tag(kUnimodular) && r.satisfies(kUnimodular))
    r = r.with_tag(kUnimodular);
  return r;
}

MatrixLoop inverse(const MatrixLoop& a, double max_condition, double tail_threshold) {
  LoopSamples s = a.samples();
  for (int j = 0; j < a.M(); ++j) {
    Eigen::JacobiSVD<CMatrix> svd(s[j]);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : INFINITY;
    if (!(cond <= max_condition))
      throw SingularLoopError("loop not invertible at sample " + std::to_string(j) +
                              " (condition " + std::to_string(cond) + ")");
    s[j] = CMatrix(s[j]).inverse();
  }
  MatrixLoop r = MatrixLoop::from_samples(s, a.N(), tail_threshold);
  if (a.has_tag(kUnimodular) && r.satisfies(kUnimodular)) r = r.with_tag(kUnimodular);
  return r;
}

MatrixLoop project(const MatrixLoop& a, ModePart part) {
  std::vector<CMatrix> modes(2 * a.N() + 1);
  for (int k = -a.N(); k <= a.N(); ++k) {
    bool keep = false;
    switch (part) {
      case ModePart::strictly_positive: keep = k > 0; break;
      case ModePart::nonnegative: keep = k >= 0; break;
      case ModePart::strictly_negative: keep = k < 0; break;
      case ModePart::nonpositive: keep = k <= 0; break;
    }
    modes[k + a.N()] = keep ? a.coeff(k) : CMatrix::Zero(a.n(), a.n());
  }
  return MatrixLoop::from_coeffs(a.N(), a.M(), modes);
}

MatrixLoop derivative_theta(const MatrixLoop& a) {
  std::vector<CMatrix> modes(2 * a.N() + 1);
  for (int k = -a.N(); k <= a.N(); ++k) modes[k + a.N()] = cplx(0.0, k) * a.coeff(k);
  return MatrixLoop::from_coeffs(a.N(), a.M(), modes);
}

MatrixLoop derivative_lambda(const MatrixLoop& a) {
  const int N = a.N() + 1;
  std::vector<CMatrix> modes(2 * N + 1, CMatrix::Zero(a.n(), a.n()));
  // k c_k lambda^{k-1}
  for (int k = -a.N(); k <= a.N(); ++k) modes[k - 1 + N] = static_cast<double>(k) * a.coeff(k);
  return MatrixLoop::from_coeffs(N, a.M(), modes);
}

MatrixLoop exp_pointwise(const MatrixLoop& a, double tail_threshold) {
  LoopSamples s = a.samples();
  for (int j = 0; j < a.M(); ++j) s[j] = CMatrix(s[j]).exp();
  return MatrixLoop::from_samples(s, a.N(), tail_threshold);
}

MatrixLoop trace(const MatrixLoop& a) {
  std::vector<CMatrix> modes(2 * a.N() + 1, CMatrix(1, 1));
  for (int k = -a.N(); k <= a.N(); ++k) modes[k + a.N()](0, 0) = a.coeff(k).trace();
  return MatrixLoop::from_coeffs(a.N(), a.M(), modes);
}

MatrixLoop adjoint_on_circle(const MatrixLoop& a) {
  std::vector<CMatrix> modes(2 * a.N() + 1);
  for (int k = -a.N(); k <= a.N(); ++k) modes[k + a.N()] = a.coeff(-k).adjoint();
  return MatrixLoop::from_coeffs(a.N(), a.M(), modes);
}

MatrixLoop commutator(const MatrixLoop& a, const MatrixLoop& b, double tail_threshold) {
  return multiply(a, b, tail_threshold) - multiply(b, a, tail_threshold);
}

cplx contour_integral_dlambda(const MatrixLoop& f) {
  if (!f.is_scalar()) throw std::invalid_argument("contour_integral_dlambda: scalar loop expected");
  return cplx(0.0, kTwoPi) * f.scalar_coeff(-1);
}

CMatrix contour_integral_dlambda_entries(const MatrixLoop& f) {
  return cplx(0.0, kTwoPi) * f.coeff(-1);
}

double sup_norm(const MatrixLoop& a) {
  LoopSamples s = a.samples();
  double m = 0.0;
  for (int j = 0; j < a.M(); ++j) m = std::max(m, s[j].norm());
  return m;
}

double sup_norm_diff(const MatrixLoop& a, const MatrixLoop& b) { return sup_norm(a - b); }

double coefficient_distance(const MatrixLoop& a, const MatrixLoop& b) {
  const int N = std::max(a.N(), b.N());
  double m = 0.0;
  for (int k = -N; k <= N; ++k) m = std::max(m, (a.coeff(k) - b.coeff(k)).norm());
  return m;
}

}  // namespace tauforge
