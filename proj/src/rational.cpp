#include "tauforge/rational.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tauforge {

Polynomial::Polynomial(std::vector<cplx> c) : c_(std::move(c)) { trim(); }

Polynomial Polynomial::monomial(cplx a, int degree) {
  std::vector<cplx> c(degree + 1, cplx(0.0));
  c[degree] = a;
  return Polynomial(c);
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
}

cplx Polynomial::operator()(cplx z) const {
  cplx s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * z + *it;
  return s;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<cplx> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(d);
}

std::vector<cplx> Polynomial::roots() const {
  const int d = degree();
  if (d <= 0) return {};
  if (d == 1) return {-c_[0] / c_[1]};
  if (d == 2) {
    const cplx a = c_[2], b = c_[1], c = c_[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    // pick the sign that avoids cancellation
    const cplx q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
    if (q == cplx(0.0)) return {0.0, 0.0};
    return {q / a, c / q};
  }
  CMatrix comp = CMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c_[i] / c_[d];
  Eigen::ComplexEigenSolver<CMatrix> es(comp);
  std::vector<cplx> r(d);
  for (int i = 0; i < d; ++i) r[i] = es.eigenvalues()(i);
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), cplx(0.0));
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Polynomial(c);
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + cplx(-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, cplx(0.0));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(c);
}

Polynomial operator*(cplx s, const Polynomial& a) {
  std::vector<cplx> c = a.c_;
  for (auto& v : c) v *= s;
  return Polynomial(c);
}

Rational::Rational(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::invalid_argument("Rational: zero denominator");
  if (den_.degree() == 0) {
    num_ = (1.0 / den_.coeffs()[0]) * num_;
    den_ = Polynomial::constant(1.0);
  }
}

cplx Rational::operator()(cplx z) const { return num_(z) / den_(z); }

std::vector<cplx> Rational::poles() const {
  std::vector<cplx> out;
  for (const cplx& r : den_.roots())
    if (std::abs(num_(r)) > 1e-12 * std::max(1.0, std::abs(r))) out.push_back(r);
  return out;
}

cplx Rational::residue(cplx z0) const {
  const double scale = std::max(1.0, std::abs(z0));
  if (std::abs(den_(z0)) > 1e-12 * scale) return 0.0;
  const cplx d1 = den_.derivative()(z0);
  if (std::abs(d1) <= 1e-12 * scale) {
    if (std::abs(num_(z0)) <= 1e-12 * scale) throw std::domain_error("residue: removable/higher-order point not supported");
    throw std::domain_error("residue: pole is not simple");
  }
  return num_(z0) / d1;
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_.coeffs() == b.den_.coeffs()) return Rational(a.num_ + b.num_, a.den_);
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(cplx s, const Rational& a) { return Rational(s * a.num_, a.den_); }

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k <= p.degree(); ++k) {
    const cplx c = p.coeffs()[k];
    if (c == cplx(0.0)) continue;
    if (!first) os << " + ";
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    if (k >= 1) os << "*l";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  return os.str();
}

std::string to_string(const Rational& r) {
  if (r.is_polynomial()) return to_string(r.num());
  return "[" + to_string(r.num()) + "] / [" + to_string(r.den()) + "]";
}

MatrixLoop restrict_to_circle(const Rational& r, int N, int M, double tail_threshold) {
  for (const cplx& p : r.poles())
    if (std::abs(std::abs(p) - 1.0) < 1e-8) throw std::domain_error("pole on the unit circle");
  return MatrixLoop::sample_function(
      1, N, M, [&](cplx l) { return CMatrix::Constant(1, 1, r(l)); }, tail_threshold);
}

}  // namespace tauforge
