#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tauforge/loop.hpp"

namespace tauforge {

// Coefficients in ascending powers. Trailing zeros are trimmed.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> c);
  static Polynomial constant(cplx a) { return Polynomial({a}); }
  static Polynomial monomial(cplx a, int degree);

  const std::vector<cplx>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  cplx operator()(cplx z) const;
  Polynomial derivative() const;
  std::vector<cplx> roots() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(cplx s, const Polynomial& a);

 private:
  void trim();
  std::vector<cplx> c_;
};

class Rational {
 public:
  Rational() : num_(), den_(Polynomial::constant(1.0)) {}
  Rational(Polynomial num, Polynomial den);
  explicit Rational(Polynomial p) : Rational(std::move(p), Polynomial::constant(1.0)) {}

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }

  cplx operator()(cplx z) const;
  std::vector<cplx> poles() const;
  // Residue at a simple pole z0 (0 if z0 is not a pole); throws for higher order.
  cplx residue(cplx z0) const;

  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator*(cplx s, const Rational& a);

 private:
  Polynomial num_;
  Polynomial den_;
};

std::string to_string(const Polynomial& p);
std::string to_string(const Rational& r);

// Samples r on |lambda| = 1 into a scalar loop. Throws std::domain_error if a
// pole lies on the circle; TailMassError if N cannot resolve it.
MatrixLoop restrict_to_circle(const Rational& r, int N, int M,
                              double tail_threshold = kDefaultTailThreshold);

}  // namespace tauforge
