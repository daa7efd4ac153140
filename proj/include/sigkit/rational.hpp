#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <Eigen/Core>

namespace sigkit {

/// Exact arbitrary-precision rational, always kept in canonical form.
///
/// A thin value type over GMP's mpq_class. GMP expression templates stay
/// inside this class so the type plays well as an Eigen scalar.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(const mpz_class& num, const mpz_class& den = 1);
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Parses "p/q", "p" or "-p/q". Rejects decimal points and exponents.
  static Rational parse(std::string_view text);

  const mpq_class& get() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }

  /// Nearest-below double (GMP truncates toward zero); relative error < 2^-52.
  double to_double() const { return q_.get_d(); }

  /// Canonical "num/den" form; integers keep an explicit "/1".
  std::string str() const;

  Rational& operator+=(const Rational& o) {
    q_ += o.q_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    q_ -= o.q_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    q_ *= o.q_;
    return *this;
  }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// n! as an exact integer.
mpz_class factorial(unsigned n);
/// Binomial coefficient C(n, k); zero when k > n.
mpz_class binomial(unsigned n, unsigned k);

/// Scalar conversion used by code templated on the scalar type.
template <class Scalar>
Scalar scalar_cast(const Rational& r);

template <>
inline Rational scalar_cast<Rational>(const Rational& r) {
  return r;
}

template <>
inline double scalar_cast<double>(const Rational& r) {
  return r.to_double();
}

}  // namespace sigkit

namespace Eigen {

template <>
struct NumTraits<sigkit::Rational> : GenericNumTraits<sigkit::Rational> {
  using Real = sigkit::Rational;
  using NonInteger = sigkit::Rational;
  using Nested = sigkit::Rational;
  using Literal = sigkit::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
