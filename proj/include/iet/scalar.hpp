#pragma once

#include <compare>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "iet/real.hpp"

namespace iet {

enum class ScalarKind { rational, quadratic, floating };

/// Element of Q, of a real quadratic field Q(sqrt D), or a float ball.
///
/// Exact values are kept canonical: (a + b*sqrt(D)) / q with q > 0 and
/// gcd(a, b, q) = 1; a quadratic value whose b vanishes collapses to the
/// rational kind. Rationals mix freely with any field; two quadratic values
/// from different fields do not (FieldMismatch).
///
/// Floats carry a midpoint and an error radius. Any decision (sign, order,
/// equality) that the radius does not certify raises PrecisionExhausted.
class Scalar {
 public:
  Scalar() = default;
  static Scalar integer(long v);
  static Scalar rational(const mpz_class& num, const mpz_class& den);
  static Scalar rational(const mpq_class& v);
  static Scalar quadratic(const mpz_class& a, const mpz_class& b, const mpz_class& q, long d);
  static Scalar floating(const Real& mid, const Real& radius);
  /// Ball around `mid` with radius one ulp.
  static Scalar floating(const Real& mid);
  /// Exact rational from a decimal literal such as "0.25", "-3/7" or "1e-5".
  static Scalar parse_exact(const std::string& text);

  ScalarKind kind() const { return kind_; }
  bool is_exact() const { return kind_ != ScalarKind::floating; }
  /// Square-free radicand; 0 for rationals and floats.
  long field() const { return d_; }
  const mpz_class& a() const { return a_; }
  const mpz_class& b() const { return b_; }
  const mpz_class& q() const { return q_; }
  mpq_class rational_value() const;

  /// Midpoint at the working precision (exact values are rounded once).
  Real value() const;
  /// Error radius; zero for exact values.
  Real radius() const;
  double to_double() const { return value().to_double(); }

  int sign() const;
  bool is_zero() const { return sign() == 0; }

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  Scalar operator-() const;

  friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
  friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
  friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
  friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }

  friend bool operator==(const Scalar& x, const Scalar& y);
  friend std::strong_ordering operator<=>(const Scalar& x, const Scalar& y);

  mpz_class floor() const;
  /// Fractional part {x} in [0, 1).
  Scalar frac() const;

  /// Canonical text; exact values round-trip, e.g. "(3+-1*sqrt(5))/2".
  std::string str() const;

 private:
  void canonicalize();
  Scalar as_float() const;

  ScalarKind kind_ = ScalarKind::rational;
  mpz_class a_ = 0;
  mpz_class b_ = 0;
  mpz_class q_ = 1;
  long d_ = 0;
  struct Ball {
    Real mid;
    Real rad;
  };
  std::optional<Ball> ball_;
};

Scalar abs(const Scalar& x);
Scalar min(const Scalar& x, const Scalar& y);
Scalar max(const Scalar& x, const Scalar& y);

bool is_square_free(long d);

}  // namespace iet
