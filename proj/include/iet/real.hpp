#pragma once

#include <compare>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace iet {

/// Multiple-precision binary float (MPFR). New values are created at the
/// calling thread's working precision; see `WorkingPrecision`.
class Real {
 public:
  Real();
  Real(double v);  // NOLINT(google-explicit-constructor)
  explicit Real(long v);
  explicit Real(const mpz_class& v);
  explicit Real(const mpq_class& v);
  static Real from_string(const std::string& text);
  static Real pi();
  static Real infinity();

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Exact conversion to a rational (finite values only).
  mpq_class to_rational() const;
  /// Decimal rendering with `digits` significant digits; deterministic.
  std::string str(int digits = 20) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  friend Real abs(const Real& x);
  friend Real log(const Real& x);
  friend Real sin(const Real& x);
  friend Real cos(const Real& x);
  friend Real sqrt(const Real& x);
  friend Real floor(const Real& x);
  friend Real ldexp(const Real& x, long e);

  /// Upper bound on one unit in the last place of `*this`.
  Real ulp() const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real sqrt(const Real& x);
Real floor(const Real& x);
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

/// RAII: sets the calling thread's working precision (bits) for new Reals.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(mpfr_prec_t bits);
  ~WorkingPrecision();
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

  static mpfr_prec_t current();

 private:
  mpfr_prec_t saved_;
};

inline constexpr mpfr_prec_t kDefaultPrecisionBits = 200;

}  // namespace iet
