#include "iet/real.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>

#include "iet/error.hpp"

namespace iet {
namespace {

thread_local mpfr_prec_t working_bits = kDefaultPrecisionBits;

}  // namespace

WorkingPrecision::WorkingPrecision(mpfr_prec_t bits) : saved_(working_bits) {
  if (bits < MPFR_PREC_MIN || bits > 1 << 20) {
    throw Error(Errc::bad_argument, "precision out of range");
  }
  working_bits = bits;
}

WorkingPrecision::~WorkingPrecision() { working_bits = saved_; }

mpfr_prec_t WorkingPrecision::current() { return working_bits; }

Real::Real() {
  mpfr_init2(v_, working_bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(double v) {
  mpfr_init2(v_, working_bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(long v) {
  mpfr_init2(v_, working_bits);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

Real::Real(const mpz_class& v) {
  mpfr_init2(v_, working_bits);
  mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const mpq_class& v) {
  mpfr_init2(v_, working_bits);
  mpfr_set_q(v_, v.get_mpq_t(), MPFR_RNDN);
}

Real Real::from_string(const std::string& text) {
  Real r;
  if (mpfr_set_str(r.v_, text.c_str(), 10, MPFR_RNDN) != 0) {
    throw Error(Errc::parse_error, "not a decimal number: " + text);
  }
  return r;
}

Real Real::pi() {
  Real r;
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::infinity() {
  Real r;
  mpfr_set_inf(r.v_, 1);
  return r;
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

mpq_class Real::to_rational() const {
  if (!is_finite()) throw Error(Errc::bad_argument, "non-finite value has no rational form");
  mpz_class mant;
  const mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v_);
  mpq_class q(mant);
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  q.canonicalize();
  return q;
}

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* buf = nullptr;
  const std::string fmt = "%." + std::to_string(digits) + "Rg";
  mpfr_asprintf(&buf, fmt.c_str(), v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

// Results take the larger of the working precision and the operand precisions.
#define IET_REAL_BINOP(op, fn)                                                  \
  Real& Real::operator op(const Real& o) {                                      \
    const mpfr_prec_t p = std::max({working_bits, precision(), o.precision()}); \
    if (p != precision()) mpfr_prec_round(v_, p, MPFR_RNDN);                    \
    fn(v_, v_, o.v_, MPFR_RNDN);                                                \
    return *this;                                                               \
  }
IET_REAL_BINOP(+=, mpfr_add)
IET_REAL_BINOP(-=, mpfr_sub)
IET_REAL_BINOP(*=, mpfr_mul)
IET_REAL_BINOP(/=, mpfr_div)
#undef IET_REAL_BINOP

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

namespace {

template <typename Fn>
Real unary(const Real& x, Fn fn) {
  Real r;
  if (r.precision() < x.precision()) mpfr_set_prec(r.get(), x.precision());
  fn(r.get(), x.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }

Real floor(const Real& x) {
  Real r(x);
  mpfr_floor(r.v_, x.v_);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x);
  mpfr_mul_2si(r.v_, x.v_, e, MPFR_RNDN);
  return r;
}

Real Real::ulp() const {
  Real r;
  if (is_zero() || !is_finite()) {
    mpfr_set_ui_2exp(r.v_, 1, mpfr_get_emin(), MPFR_RNDN);
    return r;
  }
  mpfr_set_ui_2exp(r.v_, 1, mpfr_get_exp(v_) - precision() + 1, MPFR_RNDU);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

}  // namespace iet
