#include "iet/scalar.hpp"

#include <algorithm>
#include <cctype>

#include "iet/error.hpp"

namespace iet {
namespace {

mpz_class gcd3(const mpz_class& a, const mpz_class& b, const mpz_class& c) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

long join_fields(long x, long y) {
  if (x != 0 && y != 0 && x != y) {
    throw Error(Errc::field_mismatch,
                "Q(sqrt " + std::to_string(x) + ") and Q(sqrt " + std::to_string(y) + ") mixed");
  }
  return x != 0 ? x : y;
}

[[noreturn]] void uncertain(const char* what) {
  throw Error(Errc::precision_exhausted, std::string("float ball does not certify ") + what);
}

// Rounding slack added to every float-ball operation.
Real slack(const Real& mid) { return ldexp(mid.ulp(), 1); }

}  // namespace

bool is_square_free(long d) {
  if (d <= 1) return false;
  for (long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

Scalar Scalar::integer(long v) {
  Scalar s;
  s.a_ = v;
  return s;
}

Scalar Scalar::rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw Error(Errc::division_by_zero, "zero denominator");
  Scalar s;
  s.a_ = num;
  s.q_ = den;
  s.canonicalize();
  return s;
}

Scalar Scalar::rational(const mpq_class& v) { return rational(v.get_num(), v.get_den()); }

Scalar Scalar::quadratic(const mpz_class& a, const mpz_class& b, const mpz_class& q, long d) {
  if (q == 0) throw Error(Errc::division_by_zero, "zero denominator");
  if (!is_square_free(d)) {
    throw Error(Errc::bad_argument, "radicand must be square-free and > 1: " + std::to_string(d));
  }
  Scalar s;
  s.kind_ = ScalarKind::quadratic;
  s.a_ = a;
  s.b_ = b;
  s.q_ = q;
  s.d_ = d;
  s.canonicalize();
  return s;
}

Scalar Scalar::floating(const Real& mid, const Real& radius) {
  if (!mid.is_finite() || !radius.is_finite() || radius.sign() < 0) {
    throw Error(Errc::bad_argument, "float ball needs finite midpoint and radius >= 0");
  }
  Scalar s;
  s.kind_ = ScalarKind::floating;
  s.a_ = 0;
  s.q_ = 1;
  s.ball_ = Ball{mid, radius};
  return s;
}

Scalar Scalar::floating(const Real& mid) { return floating(mid, mid.ulp()); }

Scalar Scalar::parse_exact(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  }
  if (t.empty()) throw Error(Errc::parse_error, "empty number");
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    try {
      return rational(mpz_class(t.substr(0, slash), 10), mpz_class(t.substr(slash + 1), 10));
    } catch (const std::invalid_argument&) {
      throw Error(Errc::parse_error, "bad fraction: " + text);
    }
  }
  long exponent = 0;
  std::string mant = t;
  if (const auto e = t.find_first_of("eE"); e != std::string::npos) {
    mant = t.substr(0, e);
    try {
      exponent = std::stol(t.substr(e + 1));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "bad exponent: " + text);
    }
  }
  bool negative = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    negative = mant[0] == '-';
    mant.erase(0, 1);
  }
  std::string digits;
  bool seen_point = false;
  for (char ch : mant) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw Error(Errc::parse_error, "not a decimal number: " + text);
    }
    digits.push_back(ch);
    if (seen_point) --exponent;
  }
  if (digits.empty()) throw Error(Errc::parse_error, "not a decimal number: " + text);
  mpz_class num(digits, 10);
  if (negative) num = -num;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  return exponent >= 0 ? rational(num * ten_pow, 1) : rational(num, ten_pow);
}

void Scalar::canonicalize() {
  if (q_ < 0) {
    a_ = -a_;
    b_ = -b_;
    q_ = -q_;
  }
  if (b_ == 0) {
    kind_ = ScalarKind::rational;
    d_ = 0;
  }
  const mpz_class g = gcd3(a_, b_, q_);
  if (g != 1 && g != 0) {
    mpz_divexact(a_.get_mpz_t(), a_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(b_.get_mpz_t(), b_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(q_.get_mpz_t(), q_.get_mpz_t(), g.get_mpz_t());
  }
}

mpq_class Scalar::rational_value() const {
  if (kind_ != ScalarKind::rational) throw Error(Errc::bad_argument, "not a rational scalar");
  return mpq_class(a_, q_);
}

Real Scalar::value() const {
  switch (kind_) {
    case ScalarKind::rational:
      return Real(mpq_class(a_, q_));
    case ScalarKind::quadratic: {
      const mpfr_prec_t target = WorkingPrecision::current();
      const auto guard = static_cast<mpfr_prec_t>(
          64 + std::max(mpz_sizeinbase(a_.get_mpz_t(), 2), mpz_sizeinbase(b_.get_mpz_t(), 2)));
      Real wide;
      {
        WorkingPrecision wp(target + guard);
        wide = (Real(a_) + Real(b_) * sqrt(Real(d_))) / Real(q_);
      }
      Real out;
      mpfr_set(out.get(), wide.get(), MPFR_RNDN);
      return out;
    }
    case ScalarKind::floating:
      return ball_->mid;
  }
  return Real();
}

Real Scalar::radius() const {
  if (kind_ == ScalarKind::floating) return ball_->rad;
  return Real(0.0);
}

Scalar Scalar::as_float() const {
  if (kind_ == ScalarKind::floating) return *this;
  const Real mid = value();
  if (kind_ == ScalarKind::rational && mid.to_rational() == mpq_class(a_, q_)) {
    return floating(mid, Real(0.0));
  }
  return floating(mid, ldexp(mid.ulp(), 1));
}

int Scalar::sign() const {
  switch (kind_) {
    case ScalarKind::rational:
      return sgn(a_);
    case ScalarKind::quadratic: {
      const int sa = sgn(a_);
      const int sb = sgn(b_);
      if (sa >= 0 && sb >= 0) return (sa > 0 || sb > 0) ? 1 : 0;
      if (sa <= 0 && sb <= 0) return -1;
      // Opposite signs: compare a^2 with b^2 * d.
      const mpz_class lhs = a_ * a_;
      const mpz_class rhs = b_ * b_ * d_;
      const int c = cmp(lhs, rhs);
      return sa > 0 ? c : -c;
    }
    case ScalarKind::floating: {
      const Real m = abs(ball_->mid);
      if (m > ball_->rad) return ball_->mid.sign();
      if (ball_->mid.is_zero() && ball_->rad.is_zero()) return 0;
      uncertain("sign");
    }
  }
  return 0;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (is_exact() && o.is_exact()) {
    const long d = join_fields(d_, o.d_);
    if (q_ == o.q_) {
      a_ += o.a_;
      b_ += o.b_;
    } else {
      a_ = a_ * o.q_ + o.a_ * q_;
      b_ = b_ * o.q_ + o.b_ * q_;
      q_ *= o.q_;
    }
    d_ = d;
    kind_ = d == 0 ? ScalarKind::rational : ScalarKind::quadratic;
    canonicalize();
    return *this;
  }
  const Scalar x = as_float();
  const Scalar y = o.as_float();
  Real mid = x.ball_->mid + y.ball_->mid;
  Real rad = x.ball_->rad + y.ball_->rad + slack(mid);
  *this = floating(mid, rad);
  return *this;
}

Scalar Scalar::operator-() const {
  Scalar r(*this);
  if (kind_ == ScalarKind::floating) {
    r.ball_->mid = -ball_->mid;
  } else {
    r.a_ = -a_;
    r.b_ = -b_;
  }
  return r;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  if (is_exact() && o.is_exact()) {
    const long d = join_fields(d_, o.d_);
    const mpz_class a = a_ * o.a_ + b_ * o.b_ * d;
    const mpz_class b = a_ * o.b_ + b_ * o.a_;
    a_ = a;
    b_ = b;
    q_ *= o.q_;
    d_ = d;
    kind_ = d == 0 ? ScalarKind::rational : ScalarKind::quadratic;
    canonicalize();
    return *this;
  }
  const Scalar x = as_float();
  const Scalar y = o.as_float();
  const Real& xm = x.ball_->mid;
  const Real& ym = y.ball_->mid;
  const Real& xr = x.ball_->rad;
  const Real& yr = y.ball_->rad;
  Real mid = xm * ym;
  Real rad = abs(xm) * yr + abs(ym) * xr + xr * yr + slack(mid);
  *this = floating(mid, rad);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (is_exact() && o.is_exact()) {
    if (o.sign() == 0) throw Error(Errc::division_by_zero, "exact division by zero");
    const long d = join_fields(d_, o.d_);
    const mpz_class a = (a_ * o.a_ - b_ * o.b_ * d) * o.q_;
    const mpz_class b = (b_ * o.a_ - a_ * o.b_) * o.q_;
    const mpz_class q = q_ * (o.a_ * o.a_ - o.b_ * o.b_ * d);
    a_ = a;
    b_ = b;
    q_ = q;
    d_ = d;
    kind_ = d == 0 ? ScalarKind::rational : ScalarKind::quadratic;
    canonicalize();
    return *this;
  }
  const Scalar x = as_float();
  const Scalar y = o.as_float();
  const Real ym = abs(y.ball_->mid);
  if (!(ym > y.ball_->rad)) uncertain("nonzero divisor");
  Real mid = x.ball_->mid / y.ball_->mid;
  Real rad = (abs(x.ball_->mid) * y.ball_->rad + ym * x.ball_->rad) / (ym * (ym - y.ball_->rad)) +
             slack(mid);
  *this = floating(mid, rad);
  return *this;
}

bool operator==(const Scalar& x, const Scalar& y) {
  if (x.is_exact() && y.is_exact()) {
    if (x.d_ != 0 && y.d_ != 0 && x.d_ != y.d_) return false;
    return x.a_ == y.a_ && x.b_ == y.b_ && x.q_ == y.q_;
  }
  if ((x - y).sign() != 0) return false;
  uncertain("equality");
}

std::strong_ordering operator<=>(const Scalar& x, const Scalar& y) {
  const int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

mpz_class Scalar::floor() const {
  mpz_class out;
  switch (kind_) {
    case ScalarKind::rational:
      mpz_fdiv_q(out.get_mpz_t(), a_.get_mpz_t(), q_.get_mpz_t());
      return out;
    case ScalarKind::quadratic: {
      // floor((a + b sqrt d)/q) = floor(floor(a + b sqrt d) / q) since q > 0.
      mpz_class s;
      const mpz_class sq = b_ * b_ * d_;
      mpz_sqrt(s.get_mpz_t(), sq.get_mpz_t());
      const mpz_class whole = b_ > 0 ? mpz_class(a_ + s) : mpz_class(a_ - s - 1);
      mpz_fdiv_q(out.get_mpz_t(), whole.get_mpz_t(), q_.get_mpz_t());
      return out;
    }
    case ScalarKind::floating: {
      const Real lo = iet::floor(ball_->mid - ball_->rad);
      const Real hi = iet::floor(ball_->mid + ball_->rad);
      if (!(lo == hi)) uncertain("floor");
      mpfr_get_z(out.get_mpz_t(), lo.get(), MPFR_RNDN);
      return out;
    }
  }
  return out;
}

Scalar Scalar::frac() const {
  const mpz_class f = floor();
  if (f == 0) return *this;
  return *this - rational(f, 1);
}

std::string Scalar::str() const {
  switch (kind_) {
    case ScalarKind::rational:
      return q_ == 1 ? a_.get_str() : a_.get_str() + "/" + q_.get_str();
    case ScalarKind::quadratic:
      return "(" + a_.get_str() + "+" + b_.get_str() + "*sqrt(" + std::to_string(d_) + "))/" +
             q_.get_str();
    case ScalarKind::floating:
      return ball_->mid.str(static_cast<int>(ball_->mid.precision() * 0.30103) + 2) + "+-" +
             ball_->rad.str(3);
  }
  return {};
}

Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }
Scalar min(const Scalar& x, const Scalar& y) { return y < x ? y : x; }
Scalar max(const Scalar& x, const Scalar& y) { return x < y ? y : x; }

}  // namespace iet
