#include <cmath>

#include <gtest/gtest.h>

#include "iet/error.hpp"
#include "iet/scalar.hpp"

using namespace iet;

namespace {

Scalar q(long n, long d) { return Scalar::rational(mpz_class(n), mpz_class(d)); }
Scalar phi() { return Scalar::quadratic(1, 1, 2, 5); }

}  // namespace

TEST(Scalar, RationalArithmetic) {
  EXPECT_EQ(q(1, 3) + q(1, 6), q(1, 2));
  EXPECT_EQ(q(2, 4), q(1, 2));
  EXPECT_EQ(q(3, 5) / q(2, 5), q(3, 2));
  EXPECT_EQ((q(7, 3)).floor(), 2);
  EXPECT_EQ((q(-7, 3)).floor(), -3);
  EXPECT_EQ(q(-1, 4).frac(), q(3, 4));
}

TEST(Scalar, GoldenRatioIdentity) {
  const Scalar p = phi();
  EXPECT_EQ(p * p, p + Scalar::integer(1));
  EXPECT_EQ(Scalar::integer(1) / p, p - Scalar::integer(1));
  EXPECT_EQ(p.floor(), 1);
  EXPECT_NEAR(p.to_double(), (1 + std::sqrt(5.0)) / 2, 1e-15);
}

TEST(Scalar, QuadraticSignAndFloor) {
  // 3 - 2 sqrt2 = 0.1715...: tiny positive, decided from a^2 vs b^2 D.
  EXPECT_EQ(Scalar::quadratic(3, -2, 1, 2).sign(), 1);
  EXPECT_EQ(Scalar::quadratic(-3, 2, 1, 2).sign(), -1);
  // 1000 sqrt2: integer square root of 2 * 10^6 is 1414.
  EXPECT_EQ(Scalar::quadratic(0, 1000, 1, 2).floor(), 1414);
  EXPECT_EQ(Scalar::integer(1) / Scalar::quadratic(1, 1, 1, 2), Scalar::quadratic(-1, 1, 1, 2));
}

TEST(Scalar, CollapsesToRational) {
  const Scalar s = Scalar::quadratic(1, 1, 1, 2) + Scalar::quadratic(1, -1, 1, 2);
  EXPECT_EQ(s.kind(), ScalarKind::rational);
  EXPECT_EQ(s, Scalar::integer(2));
}

TEST(Scalar, FieldMismatch) {
  try {
    (void)(Scalar::quadratic(0, 1, 1, 2) + Scalar::quadratic(0, 1, 1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::field_mismatch);
  }
}

TEST(Scalar, ParseExact) {
  EXPECT_EQ(Scalar::parse_exact("3/5"), q(3, 5));
  EXPECT_EQ(Scalar::parse_exact("1e-3"), q(1, 1000));
  EXPECT_EQ(Scalar::parse_exact("2.5e-1"), q(1, 4));
  EXPECT_EQ(Scalar::parse_exact("-0.125"), q(-1, 8));
}

TEST(Scalar, FloatBallUndecided) {
  const Scalar tiny = Scalar::floating(Real(0.0), Real(1e-10));
  try {
    (void)tiny.sign();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::precision_exhausted);
  }
  const Scalar a = Scalar::floating(Real(0.5), Real(1e-20));
  EXPECT_EQ(a.sign(), 1);
  EXPECT_TRUE(a < Scalar::integer(1));
}

TEST(Real, MatchesDoubleLibm) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 10.0}) {
    EXPECT_NEAR(log(Real(x)).to_double(), std::log(x), 1e-15 * std::fabs(std::log(x)) + 1e-300);
    EXPECT_NEAR(sin(Real(x)).to_double(), std::sin(x), 1e-15);
    EXPECT_NEAR(cos(Real(x)).to_double(), std::cos(x), 1e-15);
  }
}

TEST(Real, WorkingPrecisionIsScoped) {
  const mpfr_prec_t before = WorkingPrecision::current();
  {
    WorkingPrecision wp(400);
    EXPECT_EQ(Real(1.0).precision(), 400);
  }
  EXPECT_EQ(WorkingPrecision::current(), before);
}
