#include <cmath>

#include <gtest/gtest.h>

#include "iet/error.hpp"
#include "iet/experiment.hpp"
#include "iet/random.hpp"

using namespace iet;

namespace {

Scalar q(long n, long d) { return Scalar::rational(mpz_class(n), mpz_class(d)); }

const Iet& golden() {
  static const Iet t = builtin_instance("golden");
  return t;
}

const Roof& golden_roof() {
  static const Roof r(golden(), symmetric_single_pair(golden()));
  return r;
}

ConstantInputs reference_inputs() {
  ConstantInputs in;
  in.c = 2;
  in.C = 1;
  in.d = 2;
  in.C_tilde = 2;
  in.M_prime = 1;
  in.D = 2;
  in.eps = mpq_class(1, 10);
  in.N = 1;
  return in;
}

// Constants close to the ones measured on golden with the symmetric roof.
RatnerConstants golden_constants() {
  ConstantInputs in;
  in.c = mpq_class(288, 100);
  in.C = 2;
  in.d = 2;
  in.C_tilde = 2;
  in.M_prime = mpq_class(25, 10);
  in.D = mpq_class(136, 100);
  in.eps = mpq_class(1, 10);
  in.N = 1;
  return derive_constants(in);
}

}  // namespace

TEST(Constants, ReferenceValues) {
  const RatnerConstants k = derive_constants(reference_inputs());
  // A = 400 c^4 + 1 = 6401.
  const double A = 6401;
  EXPECT_NEAR(k.H.get_d(), 2 * (1 / A + 2) * (2 * A / 64 + 1), 1e-9);
  EXPECT_NEAR(k.H.get_d(), 804.19, 0.01);
  EXPECT_EQ(k.p_low, mpq_class(1, 25600));
  EXPECT_EQ(k.kappa, mpq_class(2, 6401));
  EXPECT_EQ(k.kappa_terms.size(), 4u);
  EXPECT_EQ(k.delta_terms.size(), 7u);
}

TEST(Constants, InequalitiesHold) {
  for (const RatnerConstants& k : {derive_constants(reference_inputs()), golden_constants()}) {
    EXPECT_LE(k.delta, k.in.eps);
    mpq_class c5 = k.in.c * k.in.c * k.in.c * k.in.c * k.in.c;
    EXPECT_LE(k.delta, k.kappa / (512 * c5 * k.in.N));
    for (const auto& t : k.kappa_terms) EXPECT_GE(t, k.kappa);
    for (const auto& t : k.delta_terms) EXPECT_GE(t, k.delta);
    EXPECT_TRUE(k.in_P(Real(k.H)));
    EXPECT_TRUE(k.in_P(-Real(k.p_low)));
    EXPECT_FALSE(k.in_P(Real(k.p_low) / Real(2.0)));
  }
}

TEST(Constants, ZeroMeasuredTermsAreSkipped) {
  ConstantInputs in = reference_inputs();
  in.M_prime = 0;
  in.D = 0;
  const RatnerConstants k = derive_constants(in);
  EXPECT_EQ(k.kappa_terms.size(), 3u);
  EXPECT_EQ(k.delta_terms.size(), 5u);
}

TEST(Constants, BadInputs) {
  for (int i = 0; i < 5; ++i) {
    ConstantInputs in = reference_inputs();
    if (i == 0) in.c = mpq_class(1, 2);
    if (i == 1) in.C = 0;
    if (i == 2) in.d = 1;
    if (i == 3) in.eps = 0;
    if (i == 4) in.N = 0;
    try {
      derive_constants(in);
      FAIL() << i;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::bad_inputs);
    }
  }
}

TEST(EstimateD, SinglePairClosedForm) {
  // f'(x) + 1/x = 1/(1 - x), increasing: the sup sits at the window end.
  const DEstimate d = estimate_D(golden_roof());
  const double w = 0.5 * golden().length(0).to_double();
  EXPECT_NEAR(d.sup, 1 / (1 - w), 1e-6);
  EXPECT_NEAR(d.D, 1.1 * d.sup, 1e-12);
}

TEST(EstimateD, ConstantSmoothPartShifts) {
  RoofSpec s = symmetric_single_pair(golden());
  s.g.push_back({0, Real(0.5), Real(0.0)});
  const DEstimate d = estimate_D(Roof(golden(), s));
  EXPECT_NEAR(d.sup - estimate_D(golden_roof()).sup, 0.5, 1e-6);
}

TEST(EstimateD, NotNormalized) {
  try {
    estimate_D(golden_roof().rescaled(Scalar::integer(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_normalized);
  }
}

TEST(Separation, WindowScanOracle) {
  auto rng = substream(21, 0);
  for (int i = 0; i < 200; ++i) {
    const Scalar x = dyadic_unit(rng);
    const Scalar delta = Scalar::rational(mpq_class(std::pow(10.0, -3 - 2 * unit_double(rng))));
    const SeparationResult r = separation_count(golden(), x, delta, 5);
    const auto near = [&](const Scalar& p) {
      return circle_dist(p, golden().left(0)) < delta || circle_dist(p, golden().left(1)) < delta;
    };
    long count = near(x);
    Scalar fwd = x, bwd = x;
    for (long n = 1; n <= r.window; ++n) {
      fwd = golden().apply(fwd);
      bwd = golden().apply(bwd, Direction::backward);
      count += near(fwd) + near(bwd);
    }
    EXPECT_EQ(r.count, count);
  }
}

TEST(Separation, LiteralCountDoublesOnlyAlongTheConnection) {
  // T(l_B) = 0 = l_A, so approaching l_B at time n means approaching 0 at
  // n + 1. Every count of 2 is such a pair; merged, at most one event remains.
  auto rng = substream(22, 0);
  long doubled = 0;
  for (int i = 0; i < 1000; ++i) {
    const Scalar x = dyadic_unit(rng);
    const Scalar delta = Scalar::rational(mpq_class(std::pow(10.0, -2 - 3 * unit_double(rng))));
    const SeparationResult r = separation_count(golden(), x, delta, 5);
    EXPECT_LE(r.events, 1);
    if (r.count == 2) {
      ++doubled;
      EXPECT_EQ(r.witnesses[1].first, r.witnesses[0].first + 1);
      EXPECT_EQ(r.witnesses[0].second, 1);
      EXPECT_EQ(r.witnesses[1].second, 0);
    }
    EXPECT_LE(r.count, 2);
  }
  EXPECT_GT(doubled, 0);
}

TEST(Separation, LargeDeltaAndEndpoint) {
  EXPECT_EQ(separation_count(golden(), q(1, 3), q(1, 2), 5).window, 0);
  const SeparationResult r = separation_count(golden(), golden().left(1), q(1, 1000), 5);
  EXPECT_GE(r.count, 1);
  EXPECT_EQ(r.witnesses.front(), std::make_pair(0L, 1));
}

TEST(Direction, NeverNeitherAwayFromZero) {
  // Outside the (2 eta)-neighbourhood of 0 one of the two windows is clear.
  auto rng = substream(23, 0);
  const Scalar eta = q(1, 10000);
  for (int i = 0; i < 300; ++i) {
    const Scalar x = dyadic_unit(rng);
    if (circle_dist(x, Scalar()) < eta + eta) continue;
    EXPECT_NE(select_direction(golden(), x, eta, 2.88), DirectionChoice::neither);
  }
  // x just right of 0: the approach at n = 0 repeats l_B at n = -1.
  EXPECT_EQ(select_direction(golden(), q(1, 100000), eta, 2.88), DirectionChoice::neither);
}

TEST(HitTime, MatchesDirectScan) {
  auto rng = substream(24, 0);
  const Scalar eta = q(1, 100000);
  const double c = 2.88;
  const Scalar upper = Scalar::rational(mpq_class(400) * mpq_class(288, 100) * mpq_class(288, 100) *
                                        mpq_class(288, 100) * mpq_class(288, 100)) *
                       eta;
  for (int i = 0; i < 10; ++i) {
    const Scalar x = dyadic_unit(rng);
    for (Direction dir : {Direction::forward, Direction::backward}) {
      long expect = -1;
      Scalar p = x;
      const long hi = static_cast<long>(1 / (32 * eta.to_double() * c));
      for (long k = 1; k <= hi; ++k) {
        p = golden().apply(p, dir);
        if (k >= 5 && eta + eta < p && p < upper) {
          expect = k;
          break;
        }
      }
      try {
        EXPECT_EQ(find_hit_time(golden(), x, eta, c, 5, upper, dir), expect);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::not_found);
        EXPECT_EQ(expect, -1);
      }
    }
  }
}

TEST(HitTime, EmptyRangeNotFound) {
  try {
    find_hit_time(golden(), q(1, 3), q(1, 1000), 2.88, 100000, q(1, 2), Direction::forward);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
}

TEST(Pipeline, RejectsBadPairs) {
  const RatnerConstants k = golden_constants();
  const PipelineOptions adaptive{Mode::adaptive, 200};
  const Scalar x = q(1, 3);
  EXPECT_EQ(drift_certificate(golden_roof(), x, golden().power(x, 3), k, adaptive).status, "SameOrbit");
  EXPECT_EQ(drift_certificate(golden_roof(), x, golden().power(x, -40), k, adaptive).status, "SameOrbit");
  EXPECT_EQ(drift_certificate(golden_roof(), x, x, k, adaptive).status, "SameOrbit");
  EXPECT_EQ(drift_certificate(golden_roof(), x, x + q(1, 10), k, adaptive).status, "PairTooFar");
  EXPECT_EQ(drift_certificate(golden_roof(), x, x + q(1, 10000), k, {Mode::strict, 200}).status,
            "PairTooFar");
}

TEST(Pipeline, CertificatesAreSound) {
  const RatnerConstants k = golden_constants();
  const PipelineOptions opt{Mode::adaptive, 200};
  const Real eps(k.in.eps);
  const Real jump_floor(1 / (800 * k.in.c * k.in.c * k.in.c * k.in.c));
  auto rng = substream(25, 0);
  bool forward = false, backward = false;
  for (int i = 0; i < 30; ++i) {
    const Scalar x = dyadic_unit(rng);
    const Scalar y = (x + q(1, 10000)).frac();
    const PairResult r = drift_certificate(golden_roof(), x, y, k, opt);
    if (circle_dist(x, Scalar()) < q(2, 10000)) continue;
    ASSERT_EQ(r.status, "ok") << r.detail;
    const DriftCertificate& c = *r.cert;
    forward |= c.direction == Direction::forward;
    backward |= c.direction == Direction::backward;
    EXPECT_TRUE(c.reverified);
    EXPECT_TRUE(k.in_P(c.p));
    EXPECT_GE(c.M, k.in.N);
    EXPECT_EQ(c.L, static_cast<long>(std::ceil(mpq_class(k.kappa * c.M).get_d())));
    EXPECT_LT(c.deviation, eps);
    EXPECT_LT(c.cocycle_deviation, eps);
    EXPECT_LT(c.orbit_distance, eps);
    EXPECT_GE(c.jump, jump_floor);
    // Independent recomputation of p from Birkhoff sums.
    const long sign = c.direction == Direction::forward ? 1 : -1;
    const long idx = c.branch == "ka" ? c.k + 1 : c.branch == "ka4" ? c.k - 1 : c.k;
    const Real p = birkhoff(golden_roof(), c.x, sign * idx) - birkhoff(golden_roof(), c.y, sign * idx);
    EXPECT_LT(abs(p - c.p).to_double(), 1e-40);
    if (c.odl == DirectionChoice::both) {
      EXPECT_EQ(c.direction, Direction::forward);
    }
  }
  EXPECT_TRUE(forward);
  EXPECT_TRUE(backward);
}

TEST(Sweep, EmptyAndDeterministic) {
  const RatnerConstants k = golden_constants();
  const PipelineOptions opt{Mode::adaptive, 200};
  EXPECT_TRUE(swr_sweep(golden_roof(), k, {q(1, 1000)}, 0, 1, opt, 2).pairs.empty());
  const SweepReport a = swr_sweep(golden_roof(), k, {q(1, 1000), q(1, 10000)}, 8, 9, opt, 1);
  const SweepReport b = swr_sweep(golden_roof(), k, {q(1, 1000), q(1, 10000)}, 8, 9, opt, 4);
  ASSERT_EQ(a.pairs.size(), 16u);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_EQ(a.pairs[i].x, b.pairs[i].x);
    EXPECT_EQ(a.pairs[i].result.status, b.pairs[i].result.status);
    if (a.pairs[i].result.cert) EXPECT_EQ(a.pairs[i].result.cert->p, b.pairs[i].result.cert->p);
  }
  EXPECT_EQ(a.scales.size(), 2u);
  EXPECT_EQ(a.scales[0].pairs, 8);
}
