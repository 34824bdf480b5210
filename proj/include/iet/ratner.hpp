#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "iet/roof.hpp"

namespace iet {

struct ConstantInputs {
  mpq_class c;        // balance constant
  mpq_class C;        // MMY block bound
  int d = 2;
  mpq_class C_tilde;  // sum C+ + sum C-
  mpq_class M_prime;
  mpq_class D;
  mpq_class eps;
  long N = 1;
};

struct RatnerConstants {
  ConstantInputs in;
  mpq_class H;
  /// Inner edge of P = [-H, -p_low] u [p_low, H].
  mpq_class p_low;
  mpq_class kappa;
  mpq_class delta;
  /// The individual terms whose minimum gives kappa and delta (terms with a
  /// vanishing denominator are left out).
  std::vector<mpq_class> kappa_terms;
  std::vector<mpq_class> delta_terms;

  bool in_P(const Real& p) const;
};

RatnerConstants derive_constants(const ConstantInputs& in);

struct DEstimate {
  /// sup |f'(x) + 1/x| over a geometric grid in (0, min P_{1,0} / 2).
  double sup = 0;
  /// sup plus a 10% margin.
  double D = 0;
};

/// Requires C+ = 1 on the first letter of the top row.
DEstimate estimate_D(const Roof& roof, int grid_points = 4000);

struct SeparationResult {
  long window = 0;  // n ranges over [-window, window]
  long count = 0;
  std::vector<std::pair<long, int>> witnesses;  // (n, letter)
  /// Approaches after merging (n1, a) with (n2, b) when T^{n2-n1} l_a = l_b.
  /// The letter whose bottom-row image starts at 0 always has such a
  /// connection, so `count` can be 2 where `events` is 1.
  long events = 0;
};

/// #{n in [-1/(8 delta c), 1/(8 delta c)] : min_a ||l_a - T^n x|| < delta}.
SeparationResult separation_count(const Iet& t, const Scalar& x, const Scalar& delta, double c);

enum class DirectionChoice { forward, backward, both, neither };
const char* direction_name(DirectionChoice d);

enum class Mode { strict, adaptive };
const char* mode_name(Mode m);

struct DriftCertificate {
  Scalar x, y, eta;
  Direction direction = Direction::forward;
  DirectionChoice odl = DirectionChoice::neither;
  long k = 0;
  std::string branch;  // ka, ka2, ka3, ka4
  long M = 0, L = 0;
  Real p;
  bool p_in_P = false;
  /// sup_{n in [0, L]} |S_{M+n} - S_M|
  Real deviation;
  /// sup_{n in [M, M+L]} |S_n - p|
  Real cocycle_deviation;
  /// sup_{n in [M, M+L]} d(T^{+-n} x, T^{+-n} y)
  Real orbit_distance;
  /// |S_{k+1} - S_k| (forward) or |S_k - S_{k-1}| (backward)
  Real jump;
  bool reverified = false;
};

struct PairResult {
  std::string status = "ok";  // ok or an error name
  std::string detail;
  std::optional<DriftCertificate> cert;
};

struct PipelineOptions {
  Mode mode = Mode::adaptive;
  mpfr_prec_t precision = kDefaultPrecisionBits;
};

/// Direction test on the windows [0, 1/(16 eta c)] and [1, 1/(16 eta c)].
DirectionChoice select_direction(const Iet& t, const Scalar& x, const Scalar& eta, double c);

/// Smallest k in [k_lo, floor(1/(32 eta c))] with T^k x in (2 eta, upper)
/// (T^-k for backward). Throws NotFound.
long find_hit_time(const Iet& t, const Scalar& x, const Scalar& eta, double c, long k_lo,
                   const Scalar& upper, Direction dir);

/// Pairs must be closer than this: the derived delta in strict mode,
/// min(eps, 1/(64c)) in adaptive mode.
mpq_class pipeline_delta(const RatnerConstants& k, Mode mode);
/// Upper end of the hit window: 400 eta c^4, capped in adaptive mode at
/// min P_{1,0} / 2 - eta so the hit stays inside the first interval.
Scalar hit_upper(const Iet& t, const RatnerConstants& k, const Scalar& eta, Mode mode);
/// First admissible hit time: ceil(N/kappa) strict, N+1 adaptive.
long hit_lower(const RatnerConstants& k, Mode mode);

/// Full pipeline for one pair. Errors are returned in the status.
PairResult drift_certificate(const Roof& roof, const Scalar& x, const Scalar& y,
                             const RatnerConstants& k, const PipelineOptions& opt);

struct ScaleSummary {
  Scalar eta;
  long pairs = 0;
  long ok = 0;
  long forward = 0, backward = 0;
  long odl_both = 0;
  std::vector<std::pair<std::string, long>> branches;
  double p_abs_min = 0, p_abs_max = 0;
  double p_min = 0, p_max = 0;
  long p_in_P = 0;
  double min_L_over_M = 0;
  double max_deviation = 0;
  std::vector<std::pair<std::string, long>> failures;
};

struct SweepPair {
  Scalar eta, x, y;
  PairResult result;
};

struct SweepReport {
  Mode mode = Mode::adaptive;
  std::vector<ScaleSummary> scales;
  std::vector<SweepPair> pairs;
  long failed() const;
};

/// Samples `pairs_per_scale` pairs per eta with y = x + eta and runs the
/// pipeline. Results are ordered by (scale, pair) independent of `jobs`.
SweepReport swr_sweep(const Roof& roof, const RatnerConstants& k, const std::vector<Scalar>& scales,
                      long pairs_per_scale, std::uint64_t seed, const PipelineOptions& opt, int jobs);

}  // namespace iet
