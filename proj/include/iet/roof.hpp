#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iet/induction.hpp"
#include "iet/real.hpp"

namespace iet {

struct TrigTerm {
  long freq = 0;
  Real a;  // cos coefficient (the constant when freq == 0)
  Real b;  // sin coefficient
};

struct RoofSpec {
  std::vector<Scalar> c_plus;
  std::vector<Scalar> c_minus;
  std::vector<TrigTerm> g;
  /// Additive constant; empty means "choose so that min f = f_min".
  std::optional<Real> f0;
  Real f_min = Real(1.0);
};

/// C+ = 1 on the first letter of the top row, C- = 1 on its last letter:
/// one symmetric pair of log singularities at 0.
RoofSpec symmetric_single_pair(const Iet& t);

/// Roof f over an IET with
///   f(x) = -sum C+_a log{x - l_a} - sum C-_a log{r_a - x} + G(x) + f0,
/// G the antiderivative of g with G(0) = 0.
class Roof {
 public:
  Roof(const Iet& t, RoofSpec spec);

  const Iet& iet() const { return t_; }
  const RoofSpec& spec() const { return spec_; }
  const Real& f0() const { return f0_; }
  /// Lower bound on f established at construction.
  const Real& f_min() const { return spec_.f_min; }
  /// sum C+ + sum C-.
  Scalar c_tilde() const;

  bool is_singular(const Scalar& x) const;
  Real value(const Scalar& x) const;
  Real derivative(const Scalar& x) const;
  /// Values at a double point, for grid scans (no singularity check).
  double value_at(double x) const;
  double derivative_at(double x) const;
  Real g(const Real& x) const;
  Real G(const Real& x) const;
  /// sup |g| bound: sum of |a| + |b|.
  Real g_bound() const;

  /// Same singularity layout with every C scaled by `s`.
  Roof rescaled(const Scalar& s) const;

 private:
  Iet t_;
  RoofSpec spec_;
  Real f0_;
};

enum class RoofPart { f, fprime };

/// f^(n)(x) for signed n; OrbitHitsSingularity carries the iterate index.
Real birkhoff(const Roof& roof, const Scalar& x, long n, RoofPart what = RoofPart::f);

struct FlowPoint {
  Scalar x;
  Real s;
};

FlowPoint flow_step(const Roof& roof, const FlowPoint& p, const Real& t);
Real flow_dist(const FlowPoint& p, const FlowPoint& q);

struct ClosestApproach {
  /// Per letter; empty means infinity.
  std::vector<std::optional<Scalar>> left;
  std::vector<std::optional<Scalar>> right;
};

/// z^l_a = min_{i<r} |T^i z - l_a|^+ and z^r_a = min_{i<r} |r_a - T^i z|^+.
/// Backward uses the inverse exchange and its endpoints.
ClosestApproach closest_approach(const Iet& t, const Scalar& z, long r,
                                 Direction dir = Direction::forward);

struct CancRow {
  int k = 0;
  long samples = 0;
  double r_max = 0;
  double r_q99 = 0;
};

struct CancAudit {
  std::vector<CancRow> rows;
  double m_prime = 0;
  /// max over rows with k <= kk.
  double m_prime_upto(int kk) const;
};

/// Samples z in I_beta^{m_k}, 0 < r <= h_beta^{m_k} and records
/// |f'^(r)(z) + sum C+/z^l - sum C-/z^r| / r.
CancAudit canc_audit(const Roof& roof, int K, long samples_per_stage, std::uint64_t seed);

}  // namespace iet
