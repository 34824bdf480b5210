#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "iet/induction.hpp"

namespace iet {

struct VeechNu {
  mpq_class nu1, nu2, nu;
};

/// Row and column ratio maxima of a strictly positive matrix.
VeechNu veech_nu(const Matrix& a);

struct BoundedTypeCertificate {
  int K = 0;
  std::vector<long> times;
  std::vector<mpz_class> norms;
  mpz_class C_K = 0;
  /// Block period, present when the normalized IET repeats at block boundaries.
  std::optional<int> period;
  /// Index of the first block boundary inside the detected cycle.
  int cycle_start = 0;
  /// True only when a periodic induction path was found in exact arithmetic.
  bool certified = false;
};

/// MMY(d-1) block norms to depth K with periodicity detection.
BoundedTypeCertificate bounded_type_certificate(const Iet& t, int K);

enum class GapScope { letter, all_letters, orbit };

const char* scope_name(GapScope s);

struct PartitionGaps {
  long n = 0;
  long j = 0;
  GapScope scope = GapScope::all_letters;
  int letter = -1;
  /// Sorted circle gaps.
  std::vector<Scalar> gaps;
  Scalar min_gap;
  Scalar max_gap;
  std::size_t points = 0;
};

/// Exact circle gaps of one partition. `letter` selects alpha for the letter
/// scope; `x` is the base point for the orbit scope.
PartitionGaps partition_gaps(const Iet& t, long n, long j, GapScope scope, int letter = -1,
                             const Scalar& x = Scalar());

/// Worst gaps over all j and both letter scopes for one n.
struct GapExtremes {
  long n = 0;
  double min_gap = 1;
  double max_gap = 0;
  // Where the minimum and maximum were attained.
  long min_j = 0, max_j = 0;
  GapScope min_scope = GapScope::all_letters, max_scope = GapScope::all_letters;
  int min_letter = -1, max_letter = -1;
};

/// Sliding-window scan of P^alpha_{n,j} and P_{n,j} for n = 1..n_max and all
/// 0 <= j < n. Points come from exact orbits; gap arithmetic is in doubles,
/// which is far below the gap scales involved. `visit` returns false to stop.
void scan_partitions(const Iet& t, long n_max, const std::function<bool(const GapExtremes&)>& visit);

/// max over n <= n_max of max(1/(n min), n max).
double balance_constant_c(const Iet& t, long n_max);

struct BalancedVerdict {
  bool pass = true;
  long n_max = 0;
  // Failure witness.
  long n = 0;
  long j = 0;
  GapScope scope = GapScope::all_letters;
  int letter = -1;
  double gap = 0;
  bool min_side = true;
};

BalancedVerdict balanced_verdict(const Iet& t, double c, long n_max);

/// n * min P_{n,0} and n * max P_{n,0} (all letters, j = 0) for n = 1..n_max.
std::vector<std::pair<double, double>> gap_profile_j0(const Iet& t, long n_max);

/// n * min P_n(x) and n * max P_n(x) for n = 1..n_max; x is a double in [0, 1).
std::vector<std::pair<double, double>> orbit_gap_profile(const Iet& t, const Scalar& x, long n_max);

struct AuditLine {
  std::string name;
  bool pass = true;
  long checks = 0;
  std::string witness;
};

struct BalanceAudit {
  int K = 0;
  Scalar C;
  mpz_class C_K = 0;
  std::vector<AuditLine> lines;
  bool pass() const;
};

/// The length, height, product and growth inequalities at MMY stages k <= K.
/// Throws CertificateMismatch when C < C_K.
BalanceAudit balance_audit(const Iet& t, int K, const Scalar& C);

/// max(C_K, sup_k ||B(m_k, m_{k+r})||) with r = max(2d - 3, 2): the smallest
/// constant for which products of consecutive blocks are positive enough to
/// make the length and height chains hold.
mpz_class balance_matrix_constant(const Iet& t, int K);

struct RauzyMove {
  Combinatorics next;
  int winner = -1;
  int loser = -1;
};

/// Combinatorial part of one Rauzy step of type eps.
RauzyMove rauzy_move(const Combinatorics& c, int eps);

/// Characteristic polynomial coefficients c_0..c_d of det(xI - A), c_d = 1.
std::vector<mpz_class> char_poly(const Matrix& a);

struct SelfSimilar {
  Iet iet;
  Matrix loop_matrix;
  std::vector<mpz_class> char_poly;
  /// Perron root; quadratic when exact.
  Scalar perron;
  bool exact = true;
  bool perron_degree_too_high = false;
  std::vector<int> winners;
};

/// IET whose raw induction path repeats the loop `eps` from `start` forever.
SelfSimilar self_similar(const Combinatorics& start, const std::vector<int>& eps);

}  // namespace iet
