#pragma once

#include <vector>

#include <gmpxx.h>

#include "iet/iet.hpp"

namespace iet {

/// Square integer matrix indexed [row letter][column letter].
using Matrix = std::vector<std::vector<mpz_class>>;

Matrix identity_matrix(int d);
Matrix operator*(const Matrix& a, const Matrix& b);
/// Largest absolute entry.
mpz_class sup_norm(const Matrix& a);
mpz_class determinant(const Matrix& a);
/// Column sums: h_beta = sum_alpha A[alpha][beta].
std::vector<mpz_class> column_sums(const Matrix& a);

struct InductionStep {
  int eps = 0;
  int winner = -1;
  int loser = -1;
  /// R(T), rescaled to unit total length.
  Iet result;
  /// |lambda~| / |lambda| (the factor removed by the rescaling).
  Scalar scale;

  Matrix theta(int d) const;
};

/// One Rauzy-Veech step. Throws TiedLengths when the two last intervals agree.
InductionStep rv_step(const Iet& t);

/// Raw induction trace: stages R^n(T) for n = 0..steps(), each normalized,
/// with the unrescaled total length kept separately.
class Trace {
 public:
  explicit Trace(Iet start);

  long steps() const { return static_cast<long>(eps_.size()); }
  int d() const { return stages_.front().d(); }
  /// Runs induction until `n` steps exist. TiedLengths carries the step index.
  void extend_to(long n);

  const Iet& stage(long n) const { return stages_[n]; }
  /// |lambda^n| in the frame of the starting IET.
  const Scalar& scale(long n) const { return scale_[n]; }
  /// lambda^n in the frame of the starting IET.
  std::vector<Scalar> lengths(long n) const;
  int eps(long n) const { return eps_[n]; }
  int winner(long n) const { return winner_[n]; }
  int loser(long n) const { return loser_[n]; }
  /// Theta(R^n T).
  Matrix theta(long n) const;
  /// Theta(R^from T) * ... * Theta(R^{to-1} T); identity when from == to.
  Matrix product(long from, long to) const;

 private:
  std::vector<Iet> stages_;
  std::vector<Scalar> scale_;
  std::vector<int> eps_, winner_, loser_;
};

/// Theta^(n)(T) and all stages up to n.
Trace iterate(const Iet& t, long n);

enum class ScheduleKind { raw, zorich, mmy };

struct Schedule {
  ScheduleKind kind = ScheduleKind::raw;
  int level = 0;
  /// n_0 = 0 < n_1 < ... (K + 1 entries for K blocks).
  std::vector<long> times;
  /// blocks[k] = B(n_k, n_{k+1}).
  std::vector<Matrix> blocks;

  int size() const { return static_cast<int>(blocks.size()); }
};

/// Default bound on raw steps spent building a schedule.
inline constexpr long kMaxRawSteps = 200000;

/// Blocks of constant eps. Extends `trace` as needed.
Schedule zorich_schedule(Trace& trace, int K, long max_steps = kMaxRawSteps);
/// Maximal blocks whose arrows take at most `level` winner names.
Schedule mmy_schedule(Trace& trace, int level, int K, long max_steps = kMaxRawSteps);
Schedule raw_schedule(Trace& trace, int K);

struct TowerData {
  long stage = 0;
  /// lambda^{n_k} in the starting frame.
  std::vector<Scalar> lengths;
  std::vector<mpz_class> heights;
  /// Left endpoints of I^{n_k}_beta in the starting frame.
  std::vector<Scalar> lefts;
};

/// Towers over I^{n_k}; heights from the product of the first k blocks.
TowerData towers(const Trace& trace, const Schedule& schedule, int k);

struct ReturnResult {
  long time = 0;
  Scalar point;
};

/// First n >= 1 with T^n x in [lo, hi), by direct iteration.
ReturnResult brute_force_return(const Iet& t, const Scalar& lo, const Scalar& hi,
                                const Scalar& x, long cap);

}  // namespace iet
