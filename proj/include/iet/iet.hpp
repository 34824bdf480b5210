#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iet/scalar.hpp"

namespace iet {

enum class Direction { forward, backward };

/// Permutation pair (pi0, pi1). Letters are indices 0..d-1 into `alphabet`;
/// pi[e][a] is the 0-based position of letter a in row e.
struct Combinatorics {
  std::vector<std::string> alphabet;
  std::vector<int> pi[2];

  int d() const { return static_cast<int>(alphabet.size()); }
  /// order[e][p] is the letter at position p of row e.
  std::vector<int> order(int e) const;
  int letter(const std::string& name) const;
  /// Throws AlphabetMismatch if either row is not a bijection onto 0..d-1.
  void validate() const;
  bool admissible() const;
  /// Row-order rendering, e.g. "A B C D / D C B A".
  std::string str() const;

  /// Builds from rows given as letter sequences in position order.
  static Combinatorics from_rows(const std::vector<std::string>& alphabet,
                                 const std::vector<std::string>& row0,
                                 const std::vector<std::string>& row1);

  friend bool operator==(const Combinatorics&, const Combinatorics&) = default;
};

/// Interval exchange on [0, 1). Immutable after construction.
class Iet {
 public:
  /// Validates and rescales so the lengths sum to 1.
  static Iet build(Combinatorics comb, std::vector<Scalar> lengths);

  const Combinatorics& comb() const { return comb_; }
  int d() const { return comb_.d(); }
  const std::vector<Scalar>& lengths() const { return lengths_; }
  const Scalar& length(int a) const { return lengths_[a]; }
  const Scalar& left(int a) const { return left_[a]; }
  Scalar right(int a) const { return left_[a] + lengths_[a]; }
  const Scalar& left_image(int a) const { return left_image_[a]; }
  /// Translation T - id on I_a.
  const Scalar& offset(int a) const { return offset_[a]; }
  bool is_exact() const { return exact_; }
  /// Square-free radicand of the length field; 0 for Q.
  long field() const { return field_; }

  /// Letter a with x in I_a (forward) or x in I'_a (backward).
  int locate(const Scalar& x, Direction dir = Direction::forward) const;
  Scalar apply(const Scalar& x, Direction dir = Direction::forward) const;
  /// T^n x for n in [n_from, n_to].
  std::vector<Scalar> orbit(const Scalar& x, long n_from, long n_to) const;
  /// T^n x for signed n.
  Scalar power(const Scalar& x, long n) const;

  /// The inverse exchange (rows swapped).
  Iet inverse() const;

  /// Stable text form of the data, used for hashing and loop detection.
  std::string canonical() const;

 private:
  Combinatorics comb_;
  std::vector<Scalar> lengths_;
  std::vector<Scalar> left_;
  std::vector<Scalar> left_image_;
  std::vector<Scalar> offset_;
  std::vector<int> order_[2];
  bool exact_ = true;
  long field_ = 0;
};

struct KeaneVerdict {
  bool violated = false;
  long depth = 0;
  // Witness: T^n l_alpha = l_beta.
  long n = 0;
  int alpha = -1;
  int beta = -1;
};

/// Exact scan of the discontinuity orbits with pi0(alpha) != first.
KeaneVerdict keane_scan(const Iet& t, long depth);

/// min({x - y}, {y - x}).
Scalar circle_dist(const Scalar& x, const Scalar& y);

}  // namespace iet
