#pragma once

#include <vector>

#include "iet/iet.hpp"

namespace iet {

/// Double-precision copy of an Iet for long orbit scans. Each point carries
/// a running error bound; a branch decision the bound does not settle throws
/// PrecisionExhausted so callers can redo the work exactly.
class FastIet {
 public:
  explicit FastIet(const Iet& t);

  struct Point {
    double x = 0;
    double err = 0;
  };

  int d() const { return static_cast<int>(left_.size()); }
  double left(int a) const { return left_[a]; }
  /// Bound on |left(a) - exact l_a|.
  double endpoint_err() const { return endpoint_err_; }

  int locate(const Point& p, Direction dir = Direction::forward) const;
  Point apply(const Point& p, Direction dir = Direction::forward) const;

  /// Certified circle distance from p to the nearest l_a, as a [lo, hi] pair.
  void dist_to_endpoints(const Point& p, double& lo, double& hi) const;

 private:
  std::vector<double> left_;
  std::vector<double> left_image_;
  std::vector<double> offset_;
  std::vector<int> order_[2];
  double endpoint_err_ = 0;
};

/// Exact scalar to a fast point (error 0 when the double is exact).
FastIet::Point to_fast(const Scalar& x);

}  // namespace iet
