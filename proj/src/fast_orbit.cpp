#include "iet/fast_orbit.hpp"

#include <cmath>
#include <limits>

#include "iet/error.hpp"

namespace iet {
namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

}  // namespace

FastIet::Point to_fast(const Scalar& x) {
  const Real v = x.value();
  const double xd = v.to_double();
  FastIet::Point p{xd, 0.0};
  if (!x.is_exact()) {
    p.err = x.radius().to_double() + std::fabs(xd) * kUnit;
  } else if (!(Real(xd) == v) || x.kind() == ScalarKind::quadratic) {
    p.err = std::fabs(xd) * kUnit + std::numeric_limits<double>::denorm_min();
  }
  return p;
}

FastIet::FastIet(const Iet& t) {
  const int d = t.d();
  left_.resize(d);
  left_image_.resize(d);
  offset_.resize(d);
  for (int a = 0; a < d; ++a) {
    left_[a] = t.left(a).to_double();
    left_image_[a] = t.left_image(a).to_double();
    offset_[a] = t.offset(a).to_double();
  }
  order_[0] = t.comb().order(0);
  order_[1] = t.comb().order(1);
  // Each endpoint is rounded once from a value in [0, 1]; floats add their radius.
  endpoint_err_ = 2 * kUnit;
  for (int a = 0; a < d; ++a) {
    endpoint_err_ = std::max(endpoint_err_, 2 * kUnit + t.left(a).radius().to_double() * d);
  }
}

int FastIet::locate(const Point& p, Direction dir) const {
  const auto& ord = order_[dir == Direction::forward ? 0 : 1];
  const auto& lefts = dir == Direction::forward ? left_ : left_image_;
  const double slack = p.err + endpoint_err_;
  if (p.x < -slack || p.x >= 1 + slack) {
    throw Error(Errc::out_of_domain, "fast point outside [0, 1)");
  }
  int found = 0;
  for (int q = 1; q < d(); ++q) {
    const double l = lefts[ord[q]];
    if (std::fabs(p.x - l) <= slack) {
      throw Error(Errc::precision_exhausted, "fast orbit point too close to an endpoint");
    }
    if (p.x > l) found = q;
  }
  return ord[found];
}

FastIet::Point FastIet::apply(const Point& p, Direction dir) const {
  const int a = locate(p, dir);
  const double y = dir == Direction::forward ? p.x + offset_[a] : p.x - offset_[a];
  // Offset error is two endpoint errors; the sum adds one rounding.
  return Point{y, p.err + 2 * endpoint_err_ + kUnit};
}

void FastIet::dist_to_endpoints(const Point& p, double& lo, double& hi) const {
  double best = 1;
  for (double l : left_) {
    double g = std::fabs(p.x - l);
    g = std::min(g, 1 - g);
    best = std::min(best, g);
  }
  const double slack = p.err + endpoint_err_ + 2 * kUnit;
  lo = std::max(0.0, best - slack);
  hi = best + slack;
}

}  // namespace iet
