#include "iet/roof.hpp"

#include <algorithm>
#include <cmath>

#include "iet/error.hpp"
#include "iet/random.hpp"

namespace iet {
namespace {

double frac(double v) { return v - std::floor(v); }

Real two_pi() { return ldexp(Real::pi(), 1); }

}  // namespace

RoofSpec symmetric_single_pair(const Iet& t) {
  RoofSpec s;
  s.c_plus.assign(t.d(), Scalar());
  s.c_minus.assign(t.d(), Scalar());
  const auto top = t.comb().order(0);
  s.c_plus[top.front()] = Scalar::integer(1);
  s.c_minus[top.back()] = Scalar::integer(1);
  return s;
}

Roof::Roof(const Iet& t, RoofSpec spec) : t_(t), spec_(std::move(spec)) {
  const int d = t_.d();
  if (static_cast<int>(spec_.c_plus.size()) != d || static_cast<int>(spec_.c_minus.size()) != d) {
    throw Error(Errc::alphabet_mismatch, "roof coefficients do not match the alphabet");
  }
  Scalar plus, minus;
  for (int a = 0; a < d; ++a) {
    if (spec_.c_plus[a].sign() < 0 || spec_.c_minus[a].sign() < 0) {
      throw Error(Errc::bad_argument, "roof coefficients must be nonnegative", a);
    }
    plus += spec_.c_plus[a];
    minus += spec_.c_minus[a];
  }
  if (!(plus == minus) || plus.sign() <= 0) {
    throw Error(Errc::asymmetric_roof,
                "sum C+ = " + plus.str() + " and sum C- = " + minus.str() + " must agree and be > 0");
  }
  if (!(spec_.f_min.sign() > 0)) throw Error(Errc::bad_argument, "f_min must be positive");

  if (spec_.f0) {
    f0_ = *spec_.f0;
    // Check the requested constant on a grid.
    const int n = 100000;
    double m = INFINITY;
    for (int i = 0; i < n; ++i) m = std::min(m, value_at((i + 0.5) / n));
    if (m < spec_.f_min.to_double()) {
      throw Error(Errc::bad_argument, "f0 leaves the roof below f_min on the grid");
    }
    return;
  }
  // f0 = f_min - min(f - f0), with the minimum from a grid plus golden-section refinement.
  f0_ = Real(0.0);
  const int n = 100000;
  std::vector<std::pair<double, int>> cells;
  for (int i = 0; i < n; ++i) cells.emplace_back(value_at((i + 0.5) / n), i);
  std::partial_sort(cells.begin(), cells.begin() + 4, cells.end());
  double best = cells.front().first;
  for (int c = 0; c < 4; ++c) {
    double lo = (cells[c].second - 0.5) / n, hi = (cells[c].second + 1.5) / n;
    lo = std::max(lo, 1e-15);
    hi = std::min(hi, 1 - 1e-15);
    const double r = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = value_at(x1), f2 = value_at(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - r * (hi - lo);
        f1 = value_at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (hi - lo);
        f2 = value_at(x2);
      }
    }
    best = std::min({best, f1, f2});
  }
  f0_ = spec_.f_min - Real(best) + Real(1e-9);
}

Scalar Roof::c_tilde() const {
  Scalar s;
  for (int a = 0; a < t_.d(); ++a) s += spec_.c_plus[a] + spec_.c_minus[a];
  return s;
}

bool Roof::is_singular(const Scalar& x) const {
  const Scalar one = Scalar::integer(1);
  for (int a = 0; a < t_.d(); ++a) {
    if (spec_.c_plus[a].sign() > 0 && (x - t_.left(a)).frac().is_zero()) return true;
    if (spec_.c_minus[a].sign() > 0 && (t_.right(a) - x).frac().is_zero()) return true;
  }
  return false;
}

Real Roof::value(const Scalar& x) const {
  Real sum(0.0);
  for (int a = 0; a < t_.d(); ++a) {
    if (spec_.c_plus[a].sign() > 0) {
      const Scalar dist = (x - t_.left(a)).frac();
      if (dist.is_zero()) throw Error(Errc::at_singularity, "f is singular at " + x.str(), a);
      sum -= spec_.c_plus[a].value() * log(dist.value());
    }
    if (spec_.c_minus[a].sign() > 0) {
      const Scalar dist = (t_.right(a) - x).frac();
      if (dist.is_zero()) throw Error(Errc::at_singularity, "f is singular at " + x.str(), a);
      sum -= spec_.c_minus[a].value() * log(dist.value());
    }
  }
  return sum + G(x.value()) + f0_;
}

Real Roof::derivative(const Scalar& x) const {
  Real sum(0.0);
  for (int a = 0; a < t_.d(); ++a) {
    if (spec_.c_plus[a].sign() > 0) {
      const Scalar dist = (x - t_.left(a)).frac();
      if (dist.is_zero()) throw Error(Errc::at_singularity, "f' is singular at " + x.str(), a);
      sum -= spec_.c_plus[a].value() / dist.value();
    }
    if (spec_.c_minus[a].sign() > 0) {
      const Scalar dist = (t_.right(a) - x).frac();
      if (dist.is_zero()) throw Error(Errc::at_singularity, "f' is singular at " + x.str(), a);
      sum += spec_.c_minus[a].value() / dist.value();
    }
  }
  return sum + g(x.value());
}

double Roof::value_at(double x) const {
  double sum = 0;
  for (int a = 0; a < t_.d(); ++a) {
    if (spec_.c_plus[a].sign() > 0) {
      sum -= spec_.c_plus[a].to_double() * std::log(frac(x - t_.left(a).to_double()));
    }
    if (spec_.c_minus[a].sign() > 0) {
      const double r = t_.right(a).to_double();
      sum -= spec_.c_minus[a].to_double() * std::log(frac(r - x));
    }
  }
  constexpr double kTwoPi = 6.283185307179586476925;
  for (const auto& term : spec_.g) {
    if (term.freq == 0) {
      sum += term.a.to_double() * x;
    } else {
      const double w = kTwoPi * static_cast<double>(term.freq);
      sum += term.a.to_double() * std::sin(w * x) / w - term.b.to_double() * (std::cos(w * x) - 1) / w;
    }
  }
  return sum + f0_.to_double();
}

double Roof::derivative_at(double x) const {
  double sum = 0;
  for (int a = 0; a < t_.d(); ++a) {
    if (spec_.c_plus[a].sign() > 0) sum -= spec_.c_plus[a].to_double() / frac(x - t_.left(a).to_double());
    if (spec_.c_minus[a].sign() > 0) sum += spec_.c_minus[a].to_double() / frac(t_.right(a).to_double() - x);
  }
  constexpr double kTwoPi = 6.283185307179586476925;
  for (const auto& term : spec_.g) {
    const double w = kTwoPi * static_cast<double>(term.freq);
    sum += term.freq == 0 ? term.a.to_double()
                          : term.a.to_double() * std::cos(w * x) + term.b.to_double() * std::sin(w * x);
  }
  return sum;
}

Real Roof::g(const Real& x) const {
  Real sum(0.0);
  for (const auto& term : spec_.g) {
    if (term.freq == 0) {
      sum += term.a;
      continue;
    }
    const Real w = two_pi() * Real(term.freq);
    sum += term.a * cos(w * x) + term.b * sin(w * x);
  }
  return sum;
}

Real Roof::G(const Real& x) const {
  Real sum(0.0);
  for (const auto& term : spec_.g) {
    if (term.freq == 0) {
      sum += term.a * x;
      continue;
    }
    const Real w = two_pi() * Real(term.freq);
    sum += term.a * sin(w * x) / w - term.b * (cos(w * x) - Real(1.0)) / w;
  }
  return sum;
}

Real Roof::g_bound() const {
  Real s(0.0);
  for (const auto& term : spec_.g) s += abs(term.a) + abs(term.b);
  return s;
}

Roof Roof::rescaled(const Scalar& s) const {
  RoofSpec spec = spec_;
  for (auto& c : spec.c_plus) c *= s;
  for (auto& c : spec.c_minus) c *= s;
  return Roof(t_, std::move(spec));
}

Real birkhoff(const Roof& roof, const Scalar& x, long n, RoofPart what) {
  const Iet& t = roof.iet();
  auto eval = [&](const Scalar& p, long i) {
    try {
      return what == RoofPart::f ? roof.value(p) : roof.derivative(p);
    } catch (const Error& e) {
      if (e.code() != Errc::at_singularity) throw;
      throw Error(Errc::orbit_hits_singularity,
                  "iterate " + std::to_string(i) + " is singular: " + p.str(), i);
    }
  };
  Real sum(0.0);
  Scalar p = x;
  if (n > 0) {
    for (long i = 0; i < n; ++i) {
      sum += eval(p, i);
      if (i + 1 < n) p = t.apply(p);
    }
  } else if (n < 0) {
    for (long i = -1; i >= n; --i) {
      p = t.apply(p, Direction::backward);
      sum -= eval(p, i);
    }
  }
  return sum;
}

FlowPoint flow_step(const Roof& roof, const FlowPoint& p, const Real& t) {
  const Iet& base = roof.iet();
  const Real target = p.s + t;
  Scalar x = p.x;
  Real acc(0.0);  // f^(n)(p.x)
  long n = 0;
  auto eval = [&](const Scalar& q) {
    try {
      return roof.value(q);
    } catch (const Error& e) {
      if (e.code() != Errc::at_singularity) throw;
      throw Error(Errc::orbit_hits_singularity, "flow passes a singular fibre", n);
    }
  };
  if (target.sign() >= 0) {
    while (true) {
      const Real v = eval(x);
      if (target < acc + v) break;
      acc += v;
      x = base.apply(x);
      ++n;
    }
  } else {
    while (acc > target) {
      x = base.apply(x, Direction::backward);
      --n;
      acc -= eval(x);
    }
  }
  return FlowPoint{x, target - acc};
}

Real flow_dist(const FlowPoint& p, const FlowPoint& q) {
  return circle_dist(p.x, q.x).value() + abs(p.s - q.s);
}

ClosestApproach closest_approach(const Iet& t_in, const Scalar& z, long r, Direction dir) {
  if (r < 1) throw Error(Errc::bad_argument, "closest_approach needs r >= 1");
  const Iet t = dir == Direction::forward ? t_in : t_in.inverse();
  const int d = t.d();
  ClosestApproach out;
  out.left.assign(d, std::nullopt);
  out.right.assign(d, std::nullopt);
  Scalar p = z;
  for (long i = 0; i < r; ++i) {
    for (int a = 0; a < d; ++a) {
      const Scalar l = p - t.left(a);
      if (l.sign() >= 0 && (!out.left[a] || l < *out.left[a])) out.left[a] = l;
      const Scalar rr = t.right(a) - p;
      if (rr.sign() >= 0 && (!out.right[a] || rr < *out.right[a])) out.right[a] = rr;
    }
    if (i + 1 < r) p = t.apply(p);
  }
  return out;
}

double CancAudit::m_prime_upto(int kk) const {
  double m = 0;
  for (const auto& row : rows) {
    if (row.k <= kk) m = std::max(m, row.r_max);
  }
  return m;
}

CancAudit canc_audit(const Roof& roof, int K, long samples_per_stage, std::uint64_t seed) {
  const Iet& t = roof.iet();
  const int d = t.d();
  Trace tr(t);
  const Schedule s = mmy_schedule(tr, d - 1, K);
  CancAudit out;
  for (int k = 0; k <= K; ++k) {
    const TowerData tw = towers(tr, s, k);
    auto rng = substream(seed, static_cast<std::uint64_t>(k));
    std::vector<double> values;
    while (static_cast<long>(values.size()) < samples_per_stage) {
      const int beta = static_cast<int>(below(rng, static_cast<std::uint64_t>(d)));
      const Scalar z = tw.lefts[beta] + tw.lengths[beta] * dyadic_unit(rng);
      if (!tw.heights[beta].fits_slong_p() || tw.heights[beta] > 10000000) {
        throw Error(Errc::cap_exceeded, "tower too tall for the audit", k);
      }
      const long r = 1 + static_cast<long>(below(rng, tw.heights[beta].get_ui()));
      Real fp;
      try {
        fp = birkhoff(roof, z, r, RoofPart::fprime);
      } catch (const Error& e) {
        if (e.code() == Errc::orbit_hits_singularity) continue;
        throw;
      }
      const ClosestApproach ca = closest_approach(t, z, r);
      Real sum = fp;
      for (int a = 0; a < d; ++a) {
        if (roof.spec().c_plus[a].sign() > 0 && ca.left[a]) {
          sum += roof.spec().c_plus[a].value() / ca.left[a]->value();
        }
        if (roof.spec().c_minus[a].sign() > 0 && ca.right[a]) {
          sum -= roof.spec().c_minus[a].value() / ca.right[a]->value();
        }
      }
      values.push_back((abs(sum) / Real(r)).to_double());
    }
    CancRow row;
    row.k = k;
    row.samples = static_cast<long>(values.size());
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      row.r_max = values.back();
      const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(values.size()))) - 1;
      row.r_q99 = values[idx];
    }
    out.m_prime = std::max(out.m_prime, row.r_max);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace iet
