#include "iet/ratner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "iet/error.hpp"
#include "iet/fast_orbit.hpp"
#include "iet/random.hpp"

namespace iet {

namespace {

mpq_class q_min(const std::vector<mpq_class>& v) {
  mpq_class m = v.front();
  for (const auto& x : v) {
    if (x < m) m = x;
  }
  return m;
}

mpq_class pow_q(const mpq_class& x, int e) {
  mpq_class r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

long floor_long(const mpq_class& v) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return f.fits_slong_p() ? f.get_si() : LONG_MAX;
}

long ceil_long(const mpq_class& v) {
  mpz_class f;
  mpz_cdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return f.fits_slong_p() ? f.get_si() : LONG_MAX;
}

mpq_class to_q(double v) { return mpq_class(v); }

Scalar min_length(const Iet& t) {
  Scalar m = t.length(0);
  for (int a = 1; a < t.d(); ++a) m = min(m, t.length(a));
  return m;
}

Scalar dist_to_endpoints(const Iet& t, const Scalar& p) {
  Scalar m = circle_dist(p, t.left(0));
  for (int a = 1; a < t.d(); ++a) m = min(m, circle_dist(p, t.left(a)));
  return m;
}

constexpr long kMinOrbitScan = 64;

long scan_depth(const Scalar& eta, double c, double factor) {
  return static_cast<long>(std::floor(1.0 / (factor * eta.to_double() * c)));
}

// Exact orbit T^n x for n in [0, w] (dir forward) or [1, w] (backward,
// stored with index n).
std::vector<Scalar> exact_orbit(const Iet& t, const Scalar& x, long w, Direction dir) {
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(w + 1));
  out.push_back(x);
  for (long n = 1; n <= w; ++n) out.push_back(t.apply(out.back(), dir));
  return out;
}

struct DeltaSeq {
  // S[n] for the chosen direction.
  std::vector<Real> S;
  std::vector<Scalar> xs, ys;  // orbit points T^{+-n}
};

// Extends S to index n_max. Forward: S_{n+1} = S_n + f(T^n x) - f(T^n y);
// backward: S_{n+1} = S_n - (f(T^{-n-1} x) - f(T^{-n-1} y)).
void extend(const Roof& roof, const Scalar& x, const Scalar& y, Direction dir, long n_max,
            DeltaSeq& s) {
  const Iet& t = roof.iet();
  if (s.S.empty()) {
    s.S.push_back(Real(0.0));
    s.xs.push_back(x);
    s.ys.push_back(y);
  }
  auto eval = [&](const Scalar& p, long i) {
    try {
      return roof.value(p);
    } catch (const Error& e) {
      if (e.code() != Errc::at_singularity) throw;
      throw Error(Errc::orbit_hits_singularity, "iterate " + std::to_string(i) + " is singular", i);
    }
  };
  while (static_cast<long>(s.S.size()) <= n_max) {
    const long n = static_cast<long>(s.S.size()) - 1;
    if (dir == Direction::forward) {
      s.S.push_back(s.S.back() + eval(s.xs[n], n) - eval(s.ys[n], n));
      s.xs.push_back(t.apply(s.xs[n]));
      s.ys.push_back(t.apply(s.ys[n]));
    } else {
      s.xs.push_back(t.apply(s.xs[n], Direction::backward));
      s.ys.push_back(t.apply(s.ys[n], Direction::backward));
      s.S.push_back(s.S.back() - (eval(s.xs[n + 1], -n - 1) - eval(s.ys[n + 1], -n - 1)));
    }
  }
}

struct Branch {
  std::string name;
  long M = 0;
  Real p;
};

std::vector<Branch> branches_at(const DeltaSeq& s, long k, Direction dir, const mpq_class& kappa) {
  const long m_short = floor_long((1 - kappa) * k);
  if (dir == Direction::forward) {
    return {{"ka", k + 1, s.S[k + 1]}, {"ka2", m_short, s.S[k]}};
  }
  return {{"ka3", k, s.S[k]}, {"ka4", m_short, s.S[k - 1]}};
}

struct Check {
  Real deviation, cocycle, orbit;
};

Check check_window(const DeltaSeq& s, long M, long L, const Real& p) {
  Check c{Real(0.0), Real(0.0), Real(0.0)};
  for (long n = 0; n <= L; ++n) {
    c.deviation = max(c.deviation, abs(s.S[M + n] - s.S[M]));
    c.cocycle = max(c.cocycle, abs(s.S[M + n] - p));
    c.orbit = max(c.orbit, circle_dist(s.xs[M + n], s.ys[M + n]).value());
  }
  return c;
}

}  // namespace

bool RatnerConstants::in_P(const Real& p) const {
  const Real a = abs(p);
  return a >= Real(p_low) && a <= Real(H);
}

RatnerConstants derive_constants(const ConstantInputs& in) {
  if (in.c < 1 || in.C < 1 || in.d < 2 || in.C_tilde <= 0 || in.eps <= 0 || in.N < 1 ||
      in.M_prime < 0 || in.D < 0) {
    throw Error(Errc::bad_inputs, "constants need c, C >= 1, d >= 2, C~, eps > 0, N >= 1, M', D >= 0");
  }
  RatnerConstants k;
  k.in = in;
  const mpq_class c4 = pow_q(in.c, 4);
  const mpq_class C2 = in.C * in.C;
  const mpq_class C3 = C2 * in.C;
  const mpq_class A = 400 * c4 + 1;
  k.H = 2 * (in.M_prime * in.C / A + in.C_tilde) * (in.d * C3 * A / (32 * in.c) + 1);
  k.p_low = 1 / (1600 * c4);

  k.kappa_terms.push_back(16 * in.c / (C3 * A));
  if (in.M_prime > 0) k.kappa_terms.push_back(8 * in.c * in.eps / (in.d * C2 * in.M_prime));
  k.kappa_terms.push_back(mpq_class(2) / (C3 * A));
  k.kappa_terms.push_back(in.eps / (2 * in.C_tilde * in.C));
  k.kappa = q_min(k.kappa_terms);

  const mpq_class c3 = in.c * in.c * in.c;
  const mpq_class c5 = c4 * in.c;
  k.delta_terms.push_back(in.eps);
  k.delta_terms.push_back(1 / (64 * in.c));
  k.delta_terms.push_back(1 / (256 * c3));
  k.delta_terms.push_back(k.kappa / (512 * c5 * in.N));
  k.delta_terms.push_back(1 / (2 * in.c * A));
  if (in.D > 0) {
    k.delta_terms.push_back(mpq_class(3) / (4000 * c4 * in.D));
    k.delta_terms.push_back(in.eps / (4 * in.D));
  }
  k.delta = q_min(k.delta_terms);
  for (auto* v : {&k.H, &k.p_low, &k.kappa, &k.delta}) v->canonicalize();
  return k;
}

DEstimate estimate_D(const Roof& roof, int grid_points) {
  const Iet& t = roof.iet();
  const int first = t.comb().order(0).front();
  if (!(roof.spec().c_plus[first] == Scalar::integer(1))) {
    throw Error(Errc::not_normalized, "C+ on the first letter of the top row must be 1");
  }
  if (grid_points < 2) throw Error(Errc::bad_argument, "estimate_D needs at least two grid points");
  const double w = 0.5 * min_length(t).to_double();
  const double lo = std::log(w * 1e-12);
  const double hi = std::log(w * (1 - 1e-9));
  DEstimate out;
  for (int i = 0; i < grid_points; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (grid_points - 1));
    const Scalar xs = Scalar::rational(to_q(x));
    const Real v = abs(roof.derivative(xs) + Real(1.0) / xs.value());
    out.sup = std::max(out.sup, v.to_double());
  }
  out.D = 1.1 * out.sup;
  return out;
}

SeparationResult separation_count(const Iet& t, const Scalar& x, const Scalar& delta, double c) {
  if (delta.sign() <= 0) throw Error(Errc::bad_argument, "delta must be positive");
  SeparationResult r;
  r.window = static_cast<long>(std::floor(1.0 / (8.0 * delta.to_double() * c)));

  auto fast = [&]() {
    const FastIet f(t);
    const double d = delta.to_double();
    SeparationResult out = r;
    for (Direction dir : {Direction::forward, Direction::backward}) {
      FastIet::Point p = to_fast(x);
      for (long n = 0; n <= r.window; ++n) {
        if (n > 0) p = f.apply(p, dir);
        if (dir == Direction::backward && n == 0) continue;
        double lo, hi;
        f.dist_to_endpoints(p, lo, hi);
        // Ambiguous within the error bound: defer to exact arithmetic.
        if (lo < d && hi >= d) throw Error(Errc::precision_exhausted, "separation undecided", n);
        if (hi < d) {
          const long idx = dir == Direction::forward ? n : -n;
          int best = 0;
          double bd = 2;
          for (int a = 0; a < f.d(); ++a) {
            const double u = std::fabs(p.x - f.left(a));
            const double dd = std::min(u, 1 - u);
            if (dd < bd) bd = dd, best = a;
          }
          ++out.count;
          out.witnesses.emplace_back(idx, best);
        }
      }
    }
    return out;
  };
  auto exact = [&]() {
    SeparationResult out = r;
    for (Direction dir : {Direction::forward, Direction::backward}) {
      Scalar p = x;
      for (long n = 0; n <= r.window; ++n) {
        if (n > 0) p = t.apply(p, dir);
        if (dir == Direction::backward && n == 0) continue;
        for (int a = 0; a < t.d(); ++a) {
          if (circle_dist(p, t.left(a)) < delta) {
            ++out.count;
            out.witnesses.emplace_back(dir == Direction::forward ? n : -n, a);
            break;
          }
        }
      }
    }
    return out;
  };
  try {
    r = fast();
  } catch (const Error& e) {
    if (e.code() != Errc::precision_exhausted) throw;
    r = exact();
  }
  std::sort(r.witnesses.begin(), r.witnesses.end());
  r.events = r.count;
  for (std::size_t i = 1; i < r.witnesses.size(); ++i) {
    const auto [n1, a] = r.witnesses[i - 1];
    const auto [n2, b] = r.witnesses[i];
    if (t.is_exact() && t.power(t.left(a), n2 - n1) == t.left(b)) --r.events;
  }
  return r;
}

const char* direction_name(DirectionChoice d) {
  switch (d) {
    case DirectionChoice::forward: return "forward";
    case DirectionChoice::backward: return "backward";
    case DirectionChoice::both: return "both";
    case DirectionChoice::neither: return "neither";
  }
  return "neither";
}

const char* mode_name(Mode m) { return m == Mode::strict ? "strict" : "adaptive"; }

DirectionChoice select_direction(const Iet& t, const Scalar& x, const Scalar& eta, double c) {
  const long w = scan_depth(eta, c, 16);
  const Scalar two_eta = eta + eta;
  bool odl = true, odl2 = true;
  Scalar p = x;
  for (long n = 0; n <= w && odl; ++n) {
    if (n > 0) p = t.apply(p);
    if (dist_to_endpoints(t, p) < two_eta) odl = false;
  }
  p = x;
  for (long n = 1; n <= w && odl2; ++n) {
    p = t.apply(p, Direction::backward);
    if (dist_to_endpoints(t, p) < two_eta) odl2 = false;
  }
  if (odl && odl2) return DirectionChoice::both;
  if (odl) return DirectionChoice::forward;
  if (odl2) return DirectionChoice::backward;
  return DirectionChoice::neither;
}

namespace {

std::vector<long> hit_times(const Iet& t, const Scalar& x, const Scalar& eta, double c, long k_lo,
                            const Scalar& upper, Direction dir, bool first_only) {
  const long k_hi = scan_depth(eta, c, 32);
  const Scalar two_eta = eta + eta;
  std::vector<long> out;
  Scalar p = x;
  for (long k = 1; k <= k_hi; ++k) {
    p = t.apply(p, dir);
    if (k >= k_lo && two_eta < p && p < upper) {
      out.push_back(k);
      if (first_only) break;
    }
  }
  return out;
}

}  // namespace

long find_hit_time(const Iet& t, const Scalar& x, const Scalar& eta, double c, long k_lo,
                   const Scalar& upper, Direction dir) {
  const auto ks = hit_times(t, x, eta, c, k_lo, upper, dir, true);
  if (ks.empty()) {
    throw Error(Errc::not_found, "no hit time in [" + std::to_string(k_lo) + ", " +
                                     std::to_string(scan_depth(eta, c, 32)) + "]");
  }
  return ks.front();
}

mpq_class pipeline_delta(const RatnerConstants& k, Mode mode) {
  if (mode == Mode::strict) return k.delta;
  const mpq_class b = 1 / (64 * k.in.c);
  return k.in.eps < b ? k.in.eps : b;
}

Scalar hit_upper(const Iet& t, const RatnerConstants& k, const Scalar& eta, Mode mode) {
  const Scalar u = Scalar::rational(400 * pow_q(k.in.c, 4)) * eta;
  if (mode == Mode::strict) return u;
  return min(u, Scalar::rational(mpq_class(1, 2)) * min_length(t) - eta);
}

long hit_lower(const RatnerConstants& k, Mode mode) {
  return mode == Mode::strict ? ceil_long(k.in.N / k.kappa) : k.in.N + 1;
}

PairResult drift_certificate(const Roof& roof, const Scalar& x_in, const Scalar& y_in,
                             const RatnerConstants& k, const PipelineOptions& opt) {
  PairResult res;
  const Iet& t = roof.iet();
  const double c = k.in.c.get_d();
  WorkingPrecision wp(opt.precision);
  try {
    const Scalar eta = circle_dist(x_in, y_in);
    if (eta.is_zero()) throw Error(Errc::same_orbit, "x equals y");
    // Order the pair so that y = x + eta on the circle.
    Scalar x = x_in, y = y_in;
    if (!((x + eta).frac() == y)) std::swap(x, y);
    // Collision scan first, to at least kMinOrbitScan steps each way.
    const long w = std::max(scan_depth(eta, c, 16), kMinOrbitScan);
    for (Direction dir : {Direction::forward, Direction::backward}) {
      const auto orb = exact_orbit(t, x, w, dir);
      for (long n = 0; n <= w; ++n) {
        if (orb[n] == y) {
          throw Error(Errc::same_orbit, "y = T^" + std::to_string(dir == Direction::forward ? n : -n) + " x",
                      dir == Direction::forward ? n : -n);
        }
      }
    }

    if (!(eta < Scalar::rational(pipeline_delta(k, opt.mode)))) {
      throw Error(Errc::pair_too_far, "eta = " + eta.str() + " is not below delta");
    }

    DriftCertificate cert;
    cert.x = x;
    cert.y = y;
    cert.eta = eta;
    cert.odl = select_direction(t, x, eta, c);
    if (cert.odl == DirectionChoice::neither) {
      res.status = "NeitherHolds";
      res.detail = "neither window condition holds";
      return res;
    }
    const Direction dir =
        cert.odl == DirectionChoice::backward ? Direction::backward : Direction::forward;
    cert.direction = dir;

    const Scalar upper = hit_upper(t, k, eta, opt.mode);
    const long k_lo = hit_lower(k, opt.mode);
    const auto ks = hit_times(t, x, eta, c, k_lo, upper, dir, opt.mode == Mode::strict);
    if (ks.empty()) {
      throw Error(Errc::not_found, "no hit time in [" + std::to_string(k_lo) + ", " +
                                       std::to_string(scan_depth(eta, c, 32)) + "]");
    }

    const Real eps(k.in.eps);
    const Real jump_floor(1 / (800 * pow_q(k.in.c, 4)));
    const long N = k.in.N;
    DeltaSeq seq;
    bool any_branch = false;
    std::string last_fail;
    std::optional<long> fail_index;
    for (long hk : ks) {
      const long L_max = ceil_long(k.kappa * (hk + 1));
      extend(roof, x, y, dir, std::max(hk + 1, hk + 1 + L_max), seq);
      for (const auto& b : branches_at(seq, hk, dir, k.kappa)) {
        if (!k.in_P(b.p)) continue;
        const long L = ceil_long(k.kappa * b.M);
        if (b.M < N || L < N) continue;
        any_branch = true;
        const Check ch = check_window(seq, b.M, L, b.p);
        if (!(ch.deviation < eps && ch.cocycle < eps && ch.orbit < eps)) {
          last_fail = "drift leaves eps at k = " + std::to_string(hk) + " (" + b.name + ")";
          fail_index = hk;
          continue;
        }
        const Real jump = dir == Direction::forward ? abs(seq.S[hk + 1] - seq.S[hk])
                                                    : abs(seq.S[hk] - seq.S[hk - 1]);

        // Re-evaluate from scratch at doubled precision.
        bool ok = false;
        {
          WorkingPrecision wp2(2 * opt.precision);
          DeltaSeq s2;
          extend(roof, x, y, dir, std::max(b.M + L, hk + 1), s2);
          Real p2 = s2.S[b.name == "ka" ? hk + 1 : b.name == "ka4" ? hk - 1 : hk];
          const Check c2 = check_window(s2, b.M, L, p2);
          const Real j2 = dir == Direction::forward ? abs(s2.S[hk + 1] - s2.S[hk])
                                                    : abs(s2.S[hk] - s2.S[hk - 1]);
          ok = k.in_P(p2) && L == ceil_long(k.kappa * b.M) && c2.deviation < eps &&
               c2.cocycle < eps && c2.orbit < eps && j2 >= jump_floor;
        }
        if (!ok) {
          last_fail = "re-evaluation rejects k = " + std::to_string(hk) + " (" + b.name + ")";
          fail_index = hk;
          continue;
        }
        cert.k = hk;
        cert.branch = b.name;
        cert.M = b.M;
        cert.L = L;
        cert.p = b.p;
        cert.p_in_P = k.in_P(b.p);
        cert.deviation = ch.deviation;
        cert.cocycle_deviation = ch.cocycle;
        cert.orbit_distance = ch.orbit;
        cert.jump = jump;
        cert.reverified = true;
        res.cert = cert;
        return res;
      }
    }
    if (!any_branch) throw Error(Errc::no_branch_in_p, "no branch value lies in P");
    throw Error(Errc::drift_not_kept, last_fail, fail_index);
  } catch (const Error& e) {
    res.status = std::string(errc_name(e.code()));
    res.detail = e.what();
    if (e.index()) res.detail += " [index " + std::to_string(*e.index()) + "]";
  }
  return res;
}

long SweepReport::failed() const {
  long n = 0;
  for (const auto& p : pairs) n += p.result.status != "ok";
  return n;
}

SweepReport swr_sweep(const Roof& roof, const RatnerConstants& k, const std::vector<Scalar>& scales,
                      long pairs_per_scale, std::uint64_t seed, const PipelineOptions& opt, int jobs) {
  SweepReport rep;
  rep.mode = opt.mode;
  const long total = static_cast<long>(scales.size()) * std::max(0L, pairs_per_scale);
  rep.pairs.resize(static_cast<std::size_t>(total));
  const Scalar one = Scalar::integer(1);
  for (long i = 0; i < total; ++i) {
    auto rng = substream(seed, static_cast<std::uint64_t>(i));
    auto& sp = rep.pairs[i];
    sp.eta = scales[i / pairs_per_scale];
    sp.x = dyadic_unit(rng);
    sp.y = (sp.x + sp.eta).frac();
  }

  std::atomic<long> next{0};
  auto worker = [&]() {
    WorkingPrecision wp(opt.precision);
    for (long i = next++; i < total; i = next++) {
      auto& sp = rep.pairs[i];
      sp.result = drift_certificate(roof, sp.x, sp.y, k, opt);
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(std::max(1L, total))));
  std::vector<std::thread> pool;
  for (int j = 1; j < n_threads; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t s = 0; s < scales.size(); ++s) {
    ScaleSummary sum;
    sum.eta = scales[s];
    std::map<std::string, long> branches, failures;
    bool first = true;
    for (long j = 0; j < pairs_per_scale; ++j) {
      const auto& r = rep.pairs[s * pairs_per_scale + j].result;
      ++sum.pairs;
      if (!r.cert) {
        ++failures[r.status];
        continue;
      }
      const auto& c = *r.cert;
      ++sum.ok;
      (c.direction == Direction::forward ? sum.forward : sum.backward)++;
      sum.odl_both += c.odl == DirectionChoice::both;
      ++branches[c.branch];
      const double p = c.p.to_double();
      const double ap = std::fabs(p);
      const double lm = static_cast<double>(c.L) / static_cast<double>(c.M);
      if (first) {
        sum.p_abs_min = sum.p_abs_max = ap;
        sum.p_min = sum.p_max = p;
        sum.min_L_over_M = lm;
        first = false;
      }
      sum.p_abs_min = std::min(sum.p_abs_min, ap);
      sum.p_abs_max = std::max(sum.p_abs_max, ap);
      sum.p_min = std::min(sum.p_min, p);
      sum.p_max = std::max(sum.p_max, p);
      sum.min_L_over_M = std::min(sum.min_L_over_M, lm);
      sum.max_deviation = std::max(sum.max_deviation, c.deviation.to_double());
      sum.p_in_P += c.p_in_P;
    }
    sum.branches.assign(branches.begin(), branches.end());
    sum.failures.assign(failures.begin(), failures.end());
    rep.scales.push_back(std::move(sum));
  }
  return rep;
}

}  // namespace iet
