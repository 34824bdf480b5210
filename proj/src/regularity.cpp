#include "iet/regularity.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <cstdint>
#include <algorithm>
#include <unordered_map>

#include "iet/error.hpp"

namespace iet {

VeechNu veech_nu(const Matrix& a) {
  for (const auto& row : a) {
    for (const auto& v : row) {
      if (v <= 0) throw Error(Errc::zero_entry, "matrix has a non-positive entry");
    }
  }
  const std::size_t d = a.size();
  VeechNu out{0, 0, 0};
  for (std::size_t al = 0; al < d; ++al) {
    for (std::size_t be = 0; be < d; ++be) {
      for (std::size_t ga = 0; ga < d; ++ga) {
        const mpq_class r1(a[al][ga], a[be][ga]);
        const mpq_class r2(a[ga][al], a[ga][be]);
        if (r1 > out.nu1) out.nu1 = r1;
        if (r2 > out.nu2) out.nu2 = r2;
      }
    }
  }
  for (auto* q : {&out.nu1, &out.nu2}) q->canonicalize();
  out.nu = out.nu1 > out.nu2 ? out.nu1 : out.nu2;
  return out;
}

BoundedTypeCertificate bounded_type_certificate(const Iet& t, int K) {
  if (K < 1) throw Error(Errc::bad_argument, "certificate depth K must be >= 1");
  Trace tr(t);
  const Schedule s = mmy_schedule(tr, t.d() - 1, K);
  BoundedTypeCertificate c;
  c.K = K;
  c.times = s.times;
  for (const auto& b : s.blocks) {
    c.norms.push_back(sup_norm(b));
    if (c.norms.back() > c.C_K) c.C_K = c.norms.back();
  }
  std::unordered_map<std::string, int> seen;
  for (int k = 0; k <= K; ++k) {
    const auto [it, fresh] = seen.emplace(tr.stage(s.times[k]).canonical(), k);
    if (!fresh) {
      c.period = k - it->second;
      c.cycle_start = it->second;
      break;
    }
  }
  c.certified = c.period.has_value() && t.is_exact();
  return c;
}

const char* scope_name(GapScope s) {
  switch (s) {
    case GapScope::letter:
      return "letter";
    case GapScope::all_letters:
      return "all";
    case GapScope::orbit:
      return "orbit";
  }
  return "?";
}

namespace {

// Circle gaps of the points {T^{j-k} l_a : 0 <= k < n} for one or all letters.
std::vector<Scalar> window_points(const Iet& t, long n, long j, int letter) {
  std::vector<Scalar> pts;
  for (int a = 0; a < t.d(); ++a) {
    if (letter >= 0 && a != letter) continue;
    Scalar p = t.power(t.left(a), j);
    for (long k = 0; k < n; ++k) {
      pts.push_back(p);
      if (k + 1 < n) p = t.apply(p, Direction::backward);
    }
  }
  return pts;
}

std::vector<Scalar> circle_gaps(std::vector<Scalar> pts, std::size_t& distinct) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  distinct = pts.size();
  std::vector<Scalar> gaps;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) gaps.push_back(pts[i + 1] - pts[i]);
  gaps.push_back(Scalar::integer(1) - pts.back() + pts.front());
  std::sort(gaps.begin(), gaps.end());
  return gaps;
}

// Points on the circle drawn from a fixed sorted universe, with the gaps
// between present neighbours. Min and max gaps come from lazy heaps.
class RankedGaps {
 public:
  explicit RankedGaps(std::vector<double> universe) : val_(std::move(universe)) {
    const std::size_t m = val_.size();
    count_.assign(m, 0);
    bits_.assign((m + 63) / 64, 0);
    nxt_.assign(m, 0);
    prv_.assign(m, 0);
  }

  std::size_t rank(double v) const {
    return static_cast<std::size_t>(std::lower_bound(val_.begin(), val_.end(), v) - val_.begin());
  }

  void insert(std::size_t r) {
    if (count_[r]++ > 0) return;
    set_bit(r, true);
    if (++live_ == 1) {
      nxt_[r] = prv_[r] = r;
    } else {
      const std::size_t p = find_prev(r);
      const std::size_t n = nxt_[p];
      nxt_[p] = r;
      prv_[r] = p;
      nxt_[r] = n;
      prv_[n] = r;
      push(p, r);
      push(r, n);
    }
    if (live_ == 1) push(r, r);
  }

  void erase(std::size_t r) {
    if (--count_[r] > 0) return;
    set_bit(r, false);
    if (--live_ == 0) return;
    const std::size_t p = prv_[r];
    const std::size_t n = nxt_[r];
    nxt_[p] = n;
    prv_[n] = p;
    push(p, n);
  }

  double min() { return top(min_heap_); }
  double max() { return top(max_heap_); }

 private:
  struct Entry {
    double gap;
    std::uint32_t left, right;
  };
  struct Less {
    bool operator()(const Entry& a, const Entry& b) const { return a.gap < b.gap; }
  };
  struct Greater {
    bool operator()(const Entry& a, const Entry& b) const { return a.gap > b.gap; }
  };

  double gap(std::size_t a, std::size_t b) const {
    return b > a ? val_[b] - val_[a] : val_[b] - val_[a] + 1;
  }

  bool valid(const Entry& e) const {
    return count_[e.left] > 0 && nxt_[e.left] == e.right && count_[e.right] > 0;
  }

  void push(std::size_t a, std::size_t b) {
    const Entry e{gap(a, b), static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    min_heap_.push_back(e);
    std::push_heap(min_heap_.begin(), min_heap_.end(), Greater{});
    max_heap_.push_back(e);
    std::push_heap(max_heap_.begin(), max_heap_.end(), Less{});
    if (min_heap_.size() > 8 * live_ + 64) rebuild();
  }

  template <class Heap>
  double top(Heap& h) {
    const bool is_min = &h == &min_heap_;
    while (!valid(h.front())) {
      if (is_min) {
        std::pop_heap(h.begin(), h.end(), Greater{});
      } else {
        std::pop_heap(h.begin(), h.end(), Less{});
      }
      h.pop_back();
    }
    return h.front().gap;
  }

  void rebuild() {
    min_heap_.clear();
    max_heap_.clear();
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      for (std::uint64_t b = bits_[w]; b != 0; b &= b - 1) {
        const std::size_t r = w * 64 + static_cast<std::size_t>(__builtin_ctzll(b));
        const Entry e{gap(r, nxt_[r]), static_cast<std::uint32_t>(r),
                      static_cast<std::uint32_t>(nxt_[r])};
        min_heap_.push_back(e);
        max_heap_.push_back(e);
      }
    }
    std::make_heap(min_heap_.begin(), min_heap_.end(), Greater{});
    std::make_heap(max_heap_.begin(), max_heap_.end(), Less{});
  }

  void set_bit(std::size_t r, bool on) {
    if (on) {
      bits_[r / 64] |= std::uint64_t{1} << (r % 64);
    } else {
      bits_[r / 64] &= ~(std::uint64_t{1} << (r % 64));
    }
  }

  // Nearest present rank before r, cyclically; at least one other is present.
  std::size_t find_prev(std::size_t r) const {
    std::size_t w = r / 64;
    std::uint64_t b = bits_[w] & ((std::uint64_t{1} << (r % 64)) - 1);
    for (std::size_t steps = 0; steps <= bits_.size(); ++steps) {
      if (b != 0) return w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(b));
      w = w == 0 ? bits_.size() - 1 : w - 1;
      b = bits_[w];
      if (w == r / 64) b &= ~(std::uint64_t{1} << (r % 64));
    }
    return r;
  }

  std::vector<double> val_;
  std::vector<int> count_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> nxt_, prv_;
  std::size_t live_ = 0;
  std::vector<Entry> min_heap_, max_heap_;
};

// Sorted distinct values; distinct exact points closer than the double
// resolution would be merged, so refuse them.
std::vector<double> universe_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] - v[i] < 1e-12) {
      throw Error(Errc::precision_exhausted, "orbit points closer than double resolution");
    }
  }
  return v;
}

// T^i l_a as doubles for i in [-span, span], from exact orbits.
std::vector<std::vector<double>> endpoint_orbits(const Iet& t, long span) {
  std::vector<std::vector<double>> out(t.d(), std::vector<double>(2 * span + 1));
  for (int a = 0; a < t.d(); ++a) {
    Scalar f = t.left(a);
    Scalar b = t.left(a);
    out[a][span] = f.to_double();
    for (long i = 1; i <= span; ++i) {
      f = t.apply(f);
      b = t.apply(b, Direction::backward);
      out[a][span + i] = f.to_double();
      out[a][span - i] = b.to_double();
    }
  }
  return out;
}

}  // namespace

PartitionGaps partition_gaps(const Iet& t, long n, long j, GapScope scope, int letter,
                             const Scalar& x) {
  if (n < 1) throw Error(Errc::bad_index, "partition size n must be >= 1");
  PartitionGaps out;
  out.n = n;
  out.j = j;
  out.scope = scope;
  out.letter = letter;
  std::vector<Scalar> pts;
  switch (scope) {
    case GapScope::letter:
      if (letter < 0 || letter >= t.d()) throw Error(Errc::bad_index, "letter out of range");
      [[fallthrough]];
    case GapScope::all_letters:
      if (j < 0 || j > n - 1) throw Error(Errc::bad_index, "j must satisfy 0 <= j <= n-1", j);
      pts = window_points(t, n, j, scope == GapScope::letter ? letter : -1);
      break;
    case GapScope::orbit:
      pts = t.orbit(x, 0, n - 1);
      break;
  }
  out.gaps = circle_gaps(std::move(pts), out.points);
  out.min_gap = out.gaps.front();
  out.max_gap = out.gaps.back();
  return out;
}

void scan_partitions(const Iet& t, long n_max,
                     const std::function<bool(const GapExtremes&)>& visit) {
  if (n_max < 1) return;
  const int d = t.d();
  const long span = n_max;
  const auto orb = endpoint_orbits(t, span);
  std::vector<RankedGaps> per;
  std::vector<std::vector<std::size_t>> rank_per(d), rank_all(d);
  std::vector<double> every;
  for (int a = 0; a < d; ++a) {
    per.emplace_back(universe_of(orb[a]));
    for (double v : orb[a]) rank_per[a].push_back(per[a].rank(v));
    every.insert(every.end(), orb[a].begin(), orb[a].end());
  }
  RankedGaps all(universe_of(every));
  for (int a = 0; a < d; ++a) {
    for (double v : orb[a]) rank_all[a].push_back(all.rank(v));
  }
  auto add = [&](long i) {
    for (int a = 0; a < d; ++a) {
      per[a].insert(rank_per[a][span + i]);
      all.insert(rank_all[a][span + i]);
    }
  };
  auto drop = [&](long i) {
    for (int a = 0; a < d; ++a) {
      per[a].erase(rank_per[a][span + i]);
      all.erase(rank_all[a][span + i]);
    }
  };
  // Window [j - n + 1, j]. The walk alternates direction in j so that each
  // new n starts from where the previous one ended.
  add(0);
  long lo = 0, hi = 0;
  for (long n = 1; n <= n_max; ++n) {
    const bool upward = n == 1 || hi == 0;
    if (n > 1) {
      if (upward) {
        add(--lo);  // window [-n+2, 0] -> [-n+1, 0], j = 0
      } else {
        add(++hi);  // window [0, n-2] -> [0, n-1], j = n-1
      }
    }
    GapExtremes ex;
    ex.n = n;
    auto record = [&](long j) {
      auto take = [&](RankedGaps& g, GapScope sc, int letter) {
        const double mn = g.min();
        const double mx = g.max();
        if (mn < ex.min_gap) {
          ex.min_gap = mn;
          ex.min_j = j;
          ex.min_scope = sc;
          ex.min_letter = letter;
        }
        if (mx > ex.max_gap) {
          ex.max_gap = mx;
          ex.max_j = j;
          ex.max_scope = sc;
          ex.max_letter = letter;
        }
      };
      for (int a = 0; a < d; ++a) take(per[a], GapScope::letter, a);
      take(all, GapScope::all_letters, -1);
    };
    if (upward) {
      record(0);
      for (long j = 1; j < n; ++j) {
        add(++hi);
        drop(lo++);
        record(j);
      }
    } else {
      record(n - 1);
      for (long j = n - 2; j >= 0; --j) {
        add(--lo);
        drop(hi--);
        record(j);
      }
    }
    if (!visit(ex)) return;
  }
}

double balance_constant_c(const Iet& t, long n_max) {
  double c = 0;
  scan_partitions(t, n_max, [&](const GapExtremes& ex) {
    const double n = static_cast<double>(ex.n);
    c = std::max({c, 1 / (n * ex.min_gap), n * ex.max_gap});
    return true;
  });
  return c;
}

BalancedVerdict balanced_verdict(const Iet& t, double c, long n_max) {
  if (!(c > 0)) throw Error(Errc::bad_argument, "balance constant must be positive");
  BalancedVerdict v;
  v.n_max = n_max;
  scan_partitions(t, n_max, [&](const GapExtremes& ex) {
    const double n = static_cast<double>(ex.n);
    if (!(1 / (c * n) < ex.min_gap)) {
      v = BalancedVerdict{false, n_max, ex.n, ex.min_j, ex.min_scope, ex.min_letter, ex.min_gap, true};
      return false;
    }
    if (!(ex.max_gap < c / n)) {
      v = BalancedVerdict{false, n_max, ex.n, ex.max_j, ex.max_scope, ex.max_letter, ex.max_gap, false};
      return false;
    }
    return true;
  });
  return v;
}

std::vector<std::pair<double, double>> gap_profile_j0(const Iet& t, long n_max) {
  std::vector<std::pair<double, double>> out;
  if (n_max < 1) return out;
  const auto orb = endpoint_orbits(t, n_max);
  std::vector<double> every;
  for (const auto& o : orb) every.insert(every.end(), o.begin(), o.end());
  RankedGaps all(universe_of(every));
  for (long n = 1; n <= n_max; ++n) {
    for (int a = 0; a < t.d(); ++a) all.insert(all.rank(orb[a][n_max - (n - 1)]));
    out.emplace_back(n * all.min(), n * all.max());
  }
  return out;
}

std::vector<std::pair<double, double>> orbit_gap_profile(const Iet& t, const Scalar& x,
                                                         long n_max) {
  std::vector<std::pair<double, double>> out;
  if (n_max < 1) return out;
  std::vector<double> pts;
  Scalar y = x;
  for (long n = 1; n <= n_max; ++n) {
    pts.push_back(y.to_double());
    if (n < n_max) y = t.apply(y);
  }
  RankedGaps g(universe_of(pts));
  for (long n = 1; n <= n_max; ++n) {
    g.insert(g.rank(pts[n - 1]));
    out.emplace_back(n * g.min(), n * g.max());
  }
  return out;
}

bool BalanceAudit::pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const AuditLine& l) { return l.pass; });
}

BalanceAudit balance_audit(const Iet& t, int K, const Scalar& C) {
  if (K < 0) throw Error(Errc::bad_argument, "negative audit depth");
  const int d = t.d();
  Trace tr(t);
  const Schedule s = mmy_schedule(tr, d - 1, K + 1);
  BalanceAudit out;
  out.K = K;
  out.C = C;
  for (int k = 0; k < std::max(K, 1); ++k) out.C_K = std::max<mpz_class>(out.C_K, sup_norm(s.blocks[k]));
  if (C < Scalar::rational(out.C_K, 1)) {
    throw Error(Errc::certificate_mismatch,
                "C = " + C.str() + " is below the block norm bound " + out.C_K.get_str());
  }
  auto line = [](const char* name) {
    AuditLine l;
    l.name = name;
    return l;
  };
  AuditLine lengths = line("length_balance"), heights = line("height_balance"),
            pigeon = line("pigeon"), growth_up = line("height_growth_upper"),
            growth_low = line("height_growth_lower");
  auto fail = [](AuditLine& l, int k, int a, int b) {
    if (l.pass) {
      l.pass = false;
      l.witness = "k=" + std::to_string(k) + " alpha=" + std::to_string(a) +
                  " beta=" + std::to_string(b);
    }
  };
  const Scalar one = Scalar::integer(1);
  const Scalar dd = Scalar::integer(d);
  const Scalar dC2 = dd * C * C;
  const Scalar lower_pigeon = one / dC2;
  Matrix h = identity_matrix(d);
  std::vector<mpz_class> heights_k = column_sums(h);
  for (int k = 0; k <= K; ++k) {
    const auto lam = tr.lengths(s.times[k]);
    const Matrix h_next = h * s.blocks[k];
    const auto heights_next = column_sums(h_next);
    for (int a = 0; a < d; ++a) {
      const Scalar ha = Scalar::rational(heights_k[a], 1);
      const Scalar prod = lam[a] * ha;
      ++pigeon.checks;
      if (prod < lower_pigeon || prod > one) fail(pigeon, k, a, a);
      for (int b = 0; b < d; ++b) {
        const Scalar hb = Scalar::rational(heights_k[b], 1);
        ++lengths.checks;
        if (lam[a] > C * lam[b]) fail(lengths, k, a, b);
        ++heights.checks;
        if (ha > C * hb) fail(heights, k, a, b);
        const Scalar hn = Scalar::rational(heights_next[b], 1);
        ++growth_up.checks;
        if (hn > dC2 * ha) fail(growth_up, k, a, b);
        ++growth_low.checks;
        if (hn * C < dd * ha) fail(growth_low, k, a, b);
      }
    }
    h = h_next;
    heights_k = heights_next;
  }
  out.lines = {lengths, heights, pigeon, growth_up, growth_low};
  return out;
}

mpz_class balance_matrix_constant(const Iet& t, int K) {
  const int r = std::max(2 * t.d() - 3, 2);
  Trace tr(t);
  const Schedule s = mmy_schedule(tr, t.d() - 1, K + r);
  mpz_class c = 0;
  for (int k = 0; k < K; ++k) {
    c = std::max<mpz_class>(c, sup_norm(s.blocks[k]));
    Matrix p = identity_matrix(t.d());
    for (int i = 0; i < r; ++i) p = p * s.blocks[k + i];
    c = std::max<mpz_class>(c, sup_norm(p));
  }
  return c;
}

RauzyMove rauzy_move(const Combinatorics& c, int eps) {
  if (eps != 0 && eps != 1) throw Error(Errc::bad_argument, "eps must be 0 or 1");
  const int last = c.d() - 1;
  RauzyMove m;
  m.next = c;
  m.winner = c.order(eps)[last];
  m.loser = c.order(1 - eps)[last];
  auto& row = m.next.pi[1 - eps];
  const int pos = row[m.winner];
  for (auto& p : row) {
    if (p > pos && p < last) {
      p += 1;
    } else if (p == last) {
      p = pos + 1;
    }
  }
  return m;
}

std::vector<mpz_class> char_poly(const Matrix& a) {
  // Faddeev-LeVerrier.
  const int d = static_cast<int>(a.size());
  std::vector<mpz_class> c(d + 1, 0);
  c[d] = 1;
  Matrix m(d, std::vector<mpz_class>(d, 0));
  for (int k = 1; k <= d; ++k) {
    for (int i = 0; i < d; ++i) m[i][i] += c[d - k + 1];
    m = a * m;
    mpz_class tr = 0;
    for (int i = 0; i < d; ++i) tr += m[i][i];
    c[d - k] = -tr / k;
  }
  return c;
}

namespace {

bool is_primitive(const Matrix& a) {
  const int d = static_cast<int>(a.size());
  std::vector<std::vector<bool>> p(d, std::vector<bool>(d)), b(d, std::vector<bool>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) b[i][j] = p[i][j] = a[i][j] > 0;
  }
  for (int k = 1; k <= (d - 1) * (d - 1) + 1; ++k) {
    bool positive = true;
    for (const auto& row : p) {
      for (bool v : row) positive = positive && v;
    }
    if (positive) return true;
    std::vector<std::vector<bool>> q(d, std::vector<bool>(d, false));
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < d; ++l) {
        if (!p[i][l]) continue;
        for (int j = 0; j < d; ++j) q[i][j] = q[i][j] || b[l][j];
      }
    }
    p = std::move(q);
  }
  return false;
}

long double perron_numeric(const Matrix& a) {
  const int d = static_cast<int>(a.size());
  std::vector<long double> v(d, 1), w(d);
  long double mu = 0;
  for (int it = 0; it < 2000; ++it) {
    long double s = 0;
    for (int i = 0; i < d; ++i) {
      w[i] = 0;
      for (int j = 0; j < d; ++j) w[i] += a[i][j].get_d() * v[j];
      s += w[i];
    }
    mu = s / std::accumulate(v.begin(), v.end(), 0.0L);
    for (int i = 0; i < d; ++i) v[i] = w[i] / s;
  }
  return mu;
}

// Remainder of p(x) divided by the monic x^2 - t x + n.
bool divides_quadratic(std::vector<mpz_class> p, const mpz_class& t, const mpz_class& n) {
  for (int k = static_cast<int>(p.size()) - 1; k >= 2; --k) {
    const mpz_class lead = p[k];
    p[k] = 0;
    p[k - 1] += lead * t;
    p[k - 2] -= lead * n;
  }
  return p[0] == 0 && p[1] == 0;
}

long square_free_part(mpz_class v, mpz_class& square_root) {
  square_root = 1;
  for (long f = 2; mpz_class(f) * f <= v; ++f) {
    while (v % (f * f) == 0) {
      v /= f * f;
      square_root *= f;
    }
  }
  return v.get_si();
}

// Kernel vector of a (d x d) matrix of rank d-1 over a field.
std::vector<Scalar> kernel_vector(std::vector<std::vector<Scalar>> m) {
  const int d = static_cast<int>(m.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < d && r < d; ++c) {
    int p = r;
    while (p < d && m[p][c].is_zero()) ++p;
    if (p == d) continue;
    std::swap(m[r], m[p]);
    const Scalar inv = Scalar::integer(1) / m[r][c];
    for (auto& v : m[r]) v *= inv;
    for (int i = 0; i < d; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      const Scalar f = m[i][c];
      for (int j = 0; j < d; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (r != d - 1) throw Error(Errc::not_primitive, "Perron eigenspace is not one-dimensional");
  std::vector<bool> is_pivot(d, false);
  for (int c : pivot_col) is_pivot[c] = true;
  int free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  std::vector<Scalar> v(d);
  v[free_col] = Scalar::integer(1);
  for (int i = 0; i < r; ++i) v[pivot_col[i]] = -m[i][free_col];
  return v;
}

}  // namespace

SelfSimilar self_similar(const Combinatorics& start, const std::vector<int>& eps) {
  start.validate();
  const int d = start.d();
  if (eps.empty()) throw Error(Errc::not_primitive, "empty loop");
  SelfSimilar out;
  Matrix a = identity_matrix(d);
  Combinatorics c = start;
  for (int e : eps) {
    const RauzyMove m = rauzy_move(c, e);
    for (auto& row : a) row[m.loser] += row[m.winner];
    out.winners.push_back(m.winner);
    c = m.next;
  }
  if (!(c == start)) throw Error(Errc::bad_argument, "moves do not return to the start pair");
  if (!is_primitive(a)) throw Error(Errc::not_primitive, "loop matrix has no positive power");
  out.loop_matrix = a;
  out.char_poly = char_poly(a);
  const long double mu = perron_numeric(a);

  // Exact Perron root in Q or Q(sqrt D).
  std::optional<Scalar> root;
  const mpz_class r1(static_cast<double>(std::llround(mu)));
  {
    mpz_class val = 0;
    for (int k = d; k >= 0; --k) val = val * r1 + out.char_poly[k];
    if (val == 0 && std::fabs(mu - std::llround(mu)) < 1e-9) root = Scalar::rational(r1, 1);
  }
  const mpz_class c0 = abs(out.char_poly[0]);
  for (long nv = 1; !root && c0 != 0 && nv <= c0 && nv <= 1000000; ++nv) {
    if (c0 % nv != 0) continue;
    for (long n : {nv, -nv}) {
      const long double tt = mu + n / mu;
      const mpz_class t(static_cast<double>(std::llround(tt)));
      if (std::fabs(mu * mu - t.get_d() * mu + n) > 1e-6 * mu * mu) continue;
      if (!divides_quadratic(out.char_poly, t, n)) continue;
      const mpz_class disc = t * t - 4 * n;
      if (disc <= 0) continue;
      mpz_class s;
      const long D = square_free_part(disc, s);
      if (D == 1) continue;
      root = Scalar::quadratic(t, s, 2, D);
      break;
    }
  }

  if (!root) {
    // Float instance from power iteration at the working precision.
    out.exact = false;
    out.perron_degree_too_high = true;
    std::vector<Real> v(d, Real(1.0)), w(d);
    Real delta;
    for (int it = 0; it < 4000; ++it) {
      Real s(0.0);
      for (int i = 0; i < d; ++i) {
        w[i] = Real(0.0);
        for (int j = 0; j < d; ++j) w[i] += Real(a[i][j]) * v[j];
        s += w[i];
      }
      delta = Real(0.0);
      for (int i = 0; i < d; ++i) {
        w[i] /= s;
        delta = max(delta, abs(w[i] - v[i]));
      }
      v.swap(w);
    }
    std::vector<Scalar> lengths;
    for (const auto& x : v) lengths.push_back(Scalar::floating(x, delta * Real(1000.0) + x.ulp()));
    out.perron = Scalar::floating(Real(static_cast<double>(mu)), Real(1e-12));
    out.iet = Iet::build(start, lengths);
    return out;
  }

  out.perron = *root;
  std::vector<std::vector<Scalar>> m(d, std::vector<Scalar>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m[i][j] = Scalar::rational(a[i][j], 1) - (i == j ? *root : Scalar());
  }
  auto v = kernel_vector(std::move(m));
  if (v[0].sign() < 0) {
    for (auto& x : v) x = -x;
  }
  for (const auto& x : v) {
    if (x.sign() <= 0) throw Error(Errc::not_primitive, "Perron eigenvector is not positive");
  }
  out.iet = Iet::build(start, v);

  // Replay: the raw path must follow the loop and come back to the start.
  Trace tr(out.iet);
  tr.extend_to(static_cast<long>(eps.size()));
  for (std::size_t n = 0; n < eps.size(); ++n) {
    if (tr.eps(static_cast<long>(n)) != eps[n]) {
      throw Error(Errc::bad_argument, "replay left the loop", static_cast<int64_t>(n));
    }
  }
  if (tr.stage(static_cast<long>(eps.size())).canonical() != out.iet.canonical()) {
    throw Error(Errc::bad_argument, "replay did not return to the start IET");
  }
  return out;
}

}  // namespace iet
