#include "iet/induction.hpp"

#include <set>

#include "iet/error.hpp"

namespace iet {

Matrix identity_matrix(int d) {
  Matrix m(d, std::vector<mpz_class>(d, 0));
  for (int i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<mpz_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

mpz_class sup_norm(const Matrix& a) {
  mpz_class best = 0;
  for (const auto& row : a) {
    for (const auto& v : row) {
      if (abs(v) > best) best = abs(v);
    }
  }
  return best;
}

mpz_class determinant(const Matrix& a) {
  // Bareiss fraction-free elimination.
  Matrix m = a;
  const std::size_t n = m.size();
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::vector<mpz_class> column_sums(const Matrix& a) {
  std::vector<mpz_class> h(a.size(), 0);
  for (const auto& row : a) {
    for (std::size_t j = 0; j < row.size(); ++j) h[j] += row[j];
  }
  return h;
}

Matrix InductionStep::theta(int d) const {
  Matrix m = identity_matrix(d);
  m[winner][loser] = 1;
  return m;
}

InductionStep rv_step(const Iet& t) {
  const int d = t.d();
  const int last = d - 1;
  const auto o0 = t.comb().order(0);
  const auto o1 = t.comb().order(1);
  const int cmp = (t.length(o0[last]) - t.length(o1[last])).sign();
  if (cmp == 0) {
    throw Error(Errc::tied_lengths, "lengths of " + t.comb().alphabet[o0[last]] + " and " +
                                        t.comb().alphabet[o1[last]] + " are equal");
  }
  InductionStep s;
  s.eps = cmp > 0 ? 0 : 1;
  s.winner = s.eps == 0 ? o0[last] : o1[last];
  s.loser = s.eps == 0 ? o1[last] : o0[last];

  Combinatorics c = t.comb();
  auto& row = c.pi[1 - s.eps];
  const int pos = row[s.winner];
  for (int a = 0; a < d; ++a) {
    if (row[a] > pos && row[a] < last) {
      row[a] += 1;
    } else if (row[a] == last) {
      row[a] = pos + 1;
    }
  }
  std::vector<Scalar> lengths = t.lengths();
  lengths[s.winner] -= lengths[s.loser];
  s.scale = Scalar::integer(1) - t.length(s.loser);
  s.result = Iet::build(std::move(c), std::move(lengths));
  return s;
}

Trace::Trace(Iet start) {
  stages_.push_back(std::move(start));
  scale_.push_back(Scalar::integer(1));
}

void Trace::extend_to(long n) {
  while (steps() < n) {
    InductionStep s;
    try {
      s = rv_step(stages_.back());
    } catch (const Error& e) {
      if (e.code() == Errc::tied_lengths) {
        throw Error(Errc::tied_lengths, "step " + std::to_string(steps()) + ": " + e.what(),
                    steps());
      }
      throw;
    }
    eps_.push_back(s.eps);
    winner_.push_back(s.winner);
    loser_.push_back(s.loser);
    scale_.push_back(scale_.back() * s.scale);
    stages_.push_back(std::move(s.result));
  }
}

std::vector<Scalar> Trace::lengths(long n) const {
  std::vector<Scalar> out = stages_[n].lengths();
  for (auto& l : out) l *= scale_[n];
  return out;
}

Matrix Trace::theta(long n) const {
  Matrix m = identity_matrix(d());
  m[winner_[n]][loser_[n]] = 1;
  return m;
}

Matrix Trace::product(long from, long to) const {
  // Right-multiplying by I + E_{w,l} adds column w to column l.
  Matrix m = identity_matrix(d());
  for (long n = from; n < to; ++n) {
    const int w = winner_[n];
    const int l = loser_[n];
    for (auto& row : m) row[l] += row[w];
  }
  return m;
}

Trace iterate(const Iet& t, long n) {
  if (n < 0) throw Error(Errc::bad_argument, "negative step count");
  Trace tr(t);
  tr.extend_to(n);
  return tr;
}

namespace {

void check_k(int K) {
  if (K < 0) throw Error(Errc::bad_argument, "negative block count");
}

void need(Trace& trace, long n, long max_steps) {
  if (n >= max_steps) {
    throw Error(Errc::depth_exceeded,
                "schedule needs more than " + std::to_string(max_steps) + " raw steps");
  }
  if (trace.steps() <= n) trace.extend_to(n + 1);
}

Schedule finish(Trace& trace, Schedule s) {
  for (std::size_t k = 0; k + 1 < s.times.size(); ++k) {
    s.blocks.push_back(trace.product(s.times[k], s.times[k + 1]));
  }
  return s;
}

}  // namespace

Schedule zorich_schedule(Trace& trace, int K, long max_steps) {
  check_k(K);
  Schedule s;
  s.kind = ScheduleKind::zorich;
  s.level = 1;
  s.times.push_back(0);
  long n = 0;
  for (int k = 0; k < K; ++k) {
    need(trace, n, max_steps);
    const int e = trace.eps(n);
    long m = n + 1;
    while (true) {
      need(trace, m, max_steps);
      if (trace.eps(m) != e) break;
      ++m;
    }
    s.times.push_back(m);
    n = m;
  }
  return finish(trace, std::move(s));
}

Schedule mmy_schedule(Trace& trace, int level, int K, long max_steps) {
  check_k(K);
  if (level < 1 || level >= trace.d()) {
    throw Error(Errc::bad_level, "level must be in [1, d-1], got " + std::to_string(level));
  }
  Schedule s;
  s.kind = ScheduleKind::mmy;
  s.level = level;
  s.times.push_back(0);
  long n = 0;
  for (int k = 0; k < K; ++k) {
    std::set<int> names;
    long m = n;
    while (true) {
      need(trace, m, max_steps);
      names.insert(trace.winner(m));
      if (static_cast<int>(names.size()) > level) break;
      ++m;
    }
    s.times.push_back(m);
    n = m;
  }
  return finish(trace, std::move(s));
}

Schedule raw_schedule(Trace& trace, int K) {
  check_k(K);
  trace.extend_to(K);
  Schedule s;
  s.kind = ScheduleKind::raw;
  for (long n = 0; n <= K; ++n) s.times.push_back(n);
  return finish(trace, std::move(s));
}

TowerData towers(const Trace& trace, const Schedule& schedule, int k) {
  if (k < 0 || k > schedule.size()) {
    throw Error(Errc::bad_index, "stage " + std::to_string(k) + " outside schedule");
  }
  const int d = trace.d();
  Matrix h = identity_matrix(d);
  for (int i = 0; i < k; ++i) h = h * schedule.blocks[i];
  TowerData out;
  out.stage = schedule.times[k];
  out.heights = column_sums(h);
  out.lengths = trace.lengths(out.stage);
  const Iet& st = trace.stage(out.stage);
  out.lefts.resize(d);
  for (int a = 0; a < d; ++a) out.lefts[a] = st.left(a) * trace.scale(out.stage);
  return out;
}

ReturnResult brute_force_return(const Iet& t, const Scalar& lo, const Scalar& hi,
                                const Scalar& x, long cap) {
  if (!(lo <= x && x < hi)) throw Error(Errc::bad_argument, "start point outside the subinterval");
  Scalar y = x;
  for (long n = 1; n <= cap; ++n) {
    y = t.apply(y);
    if (lo <= y && y < hi) return ReturnResult{n, y};
  }
  throw Error(Errc::cap_exceeded, "no return within " + std::to_string(cap) + " steps");
}

}  // namespace iet
