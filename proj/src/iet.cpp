#include "iet/iet.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "iet/error.hpp"

namespace iet {

std::vector<int> Combinatorics::order(int e) const {
  std::vector<int> out(pi[e].size());
  for (int a = 0; a < d(); ++a) out[pi[e][a]] = a;
  return out;
}

int Combinatorics::letter(const std::string& name) const {
  const auto it = std::find(alphabet.begin(), alphabet.end(), name);
  if (it == alphabet.end()) throw Error(Errc::alphabet_mismatch, "unknown letter " + name);
  return static_cast<int>(it - alphabet.begin());
}

void Combinatorics::validate() const {
  if (d() < 2) throw Error(Errc::alphabet_mismatch, "need at least two letters");
  std::set<std::string> names(alphabet.begin(), alphabet.end());
  if (static_cast<int>(names.size()) != d()) {
    throw Error(Errc::alphabet_mismatch, "duplicate letters in alphabet");
  }
  for (int e = 0; e < 2; ++e) {
    if (static_cast<int>(pi[e].size()) != d()) {
      throw Error(Errc::alphabet_mismatch, "row " + std::to_string(e) + " has wrong size");
    }
    std::vector<bool> seen(d(), false);
    for (int p : pi[e]) {
      if (p < 0 || p >= d() || seen[p]) {
        throw Error(Errc::alphabet_mismatch, "row " + std::to_string(e) + " is not a bijection");
      }
      seen[p] = true;
    }
  }
}

bool Combinatorics::admissible() const {
  // pi0^{-1}{1..j} != pi1^{-1}{1..j} for 1 <= j < d.
  const auto o0 = order(0);
  const auto o1 = order(1);
  std::vector<int> s0, s1;
  for (int j = 0; j + 1 < d(); ++j) {
    s0.push_back(o0[j]);
    s1.push_back(o1[j]);
    auto a = s0, b = s1;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) return false;
  }
  return true;
}

std::string Combinatorics::str() const {
  std::string out;
  for (int e = 0; e < 2; ++e) {
    if (e == 1) out += " /";
    for (int a : order(e)) out += (out.empty() ? "" : " ") + alphabet[a];
  }
  return out;
}

Combinatorics Combinatorics::from_rows(const std::vector<std::string>& alphabet,
                                       const std::vector<std::string>& row0,
                                       const std::vector<std::string>& row1) {
  Combinatorics c;
  c.alphabet = alphabet;
  const std::vector<std::string>* rows[2] = {&row0, &row1};
  for (int e = 0; e < 2; ++e) {
    if (rows[e]->size() != alphabet.size()) {
      throw Error(Errc::alphabet_mismatch, "row length differs from alphabet size");
    }
    c.pi[e].assign(alphabet.size(), -1);
    for (std::size_t p = 0; p < rows[e]->size(); ++p) {
      const int a = c.letter((*rows[e])[p]);
      if (c.pi[e][a] != -1) throw Error(Errc::alphabet_mismatch, "letter repeated in a row");
      c.pi[e][a] = static_cast<int>(p);
    }
  }
  c.validate();
  return c;
}

Iet Iet::build(Combinatorics comb, std::vector<Scalar> lengths) {
  comb.validate();
  if (static_cast<int>(lengths.size()) != comb.d()) {
    throw Error(Errc::alphabet_mismatch, "length vector size differs from alphabet size");
  }
  for (std::size_t a = 0; a < lengths.size(); ++a) {
    if (lengths[a].sign() <= 0) {
      throw Error(Errc::non_positive_length, "length of " + comb.alphabet[a] + " is not positive",
                  static_cast<int64_t>(a));
    }
  }
  if (!comb.admissible()) throw Error(Errc::not_admissible, "reducible pair " + comb.str());

  Iet t;
  t.comb_ = std::move(comb);
  Scalar total;
  for (const auto& l : lengths) total += l;
  for (auto& l : lengths) {
    l /= total;
    if (!l.is_exact()) t.exact_ = false;
    if (l.field() != 0) t.field_ = l.field();
  }
  t.lengths_ = std::move(lengths);
  const int d = t.d();
  t.order_[0] = t.comb_.order(0);
  t.order_[1] = t.comb_.order(1);
  t.left_.assign(d, Scalar());
  t.left_image_.assign(d, Scalar());
  t.offset_.assign(d, Scalar());
  Scalar acc;
  for (int p = 0; p < d; ++p) {
    t.left_[t.order_[0][p]] = acc;
    acc += t.lengths_[t.order_[0][p]];
  }
  acc = Scalar();
  for (int p = 0; p < d; ++p) {
    t.left_image_[t.order_[1][p]] = acc;
    acc += t.lengths_[t.order_[1][p]];
  }
  for (int a = 0; a < d; ++a) t.offset_[a] = t.left_image_[a] - t.left_[a];
  return t;
}

int Iet::locate(const Scalar& x, Direction dir) const {
  static const Scalar one = Scalar::integer(1);
  if (x.sign() < 0 || !(x < one)) {
    throw Error(Errc::out_of_domain, "point " + x.str() + " outside [0, 1)");
  }
  const auto& ord = order_[dir == Direction::forward ? 0 : 1];
  const auto& lefts = dir == Direction::forward ? left_ : left_image_;
  // Largest position whose left endpoint is <= x.
  int lo = 0, hi = d() - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (lefts[ord[mid]] <= x) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return ord[lo];
}

Scalar Iet::apply(const Scalar& x, Direction dir) const {
  const int a = locate(x, dir);
  return dir == Direction::forward ? x + offset_[a] : x - offset_[a];
}

std::vector<Scalar> Iet::orbit(const Scalar& x, long n_from, long n_to) const {
  if (n_from > n_to) throw Error(Errc::bad_argument, "orbit range is empty");
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(n_to - n_from + 1));
  Scalar y = power(x, n_from);
  out.push_back(y);
  for (long n = n_from; n < n_to; ++n) {
    y = apply(y);
    out.push_back(y);
  }
  return out;
}

Scalar Iet::power(const Scalar& x, long n) const {
  Scalar y = x;
  const Direction dir = n >= 0 ? Direction::forward : Direction::backward;
  for (long i = 0; i < (n >= 0 ? n : -n); ++i) y = apply(y, dir);
  return y;
}

Iet Iet::inverse() const {
  Combinatorics c = comb_;
  std::swap(c.pi[0], c.pi[1]);
  return build(std::move(c), lengths_);
}

std::string Iet::canonical() const {
  std::string out = comb_.str() + " |";
  for (const auto& l : lengths_) out += " " + l.str();
  return out;
}

KeaneVerdict keane_scan(const Iet& t, long depth) {
  if (depth < 1) throw Error(Errc::bad_argument, "keane_scan depth must be >= 1");
  if (!t.is_exact()) {
    throw Error(Errc::float_mode_uncertifiable, "Keane scan needs exact lengths");
  }
  std::unordered_map<std::string, int> targets;
  std::vector<int> sources;
  for (int a = 0; a < t.d(); ++a) {
    if (t.comb().pi[0][a] != 0) {
      targets.emplace(t.left(a).str(), a);
      sources.push_back(a);
    }
  }
  KeaneVerdict v;
  v.depth = depth;
  std::vector<Scalar> pts;
  for (int a : sources) pts.push_back(t.left(a));
  for (long n = 1; n <= depth; ++n) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      pts[i] = t.apply(pts[i]);
      const auto it = targets.find(pts[i].str());
      if (it != targets.end()) {
        v.violated = true;
        v.n = n;
        v.alpha = sources[i];
        v.beta = it->second;
        return v;
      }
    }
  }
  return v;
}

Scalar circle_dist(const Scalar& x, const Scalar& y) {
  static const Scalar one = Scalar::integer(1);
  const Scalar f = (x - y).frac();
  return min(f, one - f);
}

}  // namespace iet
