#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <type_traits>
#include <utility>
#include <vector>

#include "pdde/errors.hpp"
#include "pdde/numeric.hpp"

namespace pdde {

// Degree caps applied by multiplicative operations on series coefficients.
// Terms above a cap are discarded; a cap of kNone keeps everything.
struct Caps {
  static constexpr int kNone = std::numeric_limits<int>::max() / 4;
  int u = kNone;
  int x = kNone;
};

template <class V, class R>
V convert_scalar(const R& value) {
  if constexpr (std::is_same_v<V, R>) {
    return value;
  } else if constexpr (std::is_same_v<V, BigFloat> && std::is_same_v<R, Rational>) {
    return to_bigfloat(value);
  } else {
    return V(value);
  }
}

// ---------------------------------------------------------------------------
// CoeffPoly<R>: polynomial in the catalytic variable u and the marking
// variable x over a coefficient ring R.  Terms are sorted by (du, dx) and
// never hold a zero coefficient.
// ---------------------------------------------------------------------------
template <class R>
class CoeffPoly {
 public:
  struct Term {
    int du = 0;
    int dx = 0;
    R c{};
  };

  CoeffPoly() = default;

  static CoeffPoly constant(R c) {
    CoeffPoly p;
    if (!c.is_zero()) p.terms_.push_back(Term{0, 0, std::move(c)});
    return p;
  }

  static CoeffPoly monomial(R c, int du, int dx) {
    CoeffPoly p;
    if (!c.is_zero()) p.terms_.push_back(Term{du, dx, std::move(c)});
    return p;
  }

  static CoeffPoly from_rational(const Rational& q) {
    return constant(convert_scalar<R>(q));
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  R coeff(int du, int dx) const {
    for (const Term& t : terms_) {
      if (t.du == du && t.dx == dx) return t.c;
      if (t.du > du || (t.du == du && t.dx > dx)) break;
    }
    return R{};
  }

  int degree_u() const { return terms_.empty() ? -1 : terms_.back().du; }
  int degree_x() const {
    int d = -1;
    for (const Term& t : terms_) d = std::max(d, t.dx);
    return d;
  }

  void add_term(int du, int dx, const R& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), std::pair{du, dx},
                               [](const Term& t, const std::pair<int, int>& k) {
                                 return std::pair{t.du, t.dx} < k;
                               });
    if (it != terms_.end() && it->du == du && it->dx == dx) {
      it->c += c;
      if (it->c.is_zero()) terms_.erase(it);
    } else {
      terms_.insert(it, Term{du, dx, c});
    }
  }

  friend CoeffPoly operator+(const CoeffPoly& a, const CoeffPoly& b) {
    return merged(a, b, false);
  }
  friend CoeffPoly operator-(const CoeffPoly& a, const CoeffPoly& b) {
    return merged(a, b, true);
  }

  CoeffPoly operator-() const {
    CoeffPoly out(*this);
    for (Term& t : out.terms_) t.c = -t.c;
    return out;
  }

  CoeffPoly& operator+=(const CoeffPoly& o) { return *this = *this + o; }
  CoeffPoly& operator-=(const CoeffPoly& o) { return *this = *this - o; }

  friend bool operator==(const CoeffPoly& a, const CoeffPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i) {
      const Term& s = a.terms_[i];
      const Term& t = b.terms_[i];
      if (s.du != t.du || s.dx != t.dx || !(s.c == t.c)) return false;
    }
    return true;
  }

  CoeffPoly scaled(const R& c) const {
    CoeffPoly out;
    if (c.is_zero()) return out;
    out.terms_.reserve(terms_.size());
    for (const Term& t : terms_) {
      R v = t.c * c;
      if (!v.is_zero()) out.terms_.push_back(Term{t.du, t.dx, std::move(v)});
    }
    return out;
  }

  static CoeffPoly mul(const CoeffPoly& a, const CoeffPoly& b, const Caps& caps) {
    CoeffPoly out;
    if (a.is_zero() || b.is_zero()) return out;
    const int ru = std::min(a.degree_u() + b.degree_u(), caps.u);
    const int rx = std::min(a.degree_x() + b.degree_x(), caps.x);
    if (ru < 0 || rx < 0) return out;
    const size_t cells = size_t(ru + 1) * size_t(rx + 1);
    if (cells <= size_t{1} << 22) {
      std::vector<R> grid(cells);
      std::vector<char> used(cells, 0);
      for (const Term& s : a.terms_) {
        if (s.du > ru) break;
        for (const Term& t : b.terms_) {
          const int du = s.du + t.du;
          if (du > ru) break;
          const int dx = s.dx + t.dx;
          if (dx > rx) continue;
          const size_t idx = size_t(du) * size_t(rx + 1) + size_t(dx);
          grid[idx] += s.c * t.c;
          used[idx] = 1;
        }
      }
      for (int du = 0; du <= ru; ++du) {
        for (int dx = 0; dx <= rx; ++dx) {
          const size_t idx = size_t(du) * size_t(rx + 1) + size_t(dx);
          if (used[idx] && !grid[idx].is_zero())
            out.terms_.push_back(Term{du, dx, std::move(grid[idx])});
        }
      }
    } else {
      std::map<std::pair<int, int>, R> acc;
      for (const Term& s : a.terms_) {
        if (s.du > ru) break;
        for (const Term& t : b.terms_) {
          const int du = s.du + t.du;
          if (du > ru) break;
          const int dx = s.dx + t.dx;
          if (dx > rx) continue;
          acc[{du, dx}] += s.c * t.c;
        }
      }
      for (auto& [key, c] : acc)
        if (!c.is_zero()) out.terms_.push_back(Term{key.first, key.second, std::move(c)});
    }
    return out;
  }

  // Multiplies by u^ddu * x^ddx.  Negative shifts require exact divisibility.
  CoeffPoly mono_shift(int ddu, int ddx, const Caps& caps) const {
    CoeffPoly out;
    for (const Term& t : terms_) {
      const int du = t.du + ddu;
      const int dx = t.dx + ddx;
      if (du < 0 || dx < 0)
        throw NotDivisible("coefficient not divisible by the requested monomial");
      if (du > caps.u || dx > caps.x) continue;
      out.terms_.push_back(Term{du, dx, t.c});
    }
    return out;
  }

  // (f - f(u=0)) / u, the coefficient-level discrete derivative step.
  CoeffPoly discrete_delta() const {
    CoeffPoly out;
    for (const Term& t : terms_)
      if (t.du >= 1) out.terms_.push_back(Term{t.du - 1, t.dx, t.c});
    return out;
  }

  // f(u = 0), kept as a polynomial in x alone.
  CoeffPoly at_u0() const {
    CoeffPoly out;
    for (const Term& t : terms_) {
      if (t.du > 0) break;
      out.terms_.push_back(t);
    }
    return out;
  }

  CoeffPoly truncated(const Caps& caps) const {
    CoeffPoly out;
    for (const Term& t : terms_)
      if (t.du <= caps.u && t.dx <= caps.x) out.terms_.push_back(t);
    return out;
  }

  // Multiplicative inverse as a power series in (u, x), computed up to the
  // given caps.  Requires an invertible constant term.
  CoeffPoly inverse(const Caps& caps) const {
    if (caps.u >= Caps::kNone || caps.x >= Caps::kNone)
      throw Error("CoeffPoly::inverse needs finite caps");
    R a00 = coeff(0, 0);
    if (a00.is_zero())
      throw NonInvertibleSeries("coefficient has no constant term");
    const int U = caps.u;
    const int X = caps.x;
    std::vector<R> b(size_t(U + 1) * size_t(X + 1));
    const R one = convert_scalar<R>(Rational(1));
    b[0] = one / a00;
    for (int d = 1; d <= U + X; ++d) {
      for (int i = std::max(0, d - X); i <= std::min(d, U); ++i) {
        const int j = d - i;
        R acc{};
        for (const Term& t : terms_) {
          if (t.du == 0 && t.dx == 0) continue;
          if (t.du > i || t.dx > j) continue;
          acc += t.c * b[size_t(i - t.du) * size_t(X + 1) + size_t(j - t.dx)];
        }
        if (!acc.is_zero()) b[size_t(i) * size_t(X + 1) + size_t(j)] = -acc / a00;
      }
    }
    CoeffPoly out;
    for (int i = 0; i <= U; ++i)
      for (int j = 0; j <= X; ++j) {
        R& c = b[size_t(i) * size_t(X + 1) + size_t(j)];
        if (!c.is_zero()) out.terms_.push_back(Term{i, j, std::move(c)});
      }
    return out;
  }

  template <class V>
  V eval(const V& uval, const V& xval) const {
    V out{};
    std::vector<V> upow{convert_scalar<V>(Rational(1))};
    std::vector<V> xpow{convert_scalar<V>(Rational(1))};
    for (const Term& t : terms_) {
      while (int(upow.size()) <= t.du) upow.push_back(upow.back() * uval);
      while (int(xpow.size()) <= t.dx) xpow.push_back(xpow.back() * xval);
      out += convert_scalar<V>(t.c) * upow[size_t(t.du)] * xpow[size_t(t.dx)];
    }
    return out;
  }

  template <class R2>
  CoeffPoly<R2> convert() const {
    CoeffPoly<R2> out;
    for (const Term& t : terms_) out.add_term(t.du, t.dx, convert_scalar<R2>(t.c));
    return out;
  }

 private:
  static CoeffPoly merged(const CoeffPoly& a, const CoeffPoly& b, bool negate) {
    CoeffPoly out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0;
    size_t j = 0;
    auto key = [](const Term& t) { return std::pair{t.du, t.dx}; };
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() ||
          (i < a.terms_.size() && key(a.terms_[i]) < key(b.terms_[j]))) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || key(b.terms_[j]) < key(a.terms_[i])) {
        Term t = b.terms_[j++];
        if (negate) t.c = -t.c;
        out.terms_.push_back(std::move(t));
      } else {
        R c = negate ? R(a.terms_[i].c - b.terms_[j].c)
                     : R(a.terms_[i].c + b.terms_[j].c);
        if (!c.is_zero())
          out.terms_.push_back(Term{a.terms_[i].du, a.terms_[i].dx, std::move(c)});
        ++i;
        ++j;
      }
    }
    return out;
  }

  std::vector<Term> terms_;
};

}  // namespace pdde
