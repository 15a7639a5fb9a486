#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "pdde/coeffpoly.hpp"
#include "pdde/errors.hpp"

namespace pdde {

// Sentinel for "known to every order".
inline constexpr int kOrderInf = 1 << 28;

inline int order_add(int a, int b) {
  if (a >= kOrderInf || b >= kOrderInf) return kOrderInf;
  return a + b;
}

// Shared settings for series ring operations: coefficient caps plus the
// highest z order anything downstream will ask for.
struct SeriesCtx {
  Caps caps;
  int zmax = 0;
};

// ---------------------------------------------------------------------------
// TruncatedSeries<R>: Laurent series in z with CoeffPoly<R> coefficients,
// known exactly up to z^known.  Coefficients are stored for the exponents
// lo .. lo+size-1; exponents outside the stored block but at most `known`
// are zero; asking beyond `known` throws OrderMismatch.
// ---------------------------------------------------------------------------
template <class R>
class TruncatedSeries {
 public:
  TruncatedSeries() = default;  // zero, known to every order

  static TruncatedSeries zero(int known = kOrderInf) {
    TruncatedSeries s;
    s.known_ = known;
    return s;
  }

  static TruncatedSeries constant(CoeffPoly<R> c) {
    TruncatedSeries s;
    if (!c.is_zero()) s.coeffs_.push_back(std::move(c));
    return s;
  }

  static TruncatedSeries z_power(int e) {
    TruncatedSeries s;
    s.lo_ = e;
    s.coeffs_.push_back(CoeffPoly<R>::from_rational(Rational(1)));
    return s;
  }

  static TruncatedSeries from_coeffs(std::vector<CoeffPoly<R>> cs, int lo,
                                     int known) {
    TruncatedSeries s;
    s.coeffs_ = std::move(cs);
    s.lo_ = lo;
    s.known_ = known;
    s.trim();
    return s;
  }

  int known_order() const { return known_; }
  int lo() const { return lo_; }
  int stored_hi() const { return lo_ + int(coeffs_.size()) - 1; }

  const CoeffPoly<R>& at(int n) const {
    static const CoeffPoly<R> kZero{};
    if (n > known_) throw OrderMismatch("series coefficient beyond known order");
    if (n < lo_ || n > stored_hi()) return kZero;
    return coeffs_[size_t(n - lo_)];
  }

  // Absolute exponent of the first nonzero stored coefficient, or kOrderInf.
  int valuation() const {
    for (size_t i = 0; i < coeffs_.size(); ++i)
      if (!coeffs_[i].is_zero()) return lo_ + int(i);
    return kOrderInf;
  }

  bool stored_is_zero() const { return valuation() == kOrderInf; }

  TruncatedSeries truncate_known(int k) const {
    TruncatedSeries out = *this;
    out.known_ = std::min(out.known_, k);
    while (!out.coeffs_.empty() && out.stored_hi() > out.known_)
      out.coeffs_.pop_back();
    return out;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    return merged(a, b, false);
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    return merged(a, b, true);
  }

  TruncatedSeries operator-() const {
    TruncatedSeries out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  static TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b,
                             const SeriesCtx& ctx) {
    TruncatedSeries out;
    out.lo_ = a.lo_ + b.lo_;
    out.known_ = std::min({order_add(a.known_, b.lo_), order_add(b.known_, a.lo_),
                           ctx.zmax});
    if (a.coeffs_.empty() || b.coeffs_.empty()) {
      out.lo_ = 0;
      return out;
    }
    const int hi_store =
        std::min(out.known_, a.stored_hi() + b.stored_hi());
    if (hi_store < out.lo_) return out;
    out.coeffs_.assign(size_t(hi_store - out.lo_ + 1), CoeffPoly<R>{});
    for (size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i].is_zero()) continue;
      for (size_t j = 0; j < b.coeffs_.size(); ++j) {
        if (int(i + j) > hi_store - out.lo_) break;
        if (b.coeffs_[j].is_zero()) continue;
        out.coeffs_[i + j] +=
            CoeffPoly<R>::mul(a.coeffs_[i], b.coeffs_[j], ctx.caps);
      }
    }
    out.trim();
    return out;
  }

  static TruncatedSeries div(const TruncatedSeries& a, const TruncatedSeries& b,
                             const SeriesCtx& ctx) {
    const int v = b.valuation();
    if (v == kOrderInf) {
      if (b.known_ >= kOrderInf) throw ZeroDenominator("series division by zero");
      throw NonInvertibleSeries("denominator is zero to its whole known order");
    }
    // Invert the leading coefficient, stripping any monomial factor first.
    const CoeffPoly<R>& lead = b.at(v);
    int mu = lead.terms()[0].du;
    int mx = lead.terms()[0].dx;
    for (const auto& t : lead.terms()) {
      mu = std::min(mu, t.du);
      mx = std::min(mx, t.dx);
    }
    CoeffPoly<R> lead_inv =
        lead.mono_shift(-mu, -mx, ctx.caps).inverse(finite_caps(ctx));

    TruncatedSeries out;
    out.lo_ = a.lo_ - v;
    const int rel = std::min(a.known_ >= kOrderInf ? kOrderInf : a.known_ - a.lo_,
                             b.known_ >= kOrderInf ? kOrderInf : b.known_ - v);
    out.known_ = std::min(order_add(out.lo_, rel), ctx.zmax);
    const int len = out.known_ - out.lo_ + 1;
    if (len <= 0) return out;
    out.coeffs_.assign(size_t(len), CoeffPoly<R>{});
    for (int m = 0; m < len; ++m) {
      CoeffPoly<R> acc = a.at(a.lo_ + m);
      for (int k = 0; k < m; ++k) {
        if (out.coeffs_[size_t(k)].is_zero()) continue;
        acc = acc - CoeffPoly<R>::mul(out.coeffs_[size_t(k)], b.at(v + m - k),
                                      ctx.caps);
      }
      if (acc.is_zero()) continue;
      out.coeffs_[size_t(m)] = CoeffPoly<R>::mul(
          acc.mono_shift(-mu, -mx, ctx.caps), lead_inv, ctx.caps);
    }
    out.trim();
    return out;
  }

  static TruncatedSeries pow(const TruncatedSeries& a, int n, const SeriesCtx& ctx) {
    if (n < 0)
      return div(constant(CoeffPoly<R>::from_rational(Rational(1))), pow(a, -n, ctx),
                 ctx);
    TruncatedSeries out = constant(CoeffPoly<R>::from_rational(Rational(1)));
    TruncatedSeries base = a;
    while (n > 0) {
      if (n & 1) out = mul(out, base, ctx);
      if (n >>= 1) base = mul(base, base, ctx);
    }
    return out;
  }

  // Coefficient-wise discrete derivative in u, applied j times.
  TruncatedSeries delta(int j = 1) const {
    TruncatedSeries out = *this;
    for (auto& c : out.coeffs_) {
      for (int k = 0; k < j; ++k) c = c.discrete_delta();
    }
    out.trim();
    return out;
  }

  template <class R2>
  TruncatedSeries<R2> convert() const {
    std::vector<CoeffPoly<R2>> cs;
    cs.reserve(coeffs_.size());
    for (const auto& c : coeffs_) cs.push_back(c.template convert<R2>());
    return TruncatedSeries<R2>::from_coeffs(std::move(cs), lo_, known_);
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    const int lo = std::min(a.lo_, b.lo_);
    const int hi = std::max(a.stored_hi(), b.stored_hi());
    const int known = std::min(a.known_, b.known_);
    for (int n = lo; n <= std::min(hi, known); ++n)
      if (!(a.at(n) == b.at(n))) return false;
    return a.known_ == b.known_;
  }

 private:
  static Caps finite_caps(const SeriesCtx& ctx) {
    Caps c = ctx.caps;
    if (c.u >= Caps::kNone) c.u = 4 * (ctx.zmax + 4);
    if (c.x >= Caps::kNone) c.x = 4 * (ctx.zmax + 4);
    return c;
  }

  static TruncatedSeries merged(const TruncatedSeries& a, const TruncatedSeries& b,
                                bool negate) {
    TruncatedSeries out;
    out.known_ = std::min(a.known_, b.known_);
    if (a.coeffs_.empty() && b.coeffs_.empty()) return out;
    out.lo_ = std::min(a.coeffs_.empty() ? b.lo_ : a.lo_,
                       b.coeffs_.empty() ? a.lo_ : b.lo_);
    const int hi = std::min(std::max(a.stored_hi(), b.stored_hi()), out.known_);
    if (hi < out.lo_) {
      out.lo_ = 0;
      return out;
    }
    out.coeffs_.reserve(size_t(hi - out.lo_ + 1));
    for (int n = out.lo_; n <= hi; ++n) {
      CoeffPoly<R> c = stored_or_zero(a, n);
      const CoeffPoly<R>& bc = stored_or_zero(b, n);
      c = negate ? c - bc : c + bc;
      out.coeffs_.push_back(std::move(c));
    }
    out.trim();
    return out;
  }

  static const CoeffPoly<R>& stored_or_zero(const TruncatedSeries& s, int n) {
    static const CoeffPoly<R> kZero{};
    if (n < s.lo_ || n > s.stored_hi()) return kZero;
    return s.coeffs_[size_t(n - s.lo_)];
  }

  // Stored leading zeros would drag lo_ below the true valuation, and the
  // known-window rules for products charge every factor its lo_, so a stale
  // lo_ makes downstream windows collapse.
  void trim() {
    size_t lead = 0;
    while (lead < coeffs_.size() && coeffs_[lead].is_zero()) ++lead;
    if (lead == coeffs_.size()) {
      coeffs_.clear();
      lo_ = 0;
    } else if (lead > 0) {
      coeffs_.erase(coeffs_.begin(), coeffs_.begin() + long(lead));
      lo_ += int(lead);
    }
  }

  int lo_ = 0;
  int known_ = kOrderInf;
  std::vector<CoeffPoly<R>> coeffs_;
};

}  // namespace pdde
