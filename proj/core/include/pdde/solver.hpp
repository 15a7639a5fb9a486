#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdde/coeffpoly.hpp"
#include "pdde/model.hpp"
#include "pdde/series.hpp"

namespace pdde {

// How the pattern variable is treated while solving:
//   kSymbolic - coefficients are polynomials in x,
//   kNumeric  - x is a fixed rational value,
//   kJet      - x = center + e with powers of e kept through jet_order,
//               which yields the value and derivatives at the center.
enum class XMode { kSymbolic, kNumeric, kJet };

struct SolveOptions {
  int zmax = 30;
  XMode xmode = XMode::kSymbolic;
  Rational x_value = Rational(0);
  Rational jet_center = Rational(1);
  int jet_order = 2;

  // Truncation of the coefficient polynomials.  The triangular profile
  // keeps u-degree <= zmax - n + ucap_slack in the z^n coefficient; it is
  // only sound when every operation in the model moves weight toward
  // higher z-order plus u-degree, so it is opt-in.
  int ucap = Caps::kNone;
  int xcap = Caps::kNone;
  bool triangular_ucap = false;
  int ucap_slack = 4;
};

inline int resolved_xcap(const SolveOptions& o) {
  switch (o.xmode) {
    case XMode::kNumeric:
      return 0;
    case XMode::kJet:
      return o.jet_order;
    case XMode::kSymbolic:
      return o.xcap;
  }
  return o.xcap;
}

template <class R>
CoeffPoly<R> x_binding(const SolveOptions& o) {
  switch (o.xmode) {
    case XMode::kSymbolic:
      return CoeffPoly<R>::monomial(R(1), 0, 1);
    case XMode::kNumeric:
      return CoeffPoly<R>::constant(convert_scalar<R>(o.x_value));
    case XMode::kJet: {
      CoeffPoly<R> p = CoeffPoly<R>::constant(convert_scalar<R>(o.jet_center));
      p.add_term(0, 1, R(1));
      return p;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Incremental solver.  The right side is compiled once into a small DAG of
// series nodes; coefficient n of every node is computed on demand and
// memoized.  A node whose structural valuation exceeds the requested index
// answers zero without touching its children, which is what lets the
// equation read its own earlier coefficients without a fixed-point loop.
// Monomial factors (powers of z, u, x and scalars) are folded into the
// edges of the DAG so that Laurent prefactors like z^9/u^2 never need a
// series division of their own.
// ---------------------------------------------------------------------------

template <class R>
class SeriesSolver {
 public:
  SeriesSolver(const Model& m, SolveOptions opts) : opts_(std::move(opts)) {
    validate_model(m);
    if (opts_.zmax < 0) throw Error("zmax must be nonnegative");
    xcap_ = resolved_xcap(opts_);
    build(m);
  }

  // Computes solution coefficients through z^upto.
  void extend(int upto) {
    if (opts_.triangular_ucap && upto > opts_.zmax)
      throw Error("the triangular cap profile is anchored at zmax");
    while (next_ <= upto) step();
  }

  const std::vector<CoeffPoly<R>>& coefficients() const { return solution_; }

  const CoeffPoly<R>& coefficient(int n) {
    extend(n);
    return solution_[size_t(n)];
  }

  TruncatedSeries<R> series(int upto) {
    extend(upto);
    std::vector<CoeffPoly<R>> cs(solution_.begin(),
                                 solution_.begin() + upto + 1);
    return TruncatedSeries<R>::from_coeffs(std::move(cs), 0, upto);
  }

 private:
  enum class Kind { kFixed, kY, kAdd, kMul, kInv, kMono };

  struct Node {
    Kind kind = Kind::kFixed;
    int a = -1, b = -1;
    int j = 0;                   // kY: discrete derivative order
    R scale{};                   // kMono
    int du = 0, dx = 0, dz = 0;  // kMono shifts; du and dz may be negative
    std::vector<std::pair<int, CoeffPoly<R>>> fixed;  // kFixed
    int lo = 0;
    std::vector<CoeffPoly<R>> memo;  // coefficients lo, lo+1, ...
    bool lead_ready = false;         // kInv
    CoeffPoly<R> lead_inv;
  };

  // value = c * u^du * x^dx * z^dz * node; node -1 stands for the constant 1.
  struct Handle {
    int node = -1;
    Rational c = Rational(1);
    int du = 0, dx = 0, dz = 0;
  };

  static const CoeffPoly<R>& zero_poly() {
    static const CoeffPoly<R> z;
    return z;
  }

  Caps caps_for(int n) const {
    Caps c;
    c.x = xcap_;
    c.u = opts_.ucap;
    if (opts_.triangular_ucap)
      c.u = std::min(c.u,
                     std::max(0, opts_.zmax - n + opts_.ucap_slack));
    return c;
  }

  int intern(Node nd, const std::string& key) {
    auto [it, fresh] = cons_.try_emplace(key, int(nodes_.size()));
    if (fresh) nodes_.push_back(std::move(nd));
    return it->second;
  }

  int materialize(const Handle& h) {
    if (h.node < 0) {
      if (!h.c.is_zero() && (h.du < 0 || h.dx < 0))
        throw Error("a Laurent monomial cannot stand alone as a series term");
      Node nd;
      nd.kind = Kind::kFixed;
      nd.lo = h.dz;
      nd.fixed.emplace_back(
          h.dz, CoeffPoly<R>::monomial(convert_scalar<R>(h.c), h.du, h.dx));
      std::ostringstream k;
      k << "F|" << h.c.str() << '|' << h.du << '|' << h.dx << '|' << h.dz;
      return intern(std::move(nd), k.str());
    }
    if (h.c == 1 && h.du == 0 && h.dx == 0 && h.dz == 0) return h.node;
    Node nd;
    nd.kind = Kind::kMono;
    nd.a = h.node;
    nd.scale = convert_scalar<R>(h.c);
    nd.du = h.du;
    nd.dx = h.dx;
    nd.dz = h.dz;
    nd.lo = nodes_[size_t(h.node)].lo + h.dz;
    std::ostringstream k;
    k << "S|" << h.node << '|' << h.c.str() << '|' << h.du << '|' << h.dx
      << '|' << h.dz;
    return intern(std::move(nd), k.str());
  }

  static bool handle_is_zero(const Handle& h) {
    return h.node < 0 && h.c.is_zero();
  }

  Handle h_mul(const Handle& a, const Handle& b) {
    if (handle_is_zero(a) || handle_is_zero(b))
      return Handle{-1, Rational(0), 0, 0, 0};
    if (a.node >= 0 && b.node >= 0) {
      Node nd;
      nd.kind = Kind::kMul;
      nd.a = std::min(a.node, b.node);
      nd.b = std::max(a.node, b.node);
      nd.lo = nodes_[size_t(a.node)].lo + nodes_[size_t(b.node)].lo;
      std::ostringstream k;
      k << "M|" << nd.a << '|' << nd.b;
      const int id = intern(std::move(nd), k.str());
      return Handle{id, a.c * b.c, a.du + b.du, a.dx + b.dx, a.dz + b.dz};
    }
    const Handle& n = a.node >= 0 ? a : b;
    return Handle{n.node, a.c * b.c, a.du + b.du, a.dx + b.dx, a.dz + b.dz};
  }

  Handle h_inv(const Handle& a) {
    if (handle_is_zero(a)) throw ZeroDenominator("division by zero");
    if (a.node < 0)
      return Handle{-1, Rational(1) / a.c, -a.du, -a.dx, -a.dz};
    Node nd;
    nd.kind = Kind::kInv;
    nd.a = a.node;
    nd.lo = -nodes_[size_t(a.node)].lo;
    std::ostringstream k;
    k << "I|" << a.node;
    const int id = intern(std::move(nd), k.str());
    return Handle{id, Rational(1) / a.c, -a.du, -a.dx, -a.dz};
  }

  Handle h_add(const Handle& a, Handle b, bool negate_b) {
    if (negate_b) b.c = -b.c;
    if (handle_is_zero(a)) return b;
    if (handle_is_zero(b)) return a;
    // Factor out the shared monomial part so that sums never hide monomial
    // content; series inversion relies on this.
    Handle g{-1, a.c, std::min(a.du, b.du), std::min(a.dx, b.dx),
             std::min(a.dz, b.dz)};
    const int na = materialize(
        Handle{a.node, Rational(1), a.du - g.du, a.dx - g.dx, a.dz - g.dz});
    const int nb = materialize(
        Handle{b.node, b.c / a.c, b.du - g.du, b.dx - g.dx, b.dz - g.dz});
    Node nd;
    nd.kind = Kind::kAdd;
    nd.a = na;
    nd.b = nb;
    nd.lo = std::min(nodes_[size_t(na)].lo, nodes_[size_t(nb)].lo);
    std::ostringstream k;
    k << "A|" << na << '|' << nb;
    const int id = intern(std::move(nd), k.str());
    return Handle{id, g.c, g.du, g.dx, g.dz};
  }

  Handle h_pow(Handle base, int n) {
    if (n == 0) return Handle{};
    if (n < 0) {
      base = h_inv(base);
      n = -n;
    }
    Handle out{};
    while (n > 0) {
      if (n & 1) out = h_mul(out, base);
      n >>= 1;
      if (n) base = h_mul(base, base);
    }
    return out;
  }

  Handle build_expr(const Expr& e) {
    switch (e->kind) {
      case ExprKind::kConst:
        return Handle{-1, e->value, 0, 0, 0};
      case ExprKind::kZ:
        return Handle{-1, Rational(1), 0, 0, 1};
      case ExprKind::kU:
        return Handle{-1, Rational(1), 1, 0, 0};
      case ExprKind::kX: {
        if (opts_.xmode == XMode::kSymbolic)
          return Handle{-1, Rational(1), 0, 1, 0};
        if (opts_.xmode == XMode::kNumeric)
          return Handle{-1, opts_.x_value, 0, 0, 0};
        Node nd;
        nd.kind = Kind::kFixed;
        nd.lo = 0;
        CoeffPoly<R> xp =
            CoeffPoly<R>::constant(convert_scalar<R>(opts_.jet_center));
        xp.add_term(0, 1, R(1));
        nd.fixed.emplace_back(0, std::move(xp));
        return Handle{intern(std::move(nd), "X|jet"), Rational(1), 0, 0, 0};
      }
      case ExprKind::kY: {
        Node nd;
        nd.kind = Kind::kY;
        nd.j = e->index;
        nd.lo = 0;
        std::ostringstream k;
        k << "Y|" << e->index;
        return Handle{intern(std::move(nd), k.str()), Rational(1), 0, 0, 0};
      }
      case ExprKind::kAdd:
        return h_add(build_expr(e->a), build_expr(e->b), false);
      case ExprKind::kSub:
        return h_add(build_expr(e->a), build_expr(e->b), true);
      case ExprKind::kNeg: {
        Handle h = build_expr(e->a);
        h.c = -h.c;
        return h;
      }
      case ExprKind::kMul:
        return h_mul(build_expr(e->a), build_expr(e->b));
      case ExprKind::kDiv:
        return h_mul(build_expr(e->a), h_inv(build_expr(e->b)));
      case ExprKind::kPow:
        return h_pow(build_expr(e->a), e->index);
    }
    throw Error("unhandled expression node");
  }

  void build(const Model& m) {
    const Handle hz{-1, Rational(1), 0, 0, 1};
    Handle rhs = h_mul(hz, build_expr(m.q));
    if (m.r) {
      bool prune = false;
      if (opts_.xmode == XMode::kNumeric) {
        const Rational pv = m.perturbation == Perturbation::kX
                                ? opts_.x_value
                                : Rational(opts_.x_value - 1);
        prune = pv.is_zero();
      }
      if (!prune) {
        const Handle pert = build_expr(perturbation_expr(m));
        rhs = h_add(rhs, h_mul(pert, h_mul(hz, build_expr(m.r))), false);
      }
    }
    root_ = materialize(rhs);
    next_ = std::min(nodes_[size_t(root_)].lo, 0);
  }

  void ensure(int id, int n) {
    while (true) {
      Node& nd = nodes_[size_t(id)];
      const int at = nd.lo + int(nd.memo.size());
      if (n < nd.lo || at > n) return;
      CoeffPoly<R> v = compute(id, at);
      nodes_[size_t(id)].memo.push_back(std::move(v));
    }
  }

  // Valid only after ensure(id, n); nodes answer zero below their
  // structural valuation without computing anything.
  const CoeffPoly<R>& get(int id, int n) {
    const Node& nd = nodes_[size_t(id)];
    if (n < nd.lo) return zero_poly();
    return nd.memo[size_t(n - nd.lo)];
  }

  CoeffPoly<R> compute(int id, int n) {
    Node& nd = nodes_[size_t(id)];
    switch (nd.kind) {
      case Kind::kFixed: {
        for (const auto& [at, v] : nd.fixed)
          if (at == n) return v;
        return {};
      }
      case Kind::kY: {
        if (n >= int(solution_.size()))
          throw WellFoundedViolation(
              "coefficient " + std::to_string(n) +
              " of the right side reads the solution at the same or a "
              "later order");
        CoeffPoly<R> v = solution_[size_t(n)];
        for (int k = 0; k < nd.j; ++k) v = v.discrete_delta();
        return v;
      }
      case Kind::kAdd: {
        ensure(nd.a, n);
        ensure(nd.b, n);
        return get(nd.a, n) + get(nd.b, n);
      }
      case Kind::kMul: {
        const int alo = nodes_[size_t(nd.a)].lo;
        const int blo = nodes_[size_t(nd.b)].lo;
        ensure(nd.a, n - blo);
        ensure(nd.b, n - alo);
        const Caps caps = caps_for(n);
        CoeffPoly<R> acc;
        for (int i = alo; i <= n - blo; ++i) {
          const CoeffPoly<R>& ai = get(nd.a, i);
          if (ai.is_zero()) continue;
          const CoeffPoly<R>& bi = get(nd.b, n - i);
          if (bi.is_zero()) continue;
          acc += CoeffPoly<R>::mul(ai, bi, caps);
        }
        return acc;
      }
      case Kind::kInv: {
        const int alo = nodes_[size_t(nd.a)].lo;
        if (!nd.lead_ready) {
          ensure(nd.a, alo);
          const CoeffPoly<R>& lead = get(nd.a, alo);
          if (lead.is_zero())
            throw NonInvertibleSeries(
                "denominator vanishes at its structural valuation");
          if (lead.terms().size() == 1 && lead.terms().front().du == 0 &&
              lead.terms().front().dx == 0) {
            nodes_[size_t(id)].lead_inv =
                CoeffPoly<R>::constant(R(1) / lead.terms().front().c);
          } else {
            if (lead.coeff(0, 0).is_zero())
              throw NonInvertibleSeries(
                  "denominator leading coefficient has no constant term");
            const Caps caps = caps_for(nd.lo);
            if (caps.u >= Caps::kNone || caps.x >= Caps::kNone)
              throw Error(
                  "inverting a non-monomial leading coefficient needs "
                  "finite caps");
            nodes_[size_t(id)].lead_inv = lead.inverse(caps);
          }
          nodes_[size_t(id)].lead_ready = true;
        }
        const int m = n - nd.lo;
        ensure(nd.a, alo + m);
        Node& me = nodes_[size_t(id)];
        const Caps caps = caps_for(n);
        CoeffPoly<R> acc =
            m == 0 ? CoeffPoly<R>::constant(R(1)) : CoeffPoly<R>{};
        for (int k = 0; k < m; ++k) {
          const CoeffPoly<R>& vk = me.memo[size_t(k)];
          if (vk.is_zero()) continue;
          const CoeffPoly<R>& bk = get(me.a, alo + m - k);
          if (bk.is_zero()) continue;
          acc -= CoeffPoly<R>::mul(vk, bk, caps);
        }
        return CoeffPoly<R>::mul(acc, me.lead_inv, caps);
      }
      case Kind::kMono: {
        ensure(nd.a, n - nd.dz);
        const Caps caps = caps_for(n);
        return get(nd.a, n - nd.dz).mono_shift(nd.du, nd.dx, caps).scaled(
            nd.scale);
      }
    }
    throw Error("unhandled node kind");
  }

  void step() {
    const int n = next_;
    ensure(root_, n);
    CoeffPoly<R> c = get(root_, n);
    if (n < 0) {
      if (!c.is_zero())
        throw Error("right side keeps a z-pole of order " +
                    std::to_string(-n) + " that no series can satisfy");
    } else {
      const Caps caps = caps_for(n);
      if (caps.u < Caps::kNone || caps.x < Caps::kNone)
        c = c.truncated(caps);
      solution_.push_back(std::move(c));
    }
    ++next_;
  }

  SolveOptions opts_;
  int xcap_ = Caps::kNone;
  std::vector<Node> nodes_;
  std::map<std::string, int> cons_;
  int root_ = -1;
  int next_ = 0;
  std::vector<CoeffPoly<R>> solution_;
};

template <class R>
TruncatedSeries<R> solve_series(const Model& m, const SolveOptions& opts) {
  SeriesSolver<R> s(m, opts);
  return s.series(opts.zmax);
}

// ---------------------------------------------------------------------------
// Independent verification.  The equation is cleared to the polynomial form
// T*den - num = 0 and evaluated over the truncated series ring, touching
// none of the solver's evaluation machinery.
// ---------------------------------------------------------------------------

template <class R>
TruncatedSeries<R> eval_poly_series(
    const MultiPoly& p, const std::array<TruncatedSeries<R>, kNumVars>& point,
    const SeriesCtx& ctx) {
  using TS = TruncatedSeries<R>;
  TS out = TS::zero();
  std::array<std::vector<TS>, kNumVars> pows;
  for (const auto& t : p.terms()) {
    TS prod = TS::constant(CoeffPoly<R>::from_rational(t.c));
    for (int v = 0; v < kNumVars; ++v) {
      const int e = t.e[size_t(v)];
      if (e == 0) continue;
      auto& cache = pows[size_t(v)];
      if (cache.empty())
        cache.push_back(TS::constant(CoeffPoly<R>::constant(R(1))));
      while (int(cache.size()) <= e)
        cache.push_back(TS::mul(cache.back(), point[size_t(v)], ctx));
      prod = TS::mul(prod, cache[size_t(e)], ctx);
    }
    out = out + prod;
  }
  return out;
}

// First z-order at which the series fails the equation, or one past the
// verified range when it holds everywhere checked.  With an exact scalar
// ring leave tol at zero; with floats pass the magnitude below which a
// residual coefficient counts as zero.
template <class R>
int residual_order(const Model& m, const TruncatedSeries<R>& t,
                   const SolveOptions& opts, const R& tol = R(0)) {
  validate_model(m);
  const RationalFunction rf = expr_to_rf(rhs_expr(m));
  const SeriesCtx ctx{Caps{opts.ucap, resolved_xcap(opts)}, opts.zmax};
  std::array<TruncatedSeries<R>, kNumVars> pt;
  pt[VZ] = TruncatedSeries<R>::z_power(1);
  pt[VU] = TruncatedSeries<R>::constant(CoeffPoly<R>::monomial(R(1), 1, 0));
  pt[VX] = TruncatedSeries<R>::constant(x_binding<R>(opts));
  for (int j = 0; j <= m.order; ++j) pt[size_t(3 + j)] = t.delta(j);
  const auto den = eval_poly_series(rf.den(), pt, ctx);
  const auto num = eval_poly_series(rf.num(), pt, ctx);
  const auto residual = TruncatedSeries<R>::mul(t, den, ctx) - num;
  auto below = [&tol](const CoeffPoly<R>& p) {
    for (const auto& term : p.terms())
      if (abs(term.c) > tol) return false;
    return true;
  };
  const int upto = std::min(opts.zmax, residual.known_order());
  for (int n = std::min(residual.lo(), 0); n <= upto; ++n)
    if (!below(residual.at(n))) return n;
  return upto + 1;
}

}  // namespace pdde
