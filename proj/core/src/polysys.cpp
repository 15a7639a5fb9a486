#include "pdde/polysys.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "pdde/solver.hpp"

namespace pdde {

namespace {

std::string poly_brief(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os << p.terms().size() << (p.terms().size() == 1 ? " term" : " terms");
  for (int v = 0; v < kNumVars; ++v)
    if (p.depends_on(v))
      os << ' ' << kDefaultVarNames[size_t(v)] << '^' << p.degree(v);
  return os.str();
}

MultiPoly pert_poly(const Model& m) {
  if (m.perturbation == Perturbation::kX) return MultiPoly::variable(VX);
  return MultiPoly::variable(VX) - MultiPoly(1L);
}

Polynomialization clear_equation(const Expr& rhs, bool require_monomial) {
  const int top = max_y_index(rhs);
  if (top > 2)
    throw Error("the section slots cover discrete derivatives up to order 2");
  RationalFunction rf = expr_to_rf(rhs);
  // y_j -> (T - t0 - t1*u - ...) / u^j, ascending so that the sections a
  // later substitution introduces are final.
  if (top >= 1) {
    const RationalFunction y1(MultiPoly::variable(VT) - MultiPoly::variable(VT0),
                              MultiPoly::variable(VU));
    rf = rf.substitute(VT0, y1);
  }
  if (top >= 2) {
    const RationalFunction y2(
        MultiPoly::variable(VT) - MultiPoly::variable(VT0) -
            MultiPoly::variable(VT1) * MultiPoly::variable(VU),
        MultiPoly::variable(VU, 2));
    rf = rf.substitute(VT1, y2);
  }
  rf = rf - RationalFunction::variable(VT);
  Polynomialization out;
  out.poly = rf.num();
  out.multiplier = rf.den();
  out.order = std::max(top, 0);
  out.monomial_clearing = rf.den().terms().size() == 1;
  if (require_monomial && !out.monomial_clearing)
    throw DenominatorNotMonomial("clearing the equation leaves the denominator " +
                                 rf.den().str());
  return out;
}

}  // namespace

Polynomialization polynomialize(const Model& m, bool require_monomial_clearing) {
  validate_model(m);
  return clear_equation(rhs_expr(m), require_monomial_clearing);
}

Polynomialization polynomialize_unperturbed(const Model& m) {
  validate_model(m);
  Model bare = m;
  bare.r = nullptr;
  return clear_equation(rhs_expr(bare), false);
}

RationalFunction model_rhs_rf(const Model& m) {
  validate_model(m);
  const Expr rhs = rhs_expr(m);
  if (max_y_index(rhs) > 2)
    throw Error("the section slots cover discrete derivatives up to order 2");
  RationalFunction rf = expr_to_rf(rhs);
  if (max_y_index(rhs) >= 1) {
    const RationalFunction y1(MultiPoly::variable(VT) - MultiPoly::variable(VT0),
                              MultiPoly::variable(VU));
    rf = rf.substitute(VT0, y1);
  }
  if (max_y_index(rhs) >= 2) {
    const RationalFunction y2(
        MultiPoly::variable(VT) - MultiPoly::variable(VT0) -
            MultiPoly::variable(VT1) * MultiPoly::variable(VU),
        MultiPoly::variable(VU, 2));
    rf = rf.substitute(VT1, y2);
  }
  return rf;
}

std::vector<MultiPoly> critical_triple(const Model& m) {
  const MultiPoly p = polynomialize(m).poly;
  return {p, p.derivative(VU), p.derivative(VT)};
}

std::vector<MultiPoly> two_branch_system(const Model& m) {
  std::vector<MultiPoly> sys = critical_triple(m);
  const std::pair<int, int> moves[] = {{VU, VA}, {VT, VB}};
  const size_t n = sys.size();
  for (size_t i = 0; i < n; ++i) sys.push_back(sys[i].rename(moves));
  return sys;
}

std::vector<MultiPoly> unperturbed_triple(const Model& m) {
  const MultiPoly p = polynomialize_unperturbed(m).poly;
  return {p, p.derivative(VU), p.derivative(VT)};
}

MultiPoly unperturbed_discriminant(const Model& m) {
  const MultiPoly p = polynomialize_unperturbed(m).poly;
  const MultiPoly uu = p.derivative(VU).derivative(VU);
  const MultiPoly ut = p.derivative(VU).derivative(VT);
  const MultiPoly tt = p.derivative(VT).derivative(VT);
  return uu * tt - ut * ut;
}

std::vector<MultiPoly> rescaled_system(const Model& m) {
  const MultiPoly eps = pert_poly(m);
  const MultiPoly u_sub = eps * MultiPoly::variable(VA);
  const MultiPoly t_sub =
      MultiPoly::variable(VT0) + eps * MultiPoly::variable(VB);
  std::vector<MultiPoly> out;
  for (const MultiPoly& f : critical_triple(m)) {
    MultiPoly g = f.substitute(VU, u_sub).substitute(VT, t_sub);
    MultiPoly q;
    while (try_exact_divide(g, eps, &q)) g = q;
    out.push_back(std::move(g));
  }
  return out;
}

std::array<std::array<MultiPoly, 3>, 3> rescaled_jacobian(const Model& m) {
  const std::vector<MultiPoly> sys = rescaled_system(m);
  const int vars[3] = {VA, VB, VT1};
  std::array<std::array<MultiPoly, 3>, 3> jac;
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j)
      jac[i][j] = sys[i].derivative(vars[j]);
  return jac;
}

// ---------------------------------------------------------------------------
// elimination
// ---------------------------------------------------------------------------

namespace {

void push_note(std::vector<std::string>* log, std::string v) {
  if (!log) return;
  if (std::getenv("PDDE_TRACE")) std::cerr << "[elim] " << v << std::endl;
  log->push_back(std::move(v));
}

constexpr size_t kPolishTermCap = 400;

// Strips saturation factors, monomial content, the content and repeated
// factors in the most loaded remaining variable.  Never turns a nonzero
// input into zero.
MultiPoly polish(MultiPoly r, const EliminateOptions& opts,
                 const std::set<int>& keep, int target,
                 std::vector<std::string>* log) {
  if (r.is_zero()) return r;
  for (const MultiPoly& s : opts.saturate) {
    if (s.is_zero() || s.is_constant()) continue;
    int n = 0;
    MultiPoly q;
    while (!r.is_constant() && try_exact_divide(r, s, &q)) {
      r = std::move(q);
      ++n;
    }
    if (n > 0 && log)
      push_note(log, "  divided out (" + s.str() + ")^" + std::to_string(n));
  }
  const Exps mc = r.monomial_content();
  bool has_content = false;
  for (int v = 0; v < kNumVars; ++v) has_content |= mc[size_t(v)] > 0;
  if (has_content) {
    if (log)
      push_note(log, "  stripped monomial content " +
                     MultiPoly::monomial(Rational(1), mc).str());
    r = r.divide_monomial(mc);
  }
  r = r.integer_primitive();
  // Content and squarefree reduction only tidy the result; past this size
  // their gcd chains cost far more than downstream work on the wider
  // polynomial, so large results ship as they are.
  if (r.terms().size() > kPolishTermCap) {
    push_note(log, "  skipped content and squarefree reduction at " +
                       std::to_string(r.terms().size()) + " terms");
    return r;
  }
  int w = -1, wdeg = 0;
  for (int v = 0; v < kNumVars; ++v) {
    if (keep.count(v) && v != target) continue;
    const int d = r.degree(v);
    if (d > wdeg) {
      wdeg = d;
      w = v;
    }
  }
  if (w >= 0 && wdeg >= 1) {
    const MultiPoly c = content(r, w);
    if (!c.is_constant()) {
      if (log)
        push_note(log, "  removed content in " + kDefaultVarNames[size_t(w)] +
                       ": " + poly_brief(c));
      r = exact_divide(r, c);
    }
    if (r.degree(w) >= 2) {
      MultiPoly sq = squarefree_part(r, w);
      if (sq.degree(w) < r.degree(w)) {
        if (log)
          push_note(log, "  squarefree in " + kDefaultVarNames[size_t(w)] +
                         ": degree " + std::to_string(r.degree(w)) + " -> " +
                         std::to_string(sq.degree(w)));
        r = std::move(sq);
      }
    }
  }
  return r.integer_primitive();
}

}  // namespace

Annihilator eliminate(std::vector<MultiPoly> system, const std::set<int>& keep,
                      int target, const EliminateOptions& opts) {
  Annihilator out;
  out.target = target;
  std::vector<std::string>& log = out.provenance;

  std::vector<MultiPoly> sys;
  for (MultiPoly& p : system) {
    if (p.is_zero()) continue;
    sys.push_back(p.divide_monomial(p.monomial_content()).integer_primitive());
  }
  {
    std::ostringstream os;
    os << "input: " << sys.size() << " equations";
    for (const MultiPoly& p : sys) os << " [" << poly_brief(p) << "]";
    push_note(&log, os.str());
  }

  size_t oi = 0;
  while (true) {
    std::set<int> present;
    for (const MultiPoly& p : sys)
      for (int v = 0; v < kNumVars; ++v)
        if (!keep.count(v) && p.depends_on(v)) present.insert(v);
    if (present.empty()) break;

    int v = -1;
    while (oi < opts.order.size()) {
      const int c = opts.order[oi++];
      if (present.count(c)) {
        v = c;
        break;
      }
    }
    if (v < 0) {
      int best = INT_MAX;
      for (const int c : present) {
        int d = 0;
        for (const MultiPoly& p : sys) d = std::max(d, p.degree(c));
        if (d < best) {
          best = d;
          v = c;
        }
      }
    }
    const std::string vname = kDefaultVarNames[size_t(v)];

    std::vector<MultiPoly> keepers, holders;
    for (MultiPoly& p : sys)
      (p.depends_on(v) ? holders : keepers).push_back(std::move(p));
    if (holders.size() == 1) {
      push_note(&log, "dropped the only equation involving " + vname + " [" +
                    poly_brief(holders[0]) + "]");
      sys = std::move(keepers);
      continue;
    }

    size_t piv = 0;
    for (size_t i = 1; i < holders.size(); ++i) {
      const int di = holders[i].degree(v), dp = holders[piv].degree(v);
      if (di < dp ||
          (di == dp && holders[i].terms().size() < holders[piv].terms().size()))
        piv = i;
    }
    push_note(&log, "eliminating " + vname + " from " +
                  std::to_string(holders.size()) + " equations, pivot [" +
                  poly_brief(holders[piv]) + "]");

    bool any_nonzero = false;
    for (size_t i = 0; i < holders.size(); ++i) {
      if (i == piv) continue;
      MultiPoly r = resultant(holders[piv], holders[i], v);
      if (r.is_zero()) {
        push_note(&log, "  res_" + vname + " with [" + poly_brief(holders[i]) +
                      "] vanishes");
        continue;
      }
      any_nonzero = true;
      r = polish(std::move(r), opts, keep, target, &log);
      push_note(&log, "  res_" + vname + " with [" + poly_brief(holders[i]) +
                    "] -> [" + poly_brief(r) + "]");
      bool dup = false;
      for (const MultiPoly& k : keepers) dup |= k == r;
      if (!dup) keepers.push_back(std::move(r));
    }
    if (!any_nonzero)
      throw EliminationCollapse(
          "every resultant eliminating " + vname +
          " vanishes identically; the pivot [" + poly_brief(holders[piv]) +
          "] shares a component with the rest of the system");
    sys = std::move(keepers);
  }

  if (sys.empty())
    throw EliminationCollapse("nothing survives the elimination");
  MultiPoly g = sys[0];
  for (size_t i = 1; i < sys.size() && !g.is_constant(); ++i) g = gcd(g, sys[i]);
  if (sys.size() > 1)
    push_note(&log, "combined " + std::to_string(sys.size()) +
                  " survivors by gcd -> [" + poly_brief(g) + "]");
  if (g.is_constant())
    throw EliminationCollapse(
        "the surviving relations have a constant gcd; no annihilator in the "
        "kept variables");
  if (g.terms().size() <= kPolishTermCap) {
    if (g.degree(target) >= 2) g = squarefree_part(g, target);
    if (g.degree(target) >= 1) {
      const MultiPoly c = content(g, target);
      if (!c.is_constant()) g = exact_divide(g, c);
    }
  } else {
    push_note(&log, "skipped the final content and squarefree reduction at " +
                        std::to_string(g.terms().size()) + " terms");
  }
  g = g.divide_monomial(g.monomial_content()).integer_primitive();
  if (g.is_constant())
    throw EliminationCollapse("the annihilator degenerates to a constant");
  out.poly = std::move(g);
  push_note(&log, "result: [" + poly_brief(out.poly) + "]");
  return out;
}

std::pair<Annihilator, Annihilator> critical_annihilators(const Model& m) {
  const std::vector<MultiPoly> sys = two_branch_system(m);

  EliminateOptions uo;
  uo.order = {VT, VB, VT1, VT0, VA};
  uo.saturate = {MultiPoly::variable(VU) - MultiPoly::variable(VA)};
  Annihilator au = eliminate(sys, {VZ, VX, VU}, VU, uo);

  // The branch-one pair with the series value eliminated is linear in the
  // sections, so the first section solves by Cramer and one resultant
  // against the u-annihilator finishes the job.  Models that break the
  // linearity fall back to the full elimination.
  Annihilator at0;
  const std::vector<MultiPoly> triple = critical_triple(m);
  const MultiPoly fa = resultant(triple[0], triple[2], VT);
  const MultiPoly fb = resultant(triple[1], triple[2], VT);
  const bool linear = fa.degree(VT0) <= 1 && fa.degree(VT1) <= 1 &&
                      fb.degree(VT0) <= 1 && fb.degree(VT1) <= 1 &&
                      !fa.coeff_of(VT0, 1).depends_on(VT1) &&
                      !fb.coeff_of(VT0, 1).depends_on(VT1);
  if (linear) {
    const MultiPoly a1 = fa.coeff_of(VT0, 1), a2 = fa.coeff_of(VT1, 1);
    const MultiPoly b1 = fb.coeff_of(VT0, 1), b2 = fb.coeff_of(VT1, 1);
    const MultiPoly a0 = fa.coeff_of(VT0, 0).coeff_of(VT1, 0);
    const MultiPoly b0 = fb.coeff_of(VT0, 0).coeff_of(VT1, 0);
    const MultiPoly delta = a1 * b2 - a2 * b1;
    if (!delta.is_zero()) {
      MultiPoly lin = delta * MultiPoly::variable(VT0) - (a2 * b0 - a0 * b2);
      lin = lin.divide_monomial(lin.monomial_content()).integer_primitive();
      EliminateOptions to;
      to.order = {VU};
      at0 = eliminate({lin, au.poly}, {VZ, VX, VT0}, VT0, to);
      at0.provenance.insert(
          at0.provenance.begin(),
          "first section solved by Cramer from the branch pair, determinant [" +
              poly_brief(delta) + "]");
      return {std::move(au), std::move(at0)};
    }
  }
  EliminateOptions to;
  to.order = {VT, VB, VT1, VA, VU};
  to.saturate = uo.saturate;
  at0 = eliminate(sys, {VZ, VX, VT0}, VT0, to);
  at0.provenance.insert(at0.provenance.begin(),
                        "branch pair not linear in the sections; full "
                        "elimination for the first section");
  return {std::move(au), std::move(at0)};
}

int verify_annihilator(const Annihilator& a, const TruncatedSeries<Rational>& s,
                       const TruncatedSeries<Rational>& x_bind,
                       const SeriesCtx& ctx) {
  if (a.target == VZ || a.target == VX)
    throw Error("the annihilator target cannot be a base variable");
  for (int v = 0; v < kNumVars; ++v)
    if (v != a.target && v != VZ && v != VX && a.poly.depends_on(v))
      throw Error("annihilator mentions " + kDefaultVarNames[size_t(v)] +
                  ", which has no series binding");
  std::array<TruncatedSeries<Rational>, kNumVars> pt;
  pt[VZ] = TruncatedSeries<Rational>::z_power(1);
  pt[VX] = x_bind;
  pt[size_t(a.target)] = s;
  const TruncatedSeries<Rational> r = eval_poly_series(a.poly, pt, ctx);
  const int upto = std::min(ctx.zmax, r.known_order());
  for (int n = std::min(r.lo(), 0); n <= upto; ++n)
    if (!r.at(n).is_zero()) return n;
  return upto + 1;
}

int verify_annihilator(const Annihilator& a, const TruncatedSeries<Rational>& s,
                       const SeriesCtx& ctx) {
  return verify_annihilator(
      a, s,
      TruncatedSeries<Rational>::constant(
          CoeffPoly<Rational>::monomial(Rational(1), 0, 1)),
      ctx);
}

// ---------------------------------------------------------------------------
// branch series
// ---------------------------------------------------------------------------

namespace {

using RS = TruncatedSeries<Rational>;

RS x_series() {
  return RS::constant(CoeffPoly<Rational>::monomial(Rational(1), 0, 1));
}

RS xk_part(const RS& s, int k) {
  std::vector<CoeffPoly<Rational>> cs;
  const int hi = std::min(s.known_order(), s.stored_hi());
  for (int n = s.lo(); n <= hi; ++n) {
    CoeffPoly<Rational> c;
    for (const auto& t : s.at(n).terms())
      if (t.dx == k) c.add_term(t.du, 0, t.c);
    cs.push_back(std::move(c));
  }
  return RS::from_coeffs(std::move(cs), s.lo(), s.known_order());
}

RS x0_part(const RS& s) { return xk_part(s, 0); }

RS det_small(const std::vector<std::vector<RS>>& m, const SeriesCtx& ctx) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2)
    return RS::mul(m[0][0], m[1][1], ctx) - RS::mul(m[0][1], m[1][0], ctx);
  RS out = RS::zero();
  for (size_t j = 0; j < 3; ++j) {
    const size_t j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    const RS minor = RS::mul(m[1][j1], m[2][j2], ctx) -
                     RS::mul(m[1][j2], m[2][j1], ctx);
    out = out + RS::mul(m[0][j], minor, ctx);
  }
  return out;
}

// Newton iteration over the truncated series ring, for lifts along z.  The
// Jacobian determinant at the seed must be a z-adic unit times a power of z,
// which holds for the unperturbed branch systems; each step roughly doubles
// the number of correct orders.
std::vector<RS> newton_lift(const std::vector<MultiPoly>& eqs,
                            const std::vector<int>& unknowns,
                            std::array<RS, kNumVars> pt, std::vector<RS> guess,
                            const SeriesCtx& ctx, int steps) {
  const size_t n = eqs.size();
  for (int it = 0; it < steps; ++it) {
    for (size_t j = 0; j < n; ++j) pt[size_t(unknowns[j])] = guess[j];
    std::vector<RS> f(n);
    bool residual_zero = true;
    for (size_t i = 0; i < n; ++i) {
      f[i] = eval_poly_series(eqs[i], pt, ctx);
      residual_zero &= f[i].stored_is_zero();
    }
    if (residual_zero) break;
    std::vector<std::vector<RS>> jm(n, std::vector<RS>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        jm[i][j] = eval_poly_series(eqs[i].derivative(unknowns[j]), pt, ctx);
    const RS det = det_small(jm, ctx);
    for (size_t j = 0; j < n; ++j) {
      std::vector<std::vector<RS>> col = jm;
      for (size_t i = 0; i < n; ++i) col[i][j] = -f[i];
      guess[j] = guess[j] + RS::div(det_small(col, ctx), det, ctx);
    }
  }
  return guess;
}

// Perturbative lift along the x slot.  The seed solves the system at x order
// zero; each pass solves the linearized system for the next x-order slice
// against the Jacobian frozen at the perturbation-free slice of the seed.
// Newton steps that divide whole series by the frozen determinant would seed
// spurious Laurent tails (the determinant carries a power of z) that the
// truncated ring cannot cancel again; slicing first keeps every division
// exact because the true coefficient series are regular at z = 0.
std::vector<RS> x_order_lift(const std::vector<MultiPoly>& eqs,
                             const std::vector<int>& unknowns,
                             std::array<RS, kNumVars> pt, std::vector<RS> guess,
                             const SeriesCtx& ctx, int xcap) {
  const size_t n = eqs.size();
  std::array<RS, kNumVars> pt0;
  for (size_t v = 0; v < size_t(kNumVars); ++v) pt0[v] = x0_part(pt[v]);
  for (size_t j = 0; j < n; ++j) pt0[size_t(unknowns[j])] = x0_part(guess[j]);
  std::vector<std::vector<RS>> jm(n, std::vector<RS>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      jm[i][j] = eval_poly_series(eqs[i].derivative(unknowns[j]), pt0, ctx);
  const RS det = det_small(jm, ctx);
  for (int k = 1; k <= xcap; ++k) {
    for (size_t j = 0; j < n; ++j) pt[size_t(unknowns[j])] = guess[j];
    std::vector<RS> r(n);
    bool slice_zero = true;
    for (size_t i = 0; i < n; ++i) {
      r[i] = xk_part(eval_poly_series(eqs[i], pt, ctx), k);
      slice_zero &= r[i].stored_is_zero();
    }
    if (slice_zero) continue;
    const RS xk = RS::constant(CoeffPoly<Rational>::monomial(Rational(1), 0, k));
    for (size_t j = 0; j < n; ++j) {
      std::vector<std::vector<RS>> col = jm;
      for (size_t i = 0; i < n; ++i) col[i][j] = -r[i];
      const RS delta = RS::div(det_small(col, ctx), det, ctx);
      guess[j] = guess[j] + RS::mul(delta, xk, ctx);
    }
  }
  return guess;
}

// The lifting frame: what the VX slot is bound to and what the perturbation
// evaluates to.  The solver runs with the perturbation variable e itself
// symbolic (plain x, or a jet around 1 whose stored x-degrees count powers
// of x - 1), but the branches are only power series in y = e/z, so the lift
// binds x to z*y (plus the jet center) and the stored x-degrees downstream
// count powers of y.
struct XFrame {
  SolveOptions so;
  RS x_bind;
  RS eps;
};

XFrame x_frame(const Model& m, int zmax, int xcap) {
  XFrame f;
  f.so.zmax = zmax;
  f.eps = RS::mul(RS::z_power(1), x_series(), SeriesCtx{Caps{0, xcap}, zmax});
  if (unperturbed_x(m).is_zero()) {
    f.so.xmode = XMode::kSymbolic;
    f.so.xcap = xcap;
    f.x_bind = f.eps;
  } else {
    f.so.xmode = XMode::kJet;
    f.so.jet_center = unperturbed_x(m);
    f.so.jet_order = xcap;
    f.x_bind =
        RS::constant(CoeffPoly<Rational>::constant(unperturbed_x(m))) + f.eps;
  }
  return f;
}

// Rebase a solved-frame series onto the lifting frame: the solver's stored
// x-degree counts powers of the perturbation e, the lift's counts powers of
// e/z, so every x-degree picks up one power of z.
RS z_reskew(const RS& s, int zmax) {
  const int known = std::min(s.known_order(), zmax);
  const int hi_in = std::min(s.stored_hi(), s.known_order());
  if (s.stored_is_zero() || known < s.lo()) return RS::zero(known);
  std::vector<CoeffPoly<Rational>> rows(size_t(known - s.lo() + 1));
  for (int n = s.lo(); n <= hi_in; ++n) {
    for (const auto& t : s.at(n).terms()) {
      const int m2 = n + t.dx;
      if (m2 > known) continue;
      rows[size_t(m2 - s.lo())].add_term(t.du, t.dx, t.c);
    }
  }
  return RS::from_coeffs(std::move(rows), s.lo(), known);
}

RS solved_section(const Model& m, const XFrame& f, int du, RS* other = nullptr,
                  int other_du = 1) {
  SeriesSolver<Rational> solver(m, f.so);
  solver.extend(f.so.zmax);
  if (other) *other = section_row(solver.coefficients(), other_du, f.so.zmax);
  return section_row(solver.coefficients(), du, f.so.zmax);
}

}  // namespace

TruncatedSeries<Rational> section_row(
    const std::vector<CoeffPoly<Rational>>& coeffs, int du, int zmax) {
  if (int(coeffs.size()) <= zmax)
    throw Error("solved coefficient table is shorter than the window");
  std::vector<CoeffPoly<Rational>> rows;
  rows.reserve(size_t(zmax) + 1);
  for (int n = 0; n <= zmax; ++n) {
    CoeffPoly<Rational> r;
    for (const auto& t : coeffs[size_t(n)].terms())
      if (t.du == du) r.add_term(0, t.dx, t.c);
    rows.push_back(std::move(r));
  }
  return RS::from_coeffs(std::move(rows), 0, zmax);
}

std::pair<TruncatedSeries<Rational>, TruncatedSeries<Rational>>
unperturbed_branch(const Model& m, int zmax) {
  SolveOptions so;
  so.zmax = zmax;
  so.xmode = XMode::kNumeric;
  so.x_value = unperturbed_x(m);
  SeriesSolver<Rational> solver(m, so);
  solver.extend(zmax);
  const RS t0 = section_row(solver.coefficients(), 0, zmax);

  const std::vector<MultiPoly> triple = unperturbed_triple(m);
  const SeriesCtx ctx{Caps{0, 0}, zmax};
  std::array<RS, kNumVars> pt;
  pt[VZ] = RS::z_power(1);
  pt[VT0] = t0;
  std::vector<RS> lifted = newton_lift(
      {triple[1], triple[2]}, {VU, VT}, pt,
      {RS::zero(), RS::constant(CoeffPoly<Rational>::from_rational(Rational(1)))},
      ctx, zmax + 1);
  return {std::move(lifted[0]), std::move(lifted[1])};
}

BranchSeries branch1_series(const Model& m, int zmax, int xcap) {
  const XFrame f = x_frame(m, zmax, xcap);
  RS t1;
  const RS t0 = z_reskew(solved_section(m, f, 0, &t1), zmax);
  t1 = z_reskew(t1, zmax);
  const auto seed = unperturbed_branch(m, zmax);

  const std::vector<MultiPoly> triple = critical_triple(m);
  const SeriesCtx ctx{Caps{0, xcap}, zmax};
  std::array<RS, kNumVars> pt;
  pt[VZ] = RS::z_power(1);
  pt[VX] = f.x_bind;
  pt[VT0] = t0;
  pt[VT1] = t1;
  std::vector<RS> lifted =
      x_order_lift({triple[1], triple[2]}, {VU, VT}, pt,
                   {seed.first, seed.second}, ctx, xcap);
  BranchSeries out;
  out.u = std::move(lifted[0]);
  out.t = std::move(lifted[1]);
  out.t0 = t0;
  out.t1 = t1;
  out.x_bind = f.x_bind;
  return out;
}

BranchSeries branch2_series(const Model& m, int zmax, int xcap) {
  const XFrame f = x_frame(m, zmax, xcap);
  RS t1;
  const RS t0 = z_reskew(solved_section(m, f, 0, &t1), zmax);
  const RS t0_bare = x0_part(t0);

  const SeriesCtx ctx{Caps{0, xcap}, zmax};
  const RS one = RS::constant(CoeffPoly<Rational>::from_rational(Rational(1)));
  const RS z = RS::z_power(1);
  // closed-form point of the rescaled system at the critical x
  const RS v0 = -one;
  const RS n0 = RS::div(one - t0_bare, z, ctx);
  const RS t1_0 = -n0;

  const std::vector<MultiPoly> sys = rescaled_system(m);
  std::array<RS, kNumVars> pt;
  pt[VZ] = z;
  pt[VX] = f.x_bind;
  pt[VT0] = t0;
  {
    // the closed forms must solve the system at the critical x before they
    // can seed the lift
    std::array<RS, kNumVars> chk = pt;
    chk[VX] = RS::constant(CoeffPoly<Rational>::constant(unperturbed_x(m)));
    chk[VT0] = t0_bare;
    chk[VA] = v0;
    chk[VB] = n0;
    chk[VT1] = t1_0;
    const SeriesCtx cb{Caps{0, 0}, zmax};
    for (const MultiPoly& g : sys)
      if (!eval_poly_series(g, chk, cb).stored_is_zero())
        throw Error(
            "the rescaled closed forms do not solve this model at the "
            "critical x; branch two needs a model-specific seed");
  }
  std::vector<RS> lifted =
      x_order_lift(sys, {VA, VB, VT1}, pt, {v0, n0, t1_0}, ctx, xcap);
  BranchSeries out;
  out.u = RS::mul(f.eps, lifted[0], ctx);
  out.t = t0 + RS::mul(f.eps, lifted[1], ctx);
  out.t0 = t0;
  out.t1 = std::move(lifted[2]);
  out.x_bind = f.x_bind;
  return out;
}

// ---------------------------------------------------------------------------
// fixture text form
// ---------------------------------------------------------------------------

std::string poly_to_text(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool neg = t.c < 0;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    const Rational a = abs(t.c);
    bool any_var = false;
    for (int v = 0; v < kNumVars; ++v) any_var |= t.e[size_t(v)] != 0;
    bool star = false;
    if (a != 1 || !any_var) {
      os << a.str();
      star = true;
    }
    for (int v = 0; v < kNumVars; ++v) {
      const int e = t.e[size_t(v)];
      if (e == 0) continue;
      if (star) os << '*';
      os << kDefaultVarNames[size_t(v)];
      if (e != 1) os << '^' << e;
      star = true;
    }
  }
  return os.str();
}

MultiPoly poly_from_text(const std::string& text) { return parse_poly(text); }

}  // namespace pdde
