#include "pdde/model.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "pdde/coeffpoly.hpp"
#include "pdde/multipoly.hpp"

namespace pdde {
namespace {

// Catalytic equation whose perturbation wing raises the derivative order
// from one to two.  Exercises the symbolic-x path: the wing survives at
// every x except 0.
constexpr const char* kExample2Text = R"(
name = example2;
order = 2;
perturbation = x;
Q = 1/z + z*u*y0^2 + y1;
R = y2;
)";

// Rooted simple near-triangulations.  Q is the classical root-face
// decomposition; R adds the occurrence count of a four-vertex, ten-face
// patch, and vanishes at x = 1 where plain counting is recovered.
constexpr const char* kDiamondText = R"(
name = diamond;
order = 2;
perturbation = x - 1;
Q = 1/z + y1 + y0^2/(1 - u*y0);
R = (z^9/u^2) * (u^3/z + 2*u^2*(y0 + u*y0^2/(1 - u*y0)) + 2*z*u^2*y0*y1/(1 - u*y0) + z*u^2*y0^3/(1 - u*y0)^2 + z*u^2*y2);
)";

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Rational unperturbed_x(const Model& m) {
  return m.perturbation == Perturbation::kX ? Rational(0) : Rational(1);
}

Expr perturbation_expr(const Model& m) {
  if (m.perturbation == Perturbation::kX) return expr_x();
  return expr_sub(expr_x(), expr_const(Rational(1)));
}

Expr rhs_expr(const Model& m) {
  Expr rhs = expr_mul(expr_z(), m.q);
  if (m.r)
    rhs = expr_add(rhs, expr_mul(perturbation_expr(m), expr_mul(expr_z(), m.r)));
  return rhs;
}

void validate_model(const Model& m) {
  if (!m.q) throw Error("model defines no Q");
  if (m.order < 1) throw Error("order must be at least 1");
  if (m.order > 4)
    throw Error("order above 4 does not fit the variable table");
  if (max_y_index(m.q) > 1)
    throw Error("Q may read at most the first discrete derivative");
  if (mentions_x(m.q)) throw Error("Q may not depend on x");
  if (m.r) {
    if (m.order < 2)
      throw Error("a perturbed model needs order at least 2");
    if (max_y_index(m.r) != m.order)
      throw Error("R must read the declared top derivative");
  }
}

Model parse_model(const std::string& text) {
  // Strip comments, then cut into `key = value` statements on ';'.
  std::string clean;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      clean += line;
      clean += '\n';
    }
  }

  Model m;
  m.name = "model";
  std::set<std::string> seen;
  bool have_q = false, have_order = false, have_pert = false;
  size_t pos = 0;
  while (pos < clean.size()) {
    size_t semi = clean.find(';', pos);
    std::string stmt = trim(semi == std::string::npos
                                ? clean.substr(pos)
                                : clean.substr(pos, semi - pos));
    pos = semi == std::string::npos ? clean.size() : semi + 1;
    if (stmt.empty()) continue;
    size_t eq = stmt.find('=');
    if (eq == std::string::npos)
      throw Error("model statement has no '=': " + stmt);
    std::string key = trim(stmt.substr(0, eq));
    std::string value = trim(stmt.substr(eq + 1));
    if (!seen.insert(key).second)
      throw Error("duplicate model statement: " + key);
    if (key == "name") {
      m.name = value;
    } else if (key == "order") {
      try {
        m.order = std::stoi(value);
      } catch (const std::exception&) {
        throw Error("order must be an integer, got: " + value);
      }
      have_order = true;
    } else if (key == "perturbation") {
      RationalFunction p = expr_to_rf(parse_expr(value));
      if (p == RationalFunction::variable(VX)) {
        m.perturbation = Perturbation::kX;
      } else if (p == RationalFunction::variable(VX) -
                         RationalFunction::from_rational(Rational(1))) {
        m.perturbation = Perturbation::kXMinus1;
      } else {
        throw Error("perturbation must be x or x - 1, got: " + value);
      }
      have_pert = true;
    } else if (key == "Q") {
      m.q = parse_expr(value);
      have_q = true;
    } else if (key == "R") {
      m.r = parse_expr(value);
    } else {
      throw Error("unknown model statement: " + key);
    }
  }
  if (!have_q) throw Error("model text defines no Q");
  if (!have_order) throw Error("model text defines no order");
  if (m.r && !have_pert)
    throw Error("a model with R must declare its perturbation");
  validate_model(m);
  return m;
}

std::string print_model(const Model& m) {
  std::ostringstream os;
  os << "name = " << m.name << ";\n";
  os << "order = " << m.order << ";\n";
  os << "perturbation = "
     << (m.perturbation == Perturbation::kX ? "x" : "x - 1") << ";\n";
  os << "Q = " << print_expr(m.q) << ";\n";
  if (m.r) os << "R = " << print_expr(m.r) << ";\n";
  return os.str();
}

const Model& builtin_model(const std::string& name) {
  static const std::map<std::string, Model> models = [] {
    std::map<std::string, Model> ms;
    for (const char* text : {kExample2Text, kDiamondText}) {
      Model m = parse_model(text);
      ms.emplace(m.name, std::move(m));
    }
    return ms;
  }();
  auto it = models.find(name);
  if (it == models.end()) throw Error("unknown builtin model: " + name);
  return it->second;
}

std::vector<std::string> builtin_model_names() {
  return {"diamond", "example2"};
}

// ---------------------------------------------------------------------------
// hypothesis checks
// ---------------------------------------------------------------------------

namespace {

MultiPoly trunc_total(const MultiPoly& p, int maxdeg) {
  std::vector<MultiPoly::Term> keep;
  for (const auto& t : p.terms()) {
    int d = 0;
    for (int v = 0; v < kNumVars; ++v) d += t.e[size_t(v)];
    if (d <= maxdeg) keep.push_back(t);
  }
  return MultiPoly::from_terms(std::move(keep));
}

// Expands num/den as a power series (after pulling the monomial part out of
// den) to the given total degree and checks every coefficient's sign.  A
// negative coefficient is decisive; a clean prefix only vouches for the
// expanded range.
Tri expansion_nonnegative(const RationalFunction& q, int maxdeg) {
  MultiPoly den = q.den().divide_monomial(q.den().monomial_content());
  MultiPoly c0 = den;
  for (int v = 0; v < kNumVars; ++v) c0 = c0.coeff_of(v, 0);
  if (c0.is_zero()) return Tri::kUnknown;
  const Rational c = c0.constant_value();
  const MultiPoly step = (MultiPoly(c) - den).scaled(Rational(1) / c);
  MultiPoly inv(Rational(1) / c);
  MultiPoly term = inv;
  for (int k = 1; k <= maxdeg; ++k) {
    term = trunc_total(term * step, maxdeg);
    if (term.is_zero()) break;
    inv += term;
  }
  const MultiPoly prod = trunc_total(q.num() * inv, maxdeg);
  for (const auto& t : prod.terms())
    if (t.c < 0) return Tri::kFail;
  return Tri::kPass;
}

using Poly = CoeffPoly<Rational>;

// A u-Laurent value u^sh * p; division by pure u powers keeps sh negative
// until the final normalization.
struct LaurentVal {
  Poly p;
  int sh = 0;
};

LaurentVal lv_add(const LaurentVal& a, const LaurentVal& b, const Caps& caps,
                  bool negate) {
  if (a.p.is_zero()) return negate ? LaurentVal{-b.p, b.sh} : b;
  if (b.p.is_zero()) return a;
  const int sh = std::min(a.sh, b.sh);
  Poly pa = a.sh == sh ? a.p : a.p.mono_shift(a.sh - sh, 0, caps);
  Poly pb = b.sh == sh ? b.p : b.p.mono_shift(b.sh - sh, 0, caps);
  return {negate ? pa - pb : pa + pb, sh};
}

LaurentVal lv_mul(const LaurentVal& a, const LaurentVal& b, const Caps& caps) {
  return {Poly::mul(a.p, b.p, caps), a.sh + b.sh};
}

LaurentVal lv_inverse(const LaurentVal& a, const Caps& caps) {
  if (a.p.is_zero()) throw ZeroDenominator("division by zero while probing");
  const int m = a.p.terms().front().du;
  const Poly core = m == 0 ? a.p : a.p.mono_shift(-m, 0, caps);
  return {core.inverse(caps), -a.sh - m};
}

Poly lv_normalize(const LaurentVal& a, const Caps& caps) {
  if (a.sh == 0) return a.p;
  return a.p.mono_shift(a.sh, 0, caps);
}

LaurentVal probe_eval(const Expr& e, const Rational& zv, const Rational& xv,
                      const std::vector<Poly>& ys, const Caps& caps) {
  switch (e->kind) {
    case ExprKind::kConst:
      return {Poly::constant(e->value), 0};
    case ExprKind::kZ:
      return {Poly::constant(zv), 0};
    case ExprKind::kU:
      return {Poly::monomial(Rational(1), 1, 0), 0};
    case ExprKind::kX:
      return {Poly::constant(xv), 0};
    case ExprKind::kY:
      return {ys.at(size_t(e->index)), 0};
    case ExprKind::kAdd:
      return lv_add(probe_eval(e->a, zv, xv, ys, caps),
                    probe_eval(e->b, zv, xv, ys, caps), caps, false);
    case ExprKind::kSub:
      return lv_add(probe_eval(e->a, zv, xv, ys, caps),
                    probe_eval(e->b, zv, xv, ys, caps), caps, true);
    case ExprKind::kNeg: {
      LaurentVal a = probe_eval(e->a, zv, xv, ys, caps);
      return {-a.p, a.sh};
    }
    case ExprKind::kMul:
      return lv_mul(probe_eval(e->a, zv, xv, ys, caps),
                    probe_eval(e->b, zv, xv, ys, caps), caps);
    case ExprKind::kDiv:
      return lv_mul(probe_eval(e->a, zv, xv, ys, caps),
                    lv_inverse(probe_eval(e->b, zv, xv, ys, caps), caps), caps);
    case ExprKind::kPow: {
      LaurentVal base = probe_eval(e->a, zv, xv, ys, caps);
      int n = e->index;
      if (n < 0) {
        base = lv_inverse(base, caps);
        n = -n;
      }
      LaurentVal out{Poly::constant(Rational(1)), 0};
      while (n > 0) {
        if (n & 1) out = lv_mul(out, base, caps);
        n >>= 1;
        if (n) base = lv_mul(base, base, caps);
      }
      return out;
    }
  }
  throw Error("unhandled expression node");
}

void probe_once(const Model& m, int bound, std::mt19937& rng,
                std::vector<std::set<int>>* edges) {
  const Caps caps{bound + 24, 0};
  const Rational xv(1);
  const Rational pert =
      m.perturbation == Perturbation::kX ? Rational(1) : Rational(0);
  auto draw = [&rng](int lo, int span) {
    return long(lo) + long(rng() % unsigned(span));
  };
  const Rational zv = Rational(draw(1, 6)) / Rational(draw(7, 5));
  std::vector<Rational> tau;
  tau.reserve(size_t(bound) + 1);
  for (int j = 0; j <= bound; ++j)
    tau.push_back(Rational(draw(1, 9)) / Rational(draw(1, 4)));

  auto eval_rhs = [&](const std::vector<Rational>& t) {
    Poly s;
    for (int j = 0; j <= bound; ++j) s.add_term(j, 0, t[size_t(j)]);
    std::vector<Poly> ys(size_t(m.order) + 1);
    ys[0] = s;
    for (int k = 1; k <= m.order; ++k)
      ys[size_t(k)] = ys[size_t(k) - 1].discrete_delta();
    LaurentVal q = probe_eval(m.q, zv, xv, ys, caps);
    LaurentVal out{q.p.scaled(zv), q.sh};
    if (m.r && !pert.is_zero()) {
      LaurentVal r = probe_eval(m.r, zv, xv, ys, caps);
      out = lv_add(out, {r.p.scaled(zv * pert), r.sh}, caps, false);
    }
    return lv_normalize(out, caps);
  };

  const Poly base = eval_rhs(tau);
  for (int j = 0; j <= bound; ++j) {
    std::vector<Rational> bumped = tau;
    bumped[size_t(j)] += Rational(draw(1, 3)) / Rational(2);
    const Poly probed = eval_rhs(bumped);
    for (int i = 0; i <= bound; ++i)
      if (base.coeff(i, 0) != probed.coeff(i, 0)) (*edges)[size_t(i)].insert(j);
  }
}

}  // namespace

bool AssumptionReport::all_pass() const {
  return order_ge_2 && q_x_free && r_linear_in_top && q_nonzero_origin &&
         q_u_partial_nonzero && q_y1_partial_nonzero &&
         q_second_order_nonzero && q_nonnegative == Tri::kPass &&
         strongly_connected;
}

std::string AssumptionReport::summary() const {
  auto yn = [](bool b) { return b ? "pass" : "FAIL"; };
  std::ostringstream os;
  os << "order >= 2: " << yn(order_ge_2) << "\n";
  os << "Q free of x: " << yn(q_x_free) << "\n";
  os << "R linear in top derivative: " << yn(r_linear_in_top) << "\n";
  os << "Q(z,0,0,0) nonzero: " << yn(q_nonzero_origin) << "\n";
  os << "dQ/du nonzero at y1 = 0: " << yn(q_u_partial_nonzero) << "\n";
  os << "dQ/dy1 nonzero: " << yn(q_y1_partial_nonzero) << "\n";
  os << "Q second order in (u, y0): " << yn(q_second_order_nonzero) << "\n";
  os << "Q coefficients nonnegative: "
     << (q_nonnegative == Tri::kPass
             ? "pass (to total degree 8)"
             : q_nonnegative == Tri::kFail ? "FAIL" : "unknown")
     << "\n";
  os << "dependency graph strongly connected: " << yn(strongly_connected)
     << "\n";
  return os.str();
}

AssumptionReport check_assumptions(const Model& m, int graph_bound) {
  validate_model(m);
  AssumptionReport rep;
  rep.order_ge_2 = m.order >= 2;
  rep.q_x_free = !mentions_x(m.q);
  if (!m.r) {
    rep.r_linear_in_top = true;
  } else {
    const RationalFunction r = expr_to_rf(m.r);
    const int top = 3 + m.order;
    rep.r_linear_in_top =
        r.num().degree(top) <= 1 && r.den().degree(top) <= 0;
  }
  const RationalFunction q = expr_to_rf(m.q);
  const int y0 = 3, y1 = 4;
  rep.q_nonzero_origin = !q.substitute(VU, Rational(0))
                              .substitute(y0, Rational(0))
                              .substitute(y1, Rational(0))
                              .is_zero();
  rep.q_u_partial_nonzero =
      !q.derivative(VU).substitute(y1, Rational(0)).is_zero();
  rep.q_y1_partial_nonzero = !q.derivative(y1).is_zero();
  rep.q_second_order_nonzero = !q.derivative(y0).derivative(y0).is_zero() ||
                               !q.derivative(VU).derivative(y0).is_zero();
  rep.q_nonnegative = expansion_nonnegative(q, 8);
  rep.strongly_connected = dependency_graph(m, graph_bound).strongly_connected;
  return rep;
}

DependencyGraph dependency_graph(const Model& m, int bound) {
  validate_model(m);
  if (bound < 0) bound = 3 * m.order + 6;
  const int n = bound + 1;
  std::vector<std::set<int>> found(static_cast<size_t>(n));
  for (unsigned trial = 0; trial < 2; ++trial) {
    std::mt19937 rng(0x9e3779b9u + trial);
    for (int attempt = 0;; ++attempt) {
      try {
        probe_once(m, bound, rng, &found);
        break;
      } catch (const NonInvertibleSeries&) {
        if (attempt >= 5) throw;
      } catch (const ZeroDenominator&) {
        if (attempt >= 5) throw;
      }
    }
  }

  DependencyGraph g;
  g.bound = bound;
  g.edges.assign(size_t(n), {});
  std::vector<std::vector<int>> rev(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j : found[size_t(i)]) {
      g.edges[size_t(i)].push_back(j);
      rev[size_t(j)].push_back(i);
    }

  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(size_t(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[size_t(v)])
        if (!seen[size_t(w)]) {
          seen[size_t(w)] = 1;
          ++cnt;
          stack.push_back(w);
        }
    }
    return cnt == n;
  };
  g.strongly_connected = reaches_all(g.edges) && reaches_all(rev);
  return g;
}

}  // namespace pdde
