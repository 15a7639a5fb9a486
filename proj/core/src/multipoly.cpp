#include "pdde/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace pdde {

const std::array<std::string, kNumVars> kDefaultVarNames = {
    "z", "u", "x", "T", "t0", "t1", "A", "B"};

namespace {

bool exps_greater(const Exps& a, const Exps& b) { return a > b; }

Exps zero_exps() { return Exps{}; }

}  // namespace

// ---------------------------------------------------------------------------
// construction and normalization
// ---------------------------------------------------------------------------

MultiPoly::MultiPoly(const Rational& c) {
  if (c != 0) terms_.push_back(Term{zero_exps(), c});
}

MultiPoly MultiPoly::variable(int var, int exp) {
  if (var < 0 || var >= kNumVars) throw UnknownVariable("variable slot out of range");
  if (exp < 0) throw Error("variable exponent must be non-negative");
  MultiPoly p;
  Term t{zero_exps(), Rational(1)};
  t.e[size_t(var)] = int16_t(exp);
  p.terms_.push_back(std::move(t));
  return p;
}

MultiPoly MultiPoly::monomial(const Rational& c, const Exps& e) {
  MultiPoly p;
  if (c != 0) p.terms_.push_back(Term{e, c});
  return p;
}

MultiPoly MultiPoly::from_terms(std::vector<Term> terms) {
  MultiPoly p;
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void MultiPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return exps_greater(a.e, b.e); });
  size_t out = 0;
  for (size_t i = 0; i < terms_.size();) {
    size_t j = i + 1;
    Rational c = terms_[i].c;
    while (j < terms_.size() && terms_[j].e == terms_[i].e) c += terms_[j++].c;
    if (c != 0) {
      terms_[out].e = terms_[i].e;
      terms_[out].c = std::move(c);
      ++out;
    }
    i = j;
  }
  terms_.resize(out);
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].e == zero_exps());
}

const Rational& MultiPoly::leading_rational() const {
  if (terms_.empty()) throw Error("leading_rational of zero polynomial");
  return terms_[0].c;
}

Rational MultiPoly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) throw Error("constant_value of non-constant polynomial");
  return terms_[0].c;
}

int MultiPoly::degree(int var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const Term& t : terms_) d = std::max(d, int(t.e[size_t(var)]));
  return d;
}

int MultiPoly::total_degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const Term& t : terms_) {
    int s = 0;
    for (int v = 0; v < kNumVars; ++v) s += t.e[size_t(v)];
    d = std::max(d, s);
  }
  return d;
}

bool MultiPoly::depends_on(int var) const {
  for (const Term& t : terms_)
    if (t.e[size_t(var)] != 0) return true;
  return false;
}

MultiPoly MultiPoly::coeff_of(int var, int deg) const {
  MultiPoly out;
  for (const Term& t : terms_) {
    if (t.e[size_t(var)] != deg) continue;
    Term s = t;
    s.e[size_t(var)] = 0;
    out.terms_.push_back(std::move(s));
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::leading_coeff(int var) const {
  return coeff_of(var, degree(var));
}

// ---------------------------------------------------------------------------
// ring operations
// ---------------------------------------------------------------------------

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  size_t i = 0;
  size_t j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    if (j == b.terms_.size() ||
        (i < a.terms_.size() && exps_greater(a.terms_[i].e, b.terms_[j].e))) {
      out.terms_.push_back(a.terms_[i++]);
    } else if (i == a.terms_.size() || exps_greater(b.terms_[j].e, a.terms_[i].e)) {
      out.terms_.push_back(b.terms_[j++]);
    } else {
      Rational c = a.terms_[i].c + b.terms_[j].c;
      if (c != 0) out.terms_.push_back(MultiPoly::Term{a.terms_[i].e, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly MultiPoly::operator-() const {
  MultiPoly out(*this);
  for (Term& t : out.terms_) t.c = -t.c;
  return out;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly out;
  if (a.terms_.empty() || b.terms_.empty()) return out;

  auto add_exps = [](const Exps& x, const Exps& y) {
    Exps e;
    for (int v = 0; v < kNumVars; ++v)
      e[size_t(v)] = int16_t(x[size_t(v)] + y[size_t(v)]);
    return e;
  };

  // Monomial factors keep the term order, so no re-sort is needed.
  if (a.terms_.size() == 1 || b.terms_.size() == 1) {
    const MultiPoly& mono = a.terms_.size() == 1 ? a : b;
    const MultiPoly& poly = a.terms_.size() == 1 ? b : a;
    out.terms_.reserve(poly.terms_.size());
    for (const MultiPoly::Term& t : poly.terms_)
      out.terms_.push_back(
          MultiPoly::Term{add_exps(t.e, mono.terms_[0].e), t.c * mono.terms_[0].c});
    return out;
  }

  const size_t pairs = a.terms_.size() * b.terms_.size();
  if (pairs <= (size_t{1} << 16)) {
    out.terms_.reserve(pairs);
    for (const MultiPoly::Term& s : a.terms_)
      for (const MultiPoly::Term& t : b.terms_)
        out.terms_.push_back(MultiPoly::Term{add_exps(s.e, t.e), s.c * t.c});
    out.normalize();
    return out;
  }

  std::map<Exps, Rational, std::greater<Exps>> acc;
  for (const MultiPoly::Term& s : a.terms_)
    for (const MultiPoly::Term& t : b.terms_) acc[add_exps(s.e, t.e)] += s.c * t.c;
  out.terms_.reserve(acc.size());
  for (auto& [e, c] : acc)
    if (c != 0) out.terms_.push_back(MultiPoly::Term{e, std::move(c)});
  return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) { return *this = *this + o; }
MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this = *this - o; }
MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].e != b.terms_[i].e || a.terms_[i].c != b.terms_[i].c) return false;
  return true;
}

MultiPoly MultiPoly::pow(int n) const {
  if (n < 0) throw Error("MultiPoly::pow: negative exponent");
  MultiPoly out(Rational(1));
  MultiPoly base(*this);
  while (n > 0) {
    if (n & 1) out *= base;
    if (n >>= 1) base *= base;
  }
  return out;
}

MultiPoly MultiPoly::scaled(const Rational& c) const {
  MultiPoly out;
  if (c == 0) return out;
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) out.terms_.push_back(Term{t.e, t.c * c});
  return out;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly out;
  for (const Term& t : terms_) {
    const int e = t.e[size_t(var)];
    if (e == 0) continue;
    Term s = t;
    s.c *= e;
    s.e[size_t(var)] = int16_t(e - 1);
    out.terms_.push_back(std::move(s));
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::substitute(int var, const MultiPoly& value) const {
  if (!depends_on(var)) return *this;
  const int d = degree(var);
  MultiPoly out = coeff_of(var, d);
  for (int i = d - 1; i >= 0; --i) out = out * value + coeff_of(var, i);
  return out;
}

MultiPoly MultiPoly::substitute(int var, const Rational& value) const {
  MultiPoly out;
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    Term s = t;
    const int e = s.e[size_t(var)];
    if (e != 0) {
      s.c *= rational_pow(value, e);
      s.e[size_t(var)] = 0;
    }
    if (s.c != 0) out.terms_.push_back(std::move(s));
  }
  out.normalize();
  return out;
}

MultiPoly MultiPoly::rename(std::span<const std::pair<int, int>> moves) const {
  MultiPoly out;
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    Term s = t;
    for (const auto& [from, to] : moves) s.e[size_t(from)] = 0;
    for (const auto& [from, to] : moves) {
      if (t.e[size_t(from)] == 0) continue;
      if (s.e[size_t(to)] != 0) throw Error("rename: target slot already in use");
      s.e[size_t(to)] = t.e[size_t(from)];
    }
    out.terms_.push_back(std::move(s));
  }
  out.normalize();
  return out;
}

Exps MultiPoly::monomial_content() const {
  if (terms_.empty()) return zero_exps();
  Exps m = terms_[0].e;
  for (const Term& t : terms_)
    for (int v = 0; v < kNumVars; ++v)
      m[size_t(v)] = std::min(m[size_t(v)], t.e[size_t(v)]);
  return m;
}

MultiPoly MultiPoly::divide_monomial(const Exps& m) const {
  MultiPoly out;
  out.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    Term s = t;
    for (int v = 0; v < kNumVars; ++v) {
      const int e = t.e[size_t(v)] - m[size_t(v)];
      if (e < 0) throw NotDivisible("monomial does not divide every term");
      s.e[size_t(v)] = int16_t(e);
    }
    out.terms_.push_back(std::move(s));
  }
  return out;
}

MultiPoly MultiPoly::integer_primitive(Rational* scale) const {
  if (terms_.empty()) {
    if (scale) *scale = 1;
    return *this;
  }
  Integer l(1);
  for (const Term& t : terms_) l = lcm(l, denominator(t.c));
  Integer g(0);
  for (const Term& t : terms_) g = gcd(g, Integer(numerator(t.c) * l / denominator(t.c)));
  Rational s(l, g);
  if (terms_[0].c < 0) s = -s;
  if (scale) *scale = s;
  return scaled(s);
}

// ---------------------------------------------------------------------------
// division
// ---------------------------------------------------------------------------

bool try_exact_divide(const MultiPoly& f, const MultiPoly& g, MultiPoly* q) {
  if (g.is_zero()) throw ZeroDenominator("exact_divide by zero polynomial");
  MultiPoly quot;
  MultiPoly rem = f;
  const MultiPoly::Term& lg = g.terms()[0];
  while (!rem.is_zero()) {
    const MultiPoly::Term& lr = rem.terms()[0];
    Exps d;
    for (int v = 0; v < kNumVars; ++v) {
      const int e = lr.e[size_t(v)] - lg.e[size_t(v)];
      if (e < 0) return false;
      d[size_t(v)] = int16_t(e);
    }
    MultiPoly t = MultiPoly::monomial(lr.c / lg.c, d);
    quot += t;
    rem -= t * g;
  }
  if (q) *q = std::move(quot);
  return true;
}

MultiPoly exact_divide(const MultiPoly& f, const MultiPoly& g) {
  MultiPoly q;
  if (!try_exact_divide(f, g, &q))
    throw NotDivisible("polynomial division left a remainder");
  return q;
}

bool divides(const MultiPoly& g, const MultiPoly& f) {
  return try_exact_divide(f, g, nullptr);
}

void pseudo_divide(const MultiPoly& f, const MultiPoly& g, int var,
                   MultiPoly* q, MultiPoly* r) {
  const int dg = g.degree(var);
  if (g.is_zero()) throw ZeroDenominator("pseudo_divide by zero polynomial");
  MultiPoly quot;
  MultiPoly rem = f;
  const MultiPoly lg = g.leading_coeff(var);
  const int df = f.degree(var);
  int steps = 0;
  while (!rem.is_zero() && rem.degree(var) >= dg) {
    const int dr = rem.degree(var);
    MultiPoly t = rem.coeff_of(var, dr) * MultiPoly::variable(var, dr - dg);
    rem = lg * rem - t * g;
    quot = lg * quot + t;
    ++steps;
  }
  // Pad so the classical identity lc^(df-dg+1) f = q g + r holds exactly.
  for (int i = steps; i < df - dg + 1; ++i) {
    quot = lg * quot;
    rem = lg * rem;
  }
  if (q) *q = std::move(quot);
  if (r) *r = std::move(rem);
}

MultiPoly pseudo_rem(const MultiPoly& f, const MultiPoly& g, int var) {
  MultiPoly r;
  pseudo_divide(f, g, var, nullptr, &r);
  return r;
}

// ---------------------------------------------------------------------------
// content, gcd
// ---------------------------------------------------------------------------

MultiPoly content(const MultiPoly& f, int var) {
  if (f.is_zero()) return f;
  const int d = f.degree(var);
  if (d == 0) return f;
  MultiPoly acc;
  for (int i = 0; i <= d; ++i) {
    MultiPoly c = f.coeff_of(var, i);
    if (c.is_zero()) continue;
    acc = gcd(acc, c);
    if (acc.is_constant()) return MultiPoly(Rational(1));
  }
  return acc;
}

MultiPoly primitive_part(const MultiPoly& f, int var) {
  if (f.is_zero()) return f;
  return exact_divide(f, content(f, var)).integer_primitive();
}

MultiPoly gcd(const MultiPoly& f, const MultiPoly& g) {
  if (f.is_zero()) return g.integer_primitive();
  if (g.is_zero()) return f.integer_primitive();
  if (f.is_constant() || g.is_constant()) return MultiPoly(Rational(1));

  // Shared monomial factor comes off first; everything after runs sparser.
  const Exps mf = f.monomial_content();
  const Exps mg = g.monomial_content();
  Exps shared;
  for (size_t v = 0; v < size_t(kNumVars); ++v) shared[v] = std::min(mf[v], mg[v]);
  const MultiPoly fs = f.divide_monomial(mf);
  const MultiPoly gs = g.divide_monomial(mg);
  const MultiPoly mono = MultiPoly::monomial(Rational(1), shared);

  // Variables in one operand only cannot appear in a common divisor.
  int var = -1;
  for (int v = kNumVars - 1; v >= 0; --v) {
    const bool in_f = fs.depends_on(v);
    const bool in_g = gs.depends_on(v);
    if (in_f && in_g) {
      var = v;
      break;
    }
    if (in_f) return mono * gcd(content(fs, v), gs);
    if (in_g) return mono * gcd(fs, content(gs, v));
  }
  if (var < 0) return mono;

  // Subresultant remainder sequence.  A primitive sequence would need a
  // recursive content per step, which blows up on multivariate inputs; the
  // subresultant divisor keeps coefficients polynomially bounded and defers
  // the content work to the single primitive_part at the end.
  MultiPoly c = gcd(content(fs, var), content(gs, var));
  MultiPoly fp = primitive_part(fs, var);
  MultiPoly gp = primitive_part(gs, var);
  if (fp.degree(var) < gp.degree(var)) std::swap(fp, gp);
  MultiPoly gg(Rational(1));
  MultiPoly h(Rational(1));
  while (true) {
    const int delta = fp.degree(var) - gp.degree(var);
    MultiPoly r = pseudo_rem(fp, gp, var);
    if (r.is_zero()) break;
    if (r.degree(var) == 0) return (mono * c).integer_primitive();
    fp = std::move(gp);
    gp = exact_divide(r, gg * h.pow(delta));
    gg = fp.leading_coeff(var);
    if (delta == 1) {
      h = gg;
    } else if (delta > 1) {
      h = exact_divide(gg.pow(delta), h.pow(delta - 1));
    }
  }
  return (mono * c * primitive_part(gp, var)).integer_primitive();
}

// ---------------------------------------------------------------------------
// resultants
// ---------------------------------------------------------------------------

MultiPoly det_bareiss(std::vector<std::vector<MultiPoly>> m) {
  const size_t n = m.size();
  if (n == 0) return MultiPoly(Rational(1));
  int sign = 1;
  MultiPoly prev(Rational(1));
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      size_t r = k + 1;
      while (r < n && m[r][k].is_zero()) ++r;
      if (r == n) return MultiPoly();
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j)
        m[i][j] = exact_divide(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
      m[i][k] = MultiPoly();
    }
    prev = m[k][k];
  }
  MultiPoly det = m[n - 1][n - 1];
  return sign < 0 ? -det : det;
}

MultiPoly resultant_sylvester(const MultiPoly& f, const MultiPoly& g, int var) {
  if (f.is_zero() || g.is_zero()) return MultiPoly();
  const int m = f.degree(var);
  const int n = g.degree(var);
  if (m == 0 && n == 0) return MultiPoly(Rational(1));
  if (m == 0) return f.pow(n);
  if (n == 0) return g.pow(m);
  const size_t dim = size_t(m + n);
  std::vector<std::vector<MultiPoly>> s(dim, std::vector<MultiPoly>(dim));
  for (int row = 0; row < n; ++row)
    for (int i = 0; i <= m; ++i) s[size_t(row)][size_t(row + i)] = f.coeff_of(var, m - i);
  for (int row = 0; row < m; ++row)
    for (int i = 0; i <= n; ++i)
      s[size_t(n + row)][size_t(row + i)] = g.coeff_of(var, n - i);
  return det_bareiss(std::move(s));
}

namespace {

// Full content of f with respect to var: poly * rational so the primitive
// part has integer coprime coefficients and positive leading coefficient.
void full_content(const MultiPoly& f, int var, MultiPoly* cont_poly,
                  Rational* cont_rat, MultiPoly* prim) {
  MultiPoly cp = content(f, var);
  MultiPoly p = exact_divide(f, cp);
  Rational s;
  *prim = p.integer_primitive(&s);
  *cont_poly = cp;
  *cont_rat = Rational(1) / s;
}

}  // namespace

MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, int var) {
  if (f.is_zero() || g.is_zero()) return MultiPoly();
  int m = f.degree(var);
  int n = g.degree(var);
  if (m == 0 && n == 0) return MultiPoly(Rational(1));
  if (m == 0) return f.pow(n);
  if (n == 0) return g.pow(m);

  MultiPoly A = f;
  MultiPoly B = g;
  int sign = 1;
  if (m < n) {
    std::swap(A, B);
    std::swap(m, n);
    if ((m & 1) && (n & 1)) sign = -sign;
  }

  MultiPoly ca;
  MultiPoly cb;
  Rational ra;
  Rational rb;
  MultiPoly pa;
  MultiPoly pb;
  full_content(A, var, &ca, &ra, &pa);
  full_content(B, var, &cb, &rb, &pb);
  const MultiPoly t_poly = ca.pow(n) * cb.pow(m);
  const Rational t_rat = rational_pow(ra, n) * rational_pow(rb, m);

  // Subresultant remainder sequence on the primitive parts.
  A = std::move(pa);
  B = std::move(pb);
  MultiPoly gg(Rational(1));
  MultiPoly h(Rational(1));
  while (true) {
    const int da = A.degree(var);
    const int db = B.degree(var);
    const int delta = da - db;
    if ((da & 1) && (db & 1)) sign = -sign;
    MultiPoly r = pseudo_rem(A, B, var);
    A = std::move(B);
    if (r.is_zero()) return MultiPoly();
    B = exact_divide(r, gg * h.pow(delta));
    gg = A.leading_coeff(var);
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = gg;
    } else {
      h = exact_divide(gg.pow(delta), h.pow(delta - 1));
    }
    if (B.degree(var) == 0) break;
  }

  const int da = A.degree(var);
  MultiPoly res = exact_divide(B.pow(da), h.pow(da - 1));
  res = (t_poly * res).scaled(t_rat);
  return sign < 0 ? -res : res;
}

MultiPoly squarefree_part(const MultiPoly& f, int var) {
  if (f.is_zero()) return f;
  MultiPoly d = f.derivative(var);
  if (d.is_zero()) return f.integer_primitive();
  MultiPoly g = gcd(f, d);
  return exact_divide(f, g).integer_primitive();
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
  const std::string& text;
  std::span<const std::string> names;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      advance();
  }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  bool eof() {
    skip_space();
    return pos >= text.size();
  }

  char peek() {
    skip_space();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw SyntaxError(std::string("expected '") + c + "'", line, col);
  }

  Integer integer() {
    skip_space();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw SyntaxError("expected a number", line, col);
    std::string digits;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits += text[pos];
      advance();
    }
    return Integer(digits);
  }

  std::string name() {
    skip_space();
    if (pos >= text.size() ||
        !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      throw SyntaxError("expected a name", line, col);
    std::string out;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      out += text[pos];
      advance();
    }
    return out;
  }

  int resolve(const std::string& n) {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return int(i);
    throw UnknownVariable("unknown variable '" + n + "' at line " +
                          std::to_string(line) + ", column " + std::to_string(col));
  }
};

MultiPoly parse_sum(Lexer& lx);

MultiPoly parse_factor(Lexer& lx) {
  const char c = lx.peek();
  if (c == '(') {
    lx.advance();
    MultiPoly inner = parse_sum(lx);
    lx.expect(')');
    return inner;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    Integer num = lx.integer();
    if (lx.accept('/')) {
      Integer den = lx.integer();
      if (den == 0) throw SyntaxError("zero denominator in literal", lx.line, lx.col);
      return MultiPoly(Rational(num, den));
    }
    return MultiPoly(Rational(num));
  }
  const std::string n = lx.name();
  const int var = lx.resolve(n);
  int exp = 1;
  if (lx.accept('^')) exp = lx.integer().convert_to<int>();
  return MultiPoly::variable(var, exp);
}

MultiPoly parse_term(Lexer& lx) {
  MultiPoly out = parse_factor(lx);
  while (lx.accept('*')) out *= parse_factor(lx);
  return out;
}

MultiPoly parse_sum(Lexer& lx) {
  MultiPoly out;
  bool neg = false;
  if (lx.accept('-'))
    neg = true;
  else
    lx.accept('+');
  while (true) {
    MultiPoly t = parse_term(lx);
    out = neg ? out - t : out + t;
    if (lx.accept('-'))
      neg = true;
    else if (lx.accept('+'))
      neg = false;
    else
      break;
  }
  return out;
}

}  // namespace

MultiPoly parse_poly(const std::string& text, std::span<const std::string> names) {
  Lexer lx{text, names};
  MultiPoly p = parse_sum(lx);
  if (!lx.eof()) throw SyntaxError("unexpected trailing input", lx.line, lx.col);
  return p;
}

MultiPoly parse_poly(const std::string& text) {
  return parse_poly(text, kDefaultVarNames);
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

std::string MultiPoly::str(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Term& t : terms_) {
    Rational c = t.c;
    if (first) {
      if (c < 0) {
        os << "-";
        c = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;

    std::string mono;
    for (int v = 0; v < kNumVars; ++v) {
      const int e = t.e[size_t(v)];
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[size_t(v)];
      if (e != 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      os << c.str();
    } else {
      if (c != 1) os << c.str() << "*";
      os << mono;
    }
  }
  return os.str();
}

std::string MultiPoly::str() const { return str(kDefaultVarNames); }

// ---------------------------------------------------------------------------
// rational functions
// ---------------------------------------------------------------------------

RationalFunction::RationalFunction(MultiPoly num, MultiPoly den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw ZeroDenominator("rational function with zero denominator");
  reduce();
}

void RationalFunction::reduce() {
  if (num_.is_zero()) {
    den_ = MultiPoly(Rational(1));
    return;
  }
  MultiPoly g = gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = exact_divide(num_, g);
    den_ = exact_divide(den_, g);
  }
  Rational s;
  den_ = den_.integer_primitive(&s);
  num_ = num_.scaled(s);
}

bool RationalFunction::is_polynomial() const {
  return den_ == MultiPoly(Rational(1));
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.num_.is_zero()) throw ZeroDenominator("division by zero rational function");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out(*this);
  out.num_ = -out.num_;
  return out;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  return a.num_ == b.num_ && a.den_ == b.den_;
}

RationalFunction RationalFunction::pow(int n) const {
  if (n < 0) {
    if (num_.is_zero()) throw ZeroDenominator("zero to a negative power");
    return RationalFunction(den_, num_).pow(-n);
  }
  return RationalFunction(num_.pow(n), den_.pow(n));
}

RationalFunction RationalFunction::derivative(int var) const {
  return RationalFunction(
      num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

RationalFunction RationalFunction::substitute(int var,
                                              const RationalFunction& value) const {
  auto horner = [&](const MultiPoly& p) {
    if (!p.depends_on(var)) return RationalFunction(p);
    const int d = p.degree(var);
    RationalFunction out(p.coeff_of(var, d));
    for (int i = d - 1; i >= 0; --i)
      out = out * value + RationalFunction(p.coeff_of(var, i));
    return out;
  };
  return horner(num_) / horner(den_);
}

RationalFunction RationalFunction::substitute(int var, const Rational& value) const {
  return RationalFunction(num_.substitute(var, value), den_.substitute(var, value));
}

std::string RationalFunction::str(std::span<const std::string> names) const {
  if (is_polynomial()) return num_.str(names);
  return "(" + num_.str(names) + ") / (" + den_.str(names) + ")";
}

std::string RationalFunction::str() const { return str(kDefaultVarNames); }

}  // namespace pdde
