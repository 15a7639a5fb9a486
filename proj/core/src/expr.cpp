#include "pdde/expr.hpp"

#include <cctype>
#include <sstream>

#include "pdde/errors.hpp"

namespace pdde {

namespace {

Expr make(ExprKind k, Expr a = nullptr, Expr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr expr_const(const Rational& v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kConst;
  n->value = v;
  return n;
}

Expr expr_z() { return make(ExprKind::kZ); }
Expr expr_u() { return make(ExprKind::kU); }
Expr expr_x() { return make(ExprKind::kX); }

Expr expr_y(int j) {
  if (j < 0) throw Error("negative discrete derivative order");
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kY;
  n->index = j;
  return n;
}

Expr expr_add(Expr a, Expr b) { return make(ExprKind::kAdd, std::move(a), std::move(b)); }
Expr expr_sub(Expr a, Expr b) { return make(ExprKind::kSub, std::move(a), std::move(b)); }
Expr expr_neg(Expr a) { return make(ExprKind::kNeg, std::move(a)); }
Expr expr_mul(Expr a, Expr b) { return make(ExprKind::kMul, std::move(a), std::move(b)); }
Expr expr_div(Expr a, Expr b) { return make(ExprKind::kDiv, std::move(a), std::move(b)); }

Expr expr_pow(Expr a, int n) {
  auto e = std::make_shared<ExprNode>();
  e->kind = ExprKind::kPow;
  e->index = n;
  e->a = std::move(a);
  return e;
}

int max_y_index(const Expr& e) {
  if (!e) return -1;
  if (e->kind == ExprKind::kY) return e->index;
  return std::max(max_y_index(e->a), max_y_index(e->b));
}

bool mentions_x(const Expr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::kX) return true;
  return mentions_x(e->a) || mentions_x(e->b);
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

// precedence: 0 sum, 1 product, 2 unary/power, 3 atom
void print_rec(std::ostream& os, const Expr& e, int parent_prec) {
  auto paren = [&](int prec, auto&& body) {
    if (prec < parent_prec) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (e->kind) {
    case ExprKind::kConst: {
      const bool neg = e->value < 0;
      paren(neg ? 0 : 3, [&] { os << e->value.str(); });
      break;
    }
    case ExprKind::kZ:
      os << "z";
      break;
    case ExprKind::kU:
      os << "u";
      break;
    case ExprKind::kX:
      os << "x";
      break;
    case ExprKind::kY:
      os << "y" << e->index;
      break;
    case ExprKind::kAdd:
      paren(0, [&] {
        print_rec(os, e->a, 0);
        os << " + ";
        print_rec(os, e->b, 1);
      });
      break;
    case ExprKind::kSub:
      paren(0, [&] {
        print_rec(os, e->a, 0);
        os << " - ";
        print_rec(os, e->b, 1);
      });
      break;
    case ExprKind::kNeg:
      paren(0, [&] {
        os << "-";
        print_rec(os, e->a, 2);
      });
      break;
    case ExprKind::kMul:
      paren(1, [&] {
        print_rec(os, e->a, 1);
        os << "*";
        print_rec(os, e->b, 2);
      });
      break;
    case ExprKind::kDiv:
      paren(1, [&] {
        print_rec(os, e->a, 1);
        os << "/";
        print_rec(os, e->b, 3);
      });
      break;
    case ExprKind::kPow:
      paren(2, [&] {
        print_rec(os, e->a, 3);
        os << "^" << e->index;
      });
      break;
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  print_rec(os, e, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

struct ExprLexer {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      advance();
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

  long integer() {
    skip_space();
    bool neg = false;
    if (pos < text.size() && text[pos] == '-') {
      neg = true;
      advance();
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw SyntaxError("expected a number", line, col);
    long v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      advance();
    }
    return neg ? -v : v;
  }
};

Expr parse_sum(ExprLexer& lx);

Expr parse_atom(ExprLexer& lx) {
  const char c = lx.peek();
  if (c == '(') {
    lx.advance();
    Expr e = parse_sum(lx);
    if (!lx.accept(')')) throw SyntaxError("expected ')'", lx.line, lx.col);
    return e;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    const long num = lx.integer();
    // a '/' directly after a literal is treated as division below, not here,
    // so rational constants are written as products: 3/2 parses as (3)/(2)
    // through the quotient rule and folds to the same value.
    return expr_const(Rational(num));
  }
  if (c == 'z') {
    lx.advance();
    return expr_z();
  }
  if (c == 'u') {
    lx.advance();
    return expr_u();
  }
  if (c == 'x') {
    lx.advance();
    return expr_x();
  }
  if (c == 'y') {
    lx.advance();
    if (!std::isdigit(static_cast<unsigned char>(lx.peek())))
      throw SyntaxError("expected an index after 'y'", lx.line, lx.col);
    return expr_y(int(lx.integer()));
  }
  throw SyntaxError(std::string("unexpected character '") + c + "'", lx.line, lx.col);
}

Expr parse_power(ExprLexer& lx) {
  Expr base = parse_atom(lx);
  if (lx.accept('^')) {
    const long e = lx.integer();
    return expr_pow(std::move(base), int(e));
  }
  return base;
}

Expr parse_product(ExprLexer& lx) {
  Expr out = parse_power(lx);
  while (true) {
    if (lx.accept('*')) {
      out = expr_mul(std::move(out), parse_power(lx));
    } else if (lx.accept('/')) {
      out = expr_div(std::move(out), parse_power(lx));
    } else {
      break;
    }
  }
  return out;
}

Expr parse_sum(ExprLexer& lx) {
  bool neg = lx.accept('-');
  if (!neg) lx.accept('+');
  Expr out = parse_product(lx);
  if (neg) out = expr_neg(std::move(out));
  while (true) {
    if (lx.accept('+')) {
      out = expr_add(std::move(out), parse_product(lx));
    } else if (lx.accept('-')) {
      out = expr_sub(std::move(out), parse_product(lx));
    } else {
      break;
    }
  }
  return out;
}

}  // namespace

Expr parse_expr(const std::string& text) {
  ExprLexer lx{text};
  Expr e = parse_sum(lx);
  lx.skip_space();
  if (lx.pos < text.size())
    throw SyntaxError("unexpected trailing input", lx.line, lx.col);
  return e;
}

// ---------------------------------------------------------------------------
// rational function conversion
// ---------------------------------------------------------------------------

std::array<std::string, kNumVars> expr_rf_names(int y_base) {
  std::array<std::string, kNumVars> names = {"z", "u", "x", "", "", "", "", ""};
  for (int s = 3; s < kNumVars; ++s) {
    if (s >= y_base)
      names[size_t(s)] = "y" + std::to_string(s - y_base);
    else
      names[size_t(s)] = kDefaultVarNames[size_t(s)];
  }
  return names;
}

RationalFunction expr_to_rf(const Expr& e, int y_base) {
  switch (e->kind) {
    case ExprKind::kConst:
      return RationalFunction(MultiPoly(e->value));
    case ExprKind::kZ:
      return RationalFunction::variable(VZ);
    case ExprKind::kU:
      return RationalFunction::variable(VU);
    case ExprKind::kX:
      return RationalFunction::variable(VX);
    case ExprKind::kY: {
      const int slot = y_base + e->index;
      if (slot >= kNumVars)
        throw Error("derivative order y" + std::to_string(e->index) +
                    " does not fit the variable table");
      return RationalFunction::variable(slot);
    }
    case ExprKind::kAdd:
      return expr_to_rf(e->a, y_base) + expr_to_rf(e->b, y_base);
    case ExprKind::kSub:
      return expr_to_rf(e->a, y_base) - expr_to_rf(e->b, y_base);
    case ExprKind::kNeg:
      return -expr_to_rf(e->a, y_base);
    case ExprKind::kMul:
      return expr_to_rf(e->a, y_base) * expr_to_rf(e->b, y_base);
    case ExprKind::kDiv:
      return expr_to_rf(e->a, y_base) / expr_to_rf(e->b, y_base);
    case ExprKind::kPow:
      return expr_to_rf(e->a, y_base).pow(e->index);
  }
  throw Error("unhandled expression node");
}

}  // namespace pdde
