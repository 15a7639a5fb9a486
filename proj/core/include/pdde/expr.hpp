#pragma once

#include <memory>
#include <string>

#include "pdde/multipoly.hpp"
#include "pdde/numeric.hpp"

namespace pdde {

enum class ExprKind { kConst, kZ, kU, kX, kY, kAdd, kSub, kNeg, kMul, kDiv, kPow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

// Immutable expression tree for the right side of a catalytic equation.
// y_j stands for the j-th discrete derivative of the unknown series.
struct ExprNode {
  ExprKind kind;
  Rational value;  // kConst
  int index = 0;   // kY: derivative order; kPow: exponent (may be negative)
  Expr a;
  Expr b;
};

Expr expr_const(const Rational& v);
Expr expr_z();
Expr expr_u();
Expr expr_x();
Expr expr_y(int j);
Expr expr_add(Expr a, Expr b);
Expr expr_sub(Expr a, Expr b);
Expr expr_neg(Expr a);
Expr expr_mul(Expr a, Expr b);
Expr expr_div(Expr a, Expr b);
Expr expr_pow(Expr a, int n);

// Highest y index appearing, or -1 if none.
int max_y_index(const Expr& e);
bool mentions_x(const Expr& e);

std::string print_expr(const Expr& e);

// Sums, products, quotients and integer powers of z, u, x, y0..y9, and
// rational literals.  '^' binds tighter than '*' and '/'.
Expr parse_expr(const std::string& text);

// Rational function form: z,u,x on their slots, y_j on slot y_base+j.
// Throws if a y index does not fit into the slot table.
RationalFunction expr_to_rf(const Expr& e, int y_base = 3);
std::array<std::string, kNumVars> expr_rf_names(int y_base = 3);

}  // namespace pdde
