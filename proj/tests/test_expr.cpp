#include <string>

#include "doctest.h"
#include "pdde/expr.hpp"
#include "pdde/multipoly.hpp"

using namespace pdde;

TEST_CASE("expression parse and print round trip") {
  for (const char* text : {
           "1/z + z*u*y0^2 + y1",
           "(z^9/u^2) * (u^3/z + z*u^2*y2)",
           "y0^2/(1 - u*y0)",
           "-z + 2*x - 1/2",
           "(1 - u*y0)^2",
           "z*u^2*y0^3/(1 - u*y0)^2",
       }) {
    const Expr e = parse_expr(text);
    const Expr back = parse_expr(print_expr(e));
    CHECK(expr_to_rf(back) == expr_to_rf(e));
  }
}

TEST_CASE("expression to rational function") {
  const RationalFunction z = RationalFunction::variable(VZ);
  const RationalFunction u = RationalFunction::variable(VU);
  const RationalFunction y0 = RationalFunction::variable(3);
  const RationalFunction y1 = RationalFunction::variable(4);
  const RationalFunction one = RationalFunction::from_rational(Rational(1));

  CHECK(expr_to_rf(parse_expr("z^9/u^2")) == z.pow(9) / u.pow(2));
  CHECK(expr_to_rf(parse_expr("y0^2/(1 - u*y0)")) ==
        y0.pow(2) / (one - u * y0));
  CHECK(expr_to_rf(parse_expr("1 - u*y0^2")) == one - u * y0.pow(2));
  CHECK(expr_to_rf(parse_expr("z - u - x")) ==
        z - u - RationalFunction::variable(VX));
  CHECK(expr_to_rf(parse_expr("6/2/3")) == one);
  CHECK(expr_to_rf(parse_expr("2^3")) ==
        RationalFunction::from_rational(Rational(8)));
  CHECK(expr_to_rf(parse_expr("1/z + y1")) == one / z + y1);
}

TEST_CASE("expression metadata") {
  CHECK(max_y_index(parse_expr("z + u")) == -1);
  CHECK(max_y_index(parse_expr("y0 + z*y3")) == 3);
  CHECK(mentions_x(parse_expr("z*x")));
  CHECK(!mentions_x(parse_expr("z*u*y1")));
}

TEST_CASE("expression syntax errors carry a position") {
  CHECK_THROWS_AS(parse_expr("z + + u"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("z + w"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("(z + u"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("z u"), SyntaxError);
  CHECK_THROWS_AS(parse_expr(""), SyntaxError);
  CHECK_THROWS_AS(parse_expr("y"), SyntaxError);
  try {
    parse_expr("z +\n* u");
    CHECK(false);
  } catch (const SyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 1);
  }
}
