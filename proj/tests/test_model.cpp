#include <string>

#include "doctest.h"
#include "pdde/model.hpp"
#include "pdde/multipoly.hpp"

using namespace pdde;

TEST_CASE("builtin models parse and round trip") {
  for (const std::string& name : builtin_model_names()) {
    const Model& m = builtin_model(name);
    CHECK(m.name == name);
    const Model back = parse_model(print_model(m));
    CHECK(print_model(back) == print_model(m));
  }
  CHECK_THROWS_AS(builtin_model("nope"), Error);
}

TEST_CASE("right side of the worked quadratic model") {
  const Model& m = builtin_model("example2");
  CHECK(m.order == 2);
  CHECK(m.perturbation == Perturbation::kX);
  CHECK(unperturbed_x(m) == Rational(0));

  // z*Q + x*z*R with Q = 1/z + z*u*y0^2 + y1 and R = y2.
  const RationalFunction z = RationalFunction::variable(VZ);
  const RationalFunction u = RationalFunction::variable(VU);
  const RationalFunction x = RationalFunction::variable(VX);
  const RationalFunction y0 = RationalFunction::variable(3);
  const RationalFunction y1 = RationalFunction::variable(4);
  const RationalFunction y2 = RationalFunction::variable(5);
  const RationalFunction one = RationalFunction::from_rational(Rational(1));
  CHECK(expr_to_rf(rhs_expr(m)) ==
        one + z * z * u * y0 * y0 + z * y1 + x * z * y2);
}

TEST_CASE("map model basics") {
  const Model& m = builtin_model("diamond");
  CHECK(m.order == 2);
  CHECK(m.perturbation == Perturbation::kXMinus1);
  CHECK(unperturbed_x(m) == Rational(1));
  CHECK(max_y_index(m.r) == 2);
  CHECK(!mentions_x(m.q));
}

TEST_CASE("model validation rejects malformed input") {
  // Q reading a second derivative.
  CHECK_THROWS_AS(parse_model("order = 2; Q = 1/z + y2;"), Error);
  // Q depending on x.
  CHECK_THROWS_AS(parse_model("order = 2; Q = x/z;"), Error);
  // R present but not reading the declared top derivative.
  CHECK_THROWS_AS(
      parse_model("order = 3; perturbation = x; Q = 1/z; R = y2;"), Error);
  // perturbed model of order one
  CHECK_THROWS_AS(
      parse_model("order = 1; perturbation = x; Q = 1/z; R = y1;"), Error);
  // unsupported perturbation shape
  CHECK_THROWS_AS(
      parse_model("order = 2; perturbation = x^2; Q = 1/z; R = y2;"), Error);
  CHECK_THROWS_AS(parse_model("order = 2;"), Error);
  CHECK_THROWS_AS(parse_model("Q = 1/z;"), Error);
  CHECK_THROWS_AS(parse_model("order = 2; order = 3; Q = 1/z;"), Error);
  CHECK_THROWS_AS(parse_model("order = 2; Q = 1/z; what = 3;"), Error);
  CHECK_THROWS_AS(parse_model("order = two; Q = 1/z;"), Error);
  // comments and layout are fine
  const Model m = parse_model(
      "# a plain unperturbed model\n"
      "order = 2;  # with a trailing comment\n"
      "Q = 1/z + y1;\n");
  CHECK(m.order == 2);
  CHECK(!m.r);
}

TEST_CASE("theorem hypotheses hold for the builtin models") {
  for (const std::string& name : builtin_model_names()) {
    const AssumptionReport rep = check_assumptions(builtin_model(name));
    INFO(name << "\n" << rep.summary());
    CHECK(rep.all_pass());
  }
}

TEST_CASE("hypothesis checks notice violations") {
  // A negative coefficient in Q.
  const Model bad = parse_model("order = 2; Q = 1/z - u*y0 + y1;");
  CHECK(check_assumptions(bad).q_nonnegative == Tri::kFail);

  // A one-way coefficient dependency: u*y0 only ever moves weight upward,
  // so the graph has no edges back down.
  const Model chain = parse_model("order = 2; Q = 1/z + u*y0;");
  CHECK(!dependency_graph(chain).strongly_connected);
  CHECK(!check_assumptions(chain).all_pass());
}

TEST_CASE("dependency graph is strongly connected for builtins") {
  for (const std::string& name : builtin_model_names()) {
    const DependencyGraph g = dependency_graph(builtin_model(name));
    CHECK(g.bound == 12);
    CHECK(g.strongly_connected);
  }
}
