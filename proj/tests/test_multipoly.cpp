#include "doctest.h"

#include <random>

#include "pdde/multipoly.hpp"

using namespace pdde;

namespace {

MultiPoly random_poly(std::mt19937& rng, std::initializer_list<int> vars,
                      int maxdeg, int nterms) {
  std::vector<MultiPoly::Term> terms;
  std::uniform_int_distribution<int> deg(0, maxdeg);
  std::uniform_int_distribution<int> num(-6, 6);
  for (int i = 0; i < nterms; ++i) {
    MultiPoly::Term t;
    t.c = Rational(num(rng));
    if (t.c == 0) t.c = 1;
    for (int v : vars) t.e[size_t(v)] = int16_t(deg(rng));
    terms.push_back(t);
  }
  return MultiPoly::from_terms(std::move(terms));
}

}  // namespace

TEST_CASE("multipoly construction and printing") {
  MultiPoly p = parse_poly("2*z^2*u - 3/2*t0 + 1");
  CHECK(p.degree(VZ) == 2);
  CHECK(p.degree(VU) == 1);
  CHECK(p.degree(VT0) == 1);
  CHECK(p.str() == "2*z^2*u - 3/2*t0 + 1");

  MultiPoly q = parse_poly("(z + u)*(z - u)");
  CHECK(q == parse_poly("z^2 - u^2"));

  CHECK_THROWS_AS(parse_poly("z + q"), UnknownVariable);
  CHECK_THROWS_AS(parse_poly("z + "), SyntaxError);
}

TEST_CASE("parse and print round trip") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    MultiPoly p = random_poly(rng, {VZ, VU, VX, VT0}, 4, 8);
    CHECK(parse_poly(p.str()) == p);
  }
}

TEST_CASE("ring identities") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    MultiPoly a = random_poly(rng, {VZ, VU, VT}, 3, 6);
    MultiPoly b = random_poly(rng, {VZ, VU, VT}, 3, 6);
    MultiPoly c = random_poly(rng, {VZ, VU, VT}, 3, 6);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == MultiPoly());
  }
}

TEST_CASE("derivative satisfies the product rule") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    MultiPoly a = random_poly(rng, {VZ, VU, VX}, 4, 6);
    MultiPoly b = random_poly(rng, {VZ, VU, VX}, 4, 6);
    for (int v : {VZ, VU, VX}) {
      CHECK((a * b).derivative(v) ==
            a.derivative(v) * b + a * b.derivative(v));
    }
  }
}

TEST_CASE("substitution matches evaluation") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    MultiPoly p = random_poly(rng, {VZ, VU, VT}, 4, 8);
    MultiPoly val = random_poly(rng, {VZ, VT}, 2, 3);
    MultiPoly sub = p.substitute(VU, val);

    std::array<Rational, kNumVars> pt{};
    std::uniform_int_distribution<int> small(-4, 4);
    for (auto& c : pt) c = Rational(small(rng), 3);
    auto pt2 = pt;
    pt2[VU] = val.eval<Rational>(pt);
    CHECK(sub.eval<Rational>(pt) == p.eval<Rational>(pt2));
  }
}

TEST_CASE("rename moves slots and rejects collisions") {
  MultiPoly p = parse_poly("z*u^2*T + u");
  std::pair<int, int> moves[] = {{VU, VA}, {VT, VB}};
  MultiPoly r = p.rename(moves);
  CHECK(r == parse_poly("z*A^2*B + A"));

  MultiPoly bad = parse_poly("u*A");
  std::pair<int, int> clash[] = {{VU, VA}};
  CHECK_THROWS_AS(bad.rename(clash), Error);

  // a swap is fine
  std::pair<int, int> swap_moves[] = {{VU, VT}, {VT, VU}};
  CHECK(parse_poly("u^2*T").rename(swap_moves) == parse_poly("T^2*u"));
}

TEST_CASE("exact division") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    MultiPoly a = random_poly(rng, {VZ, VU, VX}, 3, 5);
    MultiPoly b = random_poly(rng, {VZ, VU, VX}, 3, 5);
    if (b.is_zero()) continue;
    CHECK(exact_divide(a * b, b) == a);
  }
  CHECK_THROWS_AS(exact_divide(parse_poly("z^2 + u"), parse_poly("z + 1")),
                  NotDivisible);
  CHECK(divides(parse_poly("z + u"), parse_poly("z^2 - u^2")));
}

TEST_CASE("pseudo division identity") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 12; ++trial) {
    MultiPoly f = random_poly(rng, {VZ, VU, VT}, 4, 7);
    MultiPoly g = random_poly(rng, {VZ, VU, VT}, 3, 4);
    if (g.degree(VU) < 1) continue;
    MultiPoly q;
    MultiPoly r;
    pseudo_divide(f, g, VU, &q, &r);
    const int e = std::max(f.degree(VU) - g.degree(VU) + 1, 0);
    CHECK(g.leading_coeff(VU).pow(e) * f == q * g + r);
    CHECK(r.degree(VU) < g.degree(VU));
  }
}

TEST_CASE("gcd recovers planted common factors") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 8; ++trial) {
    MultiPoly h = random_poly(rng, {VZ, VU}, 2, 3);
    if (h.is_constant()) continue;
    MultiPoly a = random_poly(rng, {VZ, VU}, 2, 3);
    MultiPoly b = random_poly(rng, {VZ, VU}, 2, 3);
    MultiPoly g = gcd(a * h, b * h);
    CHECK(divides(h.integer_primitive(), g * MultiPoly(Rational(1))));
  }
  CHECK(gcd(parse_poly("z^2 - u^2"), parse_poly("z^2 + 2*z*u + u^2")) ==
        parse_poly("z + u"));
}

TEST_CASE("resultant agrees with the sylvester determinant") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    MultiPoly f = random_poly(rng, {VZ, VU, VT}, 3, 5);
    MultiPoly g = random_poly(rng, {VZ, VU, VT}, 3, 5);
    if (f.degree(VU) < 1 || g.degree(VU) < 1) continue;
    CHECK(resultant(f, g, VU) == resultant_sylvester(f, g, VU));
  }
}

TEST_CASE("resultant facts") {
  // res_u(a*u + b, c*u + d) = a*d - b*c
  MultiPoly f = parse_poly("z*u + x");
  MultiPoly g = parse_poly("t0*u + t1");
  CHECK(resultant(f, g, VU) == parse_poly("z*t1 - x*t0"));

  // common factor forces a zero resultant
  MultiPoly h = parse_poly("u - z");
  CHECK(resultant(h * f, h * g, VU).is_zero());

  // the resultant vanishes exactly at parameter values with a common root
  MultiPoly a = parse_poly("u^2 - z");
  MultiPoly b = parse_poly("u - 3");
  MultiPoly r = resultant(a, b, VU);
  CHECK(r == parse_poly("9 - z"));
}

TEST_CASE("squarefree part drops multiplicities") {
  MultiPoly p = parse_poly("u - z");
  MultiPoly q = parse_poly("u + 1");
  MultiPoly s = squarefree_part(p * p * p * q, VU);
  CHECK(s == (p * q).integer_primitive());
}

TEST_CASE("integer primitive normalization") {
  MultiPoly p = parse_poly("4/3*z^2 - 2/3*u");
  Rational scale;
  MultiPoly q = p.integer_primitive(&scale);
  CHECK(q == parse_poly("2*z^2 - u"));
  CHECK(q == p.scaled(scale));

  MultiPoly neg = parse_poly("0 - 2*z");
  CHECK(neg.integer_primitive() == parse_poly("z"));
}

TEST_CASE("rational functions reduce and normalize") {
  RationalFunction r(parse_poly("z^2 - u^2"), parse_poly("z + u"));
  CHECK(r.is_polynomial());
  CHECK(r.num() == parse_poly("z - u"));

  RationalFunction a(parse_poly("u"), parse_poly("z"));
  RationalFunction b(parse_poly("1"), parse_poly("z"));
  RationalFunction s = a + b;
  CHECK(s == RationalFunction(parse_poly("u + 1"), parse_poly("z")));

  RationalFunction prod = a * b;
  CHECK(prod == RationalFunction(parse_poly("u"), parse_poly("z^2")));

  // quotient rule
  RationalFunction d = a.derivative(VZ);
  CHECK(d == RationalFunction(parse_poly("0 - u"), parse_poly("z^2")));

  CHECK_THROWS_AS(RationalFunction(parse_poly("1"), MultiPoly()), ZeroDenominator);
}

TEST_CASE("rational function substitution") {
  // f(u) = (u^2 + z) / u evaluated at u = 1/z
  RationalFunction f(parse_poly("u^2 + z"), parse_poly("u"));
  RationalFunction inv_z(parse_poly("1"), parse_poly("z"));
  RationalFunction g = f.substitute(VU, inv_z);
  CHECK(g == RationalFunction(parse_poly("1 + z^3"), parse_poly("z")));
}
