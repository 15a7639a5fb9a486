#include "doctest.h"

#include <random>

#include "pdde/coeffpoly.hpp"

using namespace pdde;

namespace {

using CP = CoeffPoly<Rational>;

CP random_poly(std::mt19937& rng, int maxdu, int maxdx, int nterms) {
  CP p;
  std::uniform_int_distribution<int> du(0, maxdu);
  std::uniform_int_distribution<int> dx(0, maxdx);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  for (int i = 0; i < nterms; ++i)
    p.add_term(du(rng), dx(rng), Rational(num(rng), den(rng)));
  return p;
}

const Caps kWide{64, 64};

}  // namespace

TEST_CASE("coeffpoly basic arithmetic") {
  CP a = CP::monomial(Rational(2), 1, 0);
  CP b = CP::monomial(Rational(3), 0, 1);
  CP s = a + b;
  CHECK(s.coeff(1, 0) == Rational(2));
  CHECK(s.coeff(0, 1) == Rational(3));
  CHECK((s - s).is_zero());

  CP p = CP::mul(s, s, kWide);
  CHECK(p.coeff(2, 0) == Rational(4));
  CHECK(p.coeff(1, 1) == Rational(12));
  CHECK(p.coeff(0, 2) == Rational(9));
}

TEST_CASE("coeffpoly ring identities on random inputs") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    CP a = random_poly(rng, 5, 3, 6);
    CP b = random_poly(rng, 5, 3, 6);
    CP c = random_poly(rng, 5, 3, 6);
    CHECK(CP::mul(a, b, kWide) == CP::mul(b, a, kWide));
    CHECK(CP::mul(CP::mul(a, b, kWide), c, kWide) ==
          CP::mul(a, CP::mul(b, c, kWide), kWide));
    CHECK(CP::mul(a, b + c, kWide) == CP::mul(a, b, kWide) + CP::mul(a, c, kWide));
  }
}

TEST_CASE("caps discard high degrees during multiplication") {
  CP a = CP::monomial(Rational(1), 3, 0) + CP::monomial(Rational(1), 0, 2);
  Caps caps{3, 2};
  CP p = CP::mul(a, a, caps);
  CHECK(p.coeff(6, 0) == Rational(0));
  CHECK(p.coeff(0, 4) == Rational(0));
  CHECK(p.coeff(3, 2) == Rational(2));
  CHECK(p.degree_u() <= 3);
  CHECK(p.degree_x() <= 2);

  // A capped product equals the truncation of the full product.
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    CP f = random_poly(rng, 8, 5, 10);
    CP g = random_poly(rng, 8, 5, 10);
    CP full = CP::mul(f, g, kWide).truncated(caps);
    CHECK(CP::mul(f, g, caps) == full);
  }
}

TEST_CASE("discrete delta splits off the constant slice") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    CP f = random_poly(rng, 6, 4, 12);
    // f == u * delta(f) + f(u=0)
    CP rebuilt = CP::mul(CP::monomial(Rational(1), 1, 0), f.discrete_delta(), kWide) +
                 f.at_u0();
    CHECK(rebuilt == f);
  }
}

TEST_CASE("monomial shifts") {
  CP f = CP::monomial(Rational(5), 2, 1) + CP::monomial(Rational(-3), 4, 0);
  CP up = f.mono_shift(2, 0, kWide);
  CHECK(up.coeff(4, 1) == Rational(5));
  CP back = up.mono_shift(-2, 0, kWide);
  CHECK(back == f);
  CHECK_THROWS_AS(f.mono_shift(-3, 0, kWide), NotDivisible);
  CHECK_THROWS_AS(f.mono_shift(0, -1, kWide), NotDivisible);
}

TEST_CASE("series inverse in u and x") {
  std::mt19937 rng(42);
  Caps caps{8, 4};
  for (int trial = 0; trial < 10; ++trial) {
    CP f = random_poly(rng, 4, 2, 8);
    // force an invertible constant term
    f.add_term(0, 0, Rational(1) - f.coeff(0, 0));
    CP inv = f.inverse(caps);
    CP prod = CP::mul(f, inv, caps);
    CHECK(prod == CP::constant(Rational(1)));
  }

  CP noconst = CP::monomial(Rational(1), 1, 0);
  CHECK_THROWS_AS(noconst.inverse(caps), NonInvertibleSeries);
}

TEST_CASE("evaluation agrees with term sum") {
  CP f = CP::monomial(Rational(2), 2, 1) + CP::monomial(Rational(-1, 3), 0, 2) +
         CP::constant(Rational(7));
  Rational u(1, 2);
  Rational x(3);
  Rational expect = Rational(2) * u * u * x - Rational(1, 3) * x * x + 7;
  CHECK(f.eval<Rational>(u, x) == expect);

  BigFloat bu = to_bigfloat(u);
  BigFloat bx = to_bigfloat(x);
  BigFloat diff = f.eval<BigFloat>(bu, bx) - to_bigfloat(expect);
  CHECK(abs(diff) < BigFloat("1e-60"));
}

TEST_CASE("bigfloat conversion keeps exact dyadics") {
  CP f = CP::monomial(Rational(3, 4), 1, 1);
  auto g = f.convert<BigFloat>();
  CHECK(g.coeff(1, 1) == BigFloat("0.75"));
}
