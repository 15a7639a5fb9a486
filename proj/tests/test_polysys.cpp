#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pdde/polysys.hpp"
#include "pdde/solver.hpp"

using namespace pdde;

namespace {

using RS = TruncatedSeries<Rational>;
using CP = CoeffPoly<Rational>;

MultiPoly load_fixture(const std::string& name) {
  std::ifstream in(std::string(PDDE_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return poly_from_text(buf.str());
}

std::array<Rational, kNumVars> random_point(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-7, 7);
  std::uniform_int_distribution<int> den(1, 4);
  std::array<Rational, kNumVars> pt;
  for (auto& v : pt) {
    int n = num(rng);
    if (n == 0) n = 3;
    v = Rational(n, den(rng));
  }
  return pt;
}

// zero through the whole checked window, which must cover at least z^need
bool series_vanishes(const RS& s, int need) {
  return s.known_order() >= need && s.stored_is_zero();
}

RS solve_section(const Model& m, int zmax, int xcap, int du) {
  SolveOptions so;
  so.zmax = zmax;
  so.xmode = XMode::kSymbolic;
  so.xcap = xcap;
  SeriesSolver<Rational> solver(m, so);
  solver.extend(zmax);
  return section_row(solver.coefficients(), du, zmax);
}

}  // namespace

TEST_CASE("clearing the worked model gives the expected polynomial pair") {
  const Model& m = builtin_model("example2");

  const Polynomialization p = polynomialize(m);
  CHECK(p.poly ==
        parse_poly("u^2 + z^2*u^3*T^2 + z*u*(T - t0) + z*x*(T - t0 - u*t1) "
                   "- u^2*T"));
  CHECK(p.multiplier == MultiPoly::variable(VU, 2));
  CHECK(p.order == 2);
  CHECK(p.monomial_clearing);

  const Polynomialization q = polynomialize_unperturbed(m);
  CHECK(q.poly == parse_poly("u + z^2*u^2*T^2 + z*(T - t0) - u*T"));
  CHECK(q.multiplier == MultiPoly::variable(VU));
  CHECK(q.order == 1);

  // the perturbed polynomial is the unperturbed one plus the wing
  CHECK(p.poly == MultiPoly::variable(VU) * q.poly +
                      parse_poly("z*x*(T - t0 - u*t1)"));
}

TEST_CASE("clearing satisfies poly = multiplier * (rhs - T) at random points") {
  std::mt19937 rng(2024);
  for (const char* name : {"example2", "diamond"}) {
    const Model& m = builtin_model(name);
    const RationalFunction rhs = model_rhs_rf(m);
    const Polynomialization p = polynomialize(m);
    int done = 0;
    while (done < 5) {
      const auto pt = random_point(rng);
      const Rational den = rhs.den().eval(pt);
      if (den.is_zero()) continue;
      const Rational lhs = p.poly.eval(pt) * den;
      const Rational rhs_val =
          p.multiplier.eval(pt) * (rhs.num().eval(pt) - pt[VT] * den);
      CHECK(lhs == rhs_val);
      ++done;
    }
  }
}

TEST_CASE("non-monomial clearing is refused only on request") {
  const Model& m = builtin_model("diamond");
  const Polynomialization p = polynomialize(m);
  CHECK(!p.monomial_clearing);
  CHECK(p.multiplier.terms().size() > 1);
  CHECK_THROWS_AS(polynomialize(m, true), DenominatorNotMonomial);
  CHECK_NOTHROW(polynomialize(builtin_model("example2"), true));
}

TEST_CASE("the two branch system is the critical triple plus a renamed copy") {
  const Model& m = builtin_model("example2");
  const auto triple = critical_triple(m);
  CHECK(triple.size() == 3);
  CHECK(triple[1] == triple[0].derivative(VU));
  CHECK(triple[2] == triple[0].derivative(VT));

  const auto sys = two_branch_system(m);
  REQUIRE(sys.size() == 6);
  const std::pair<int, int> moves[] = {{VU, VA}, {VT, VB}};
  for (size_t i = 0; i < 3; ++i) CHECK(sys[i + 3] == sys[i].rename(moves));
}

TEST_CASE("rescaling strips perturbation powers two, one, one") {
  for (const char* name : {"example2", "diamond"}) {
    const Model& m = builtin_model(name);
    const MultiPoly eps = m.perturbation == Perturbation::kX
                              ? MultiPoly::variable(VX)
                              : MultiPoly::variable(VX) - MultiPoly(1L);
    const MultiPoly u_sub = eps * MultiPoly::variable(VA);
    const MultiPoly t_sub =
        MultiPoly::variable(VT0) + eps * MultiPoly::variable(VB);
    const auto triple = critical_triple(m);
    const auto scaled = rescaled_system(m);
    REQUIRE(scaled.size() == 3);
    const int strip[3] = {2, 1, 1};
    for (size_t i = 0; i < 3; ++i) {
      const MultiPoly direct =
          triple[i].substitute(VU, u_sub).substitute(VT, t_sub);
      CHECK(scaled[i] * eps.pow(strip[i]) == direct);
    }
  }
}

TEST_CASE("the rescaled system solves in closed form at the critical x") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> num(1, 9);
  const Model& m = builtin_model("example2");
  const auto sys = rescaled_system(m);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<Rational, kNumVars> pt{};
    pt[VZ] = Rational(num(rng), 10);
    pt[VT0] = Rational(10 + num(rng), 10);
    pt[VX] = Rational(0);
    pt[VA] = Rational(-1);
    pt[VB] = (Rational(1) - pt[VT0]) / pt[VZ];
    pt[VT1] = -pt[VB];
    for (const MultiPoly& f : sys) CHECK(f.eval(pt) == 0);
  }

  // The closed forms assume the perturbation wing enters with a unit
  // coefficient on its top derivative.  The triangulation model carries a
  // z^9/u^2 prefactor instead, so its limit branch sits at V = -z^10 and
  // the universal point must miss.
  const Model& d = builtin_model("diamond");
  const auto dsys = rescaled_system(d);
  CHECK(dsys[2].substitute(VX, Rational(1)) == parse_poly("z^11 + z*A"));
  std::array<Rational, kNumVars> pt{};
  pt[VZ] = Rational(3, 10);
  pt[VT0] = Rational(13, 10);
  pt[VX] = Rational(1);
  pt[VA] = Rational(-1);
  pt[VB] = (Rational(1) - pt[VT0]) / pt[VZ];
  pt[VT1] = -pt[VB];
  CHECK(dsys[2].eval(pt) != 0);
  CHECK_THROWS_AS(branch2_series(d, 12, 2), Error);
}

TEST_CASE("the rescaled jacobian determinant is -z^3 at the closed form") {
  const Model& m = builtin_model("example2");
  const auto jac = rescaled_jacobian(m);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> num(1, 9);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<Rational, kNumVars> pt{};
    pt[VZ] = Rational(num(rng), 10);
    pt[VT0] = Rational(10 + num(rng), 10);
    pt[VX] = Rational(0);
    pt[VA] = Rational(-1);
    pt[VB] = (Rational(1) - pt[VT0]) / pt[VZ];
    pt[VT1] = -pt[VB];
    std::array<std::array<Rational, 3>, 3> j;
    for (size_t r = 0; r < 3; ++r)
      for (size_t c = 0; c < 3; ++c) j[r][c] = jac[r][c].eval(pt);
    const Rational det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    CHECK(det == -pt[VZ] * pt[VZ] * pt[VZ]);
  }
}

TEST_CASE("resultant convention on the reference cases") {
  const MultiPoly y = MultiPoly::variable(VT);
  const MultiPoly a = MultiPoly::variable(VA);
  const MultiPoly b = MultiPoly::variable(VB);
  const MultiPoly z = MultiPoly::variable(VZ);
  CHECK(resultant(y - a, y - b, VT) == a - b);
  CHECK(resultant(y * y - z, y - MultiPoly(1L), VT) == MultiPoly(1L) - z);

  std::mt19937 rng(31);
  std::uniform_int_distribution<int> cf(-4, 4);
  auto rand_poly = [&](int deg) {
    MultiPoly p;
    for (int e = 0; e <= deg; ++e) {
      const int c = cf(rng);
      if (c == 0) continue;
      Exps ex{};
      ex[VT] = int16_t(e);
      ex[VZ] = int16_t(deg - e);
      p += MultiPoly::monomial(Rational(c), ex);
    }
    if (p.degree(VT) < deg) p += MultiPoly::variable(VT, deg);
    return p;
  };
  for (int trial = 0; trial < 6; ++trial) {
    const MultiPoly p = rand_poly(3), q = rand_poly(2), r = rand_poly(2);
    CHECK(resultant(p, q * r, VT) == resultant(p, q, VT) * resultant(p, r, VT));
    const int sign = (p.degree(VT) * q.degree(VT)) % 2 == 0 ? 1 : -1;
    CHECK(resultant(q, p, VT) == resultant(p, q, VT).scaled(Rational(sign)));
  }
}

TEST_CASE("elimination solves a toy system and reports collapse") {
  const MultiPoly t = MultiPoly::variable(VT);
  const MultiPoly z = MultiPoly::variable(VZ);
  const MultiPoly u = MultiPoly::variable(VU);

  const Annihilator out = eliminate({t - z, t - u}, {VZ, VU}, VZ);
  CHECK(out.poly == z - u);
  CHECK(!out.provenance.empty());

  CHECK_THROWS_AS(eliminate({t, t}, {VZ}, VZ), EliminationCollapse);
  CHECK_THROWS_AS(eliminate({t - z, z * t - MultiPoly(1L)}, {VU}, VU),
                  EliminationCollapse);
}

TEST_CASE("branch pair is linear in the sections with a monomial determinant") {
  const Model& m = builtin_model("example2");
  const auto triple = critical_triple(m);
  const MultiPoly fa = resultant(triple[0], triple[2], VT);
  const MultiPoly fb = resultant(triple[1], triple[2], VT);
  for (const MultiPoly* f : {&fa, &fb}) {
    CHECK(f->degree(VT0) == 1);
    CHECK(f->degree(VT1) == 1);
    CHECK(!f->coeff_of(VT0, 1).depends_on(VT1));
  }
  const MultiPoly delta = fa.coeff_of(VT0, 1) * fb.coeff_of(VT1, 1) -
                          fa.coeff_of(VT1, 1) * fb.coeff_of(VT0, 1);
  CHECK(delta == parse_poly("16*z^10*u^12*x^2"));
}

TEST_CASE("printed reference equations specialize correctly at the critical x") {
  const MultiPoly fix_u = load_fixture("u_equation.txt");
  CHECK(fix_u.degree(VU) == 10);
  CHECK(fix_u.substitute(VX, Rational(0)) ==
        parse_poly("2*u^8*z^3 - u^6*z^2 + u^5*z^3"));
  CHECK(fix_u.substitute(VX, Rational(0)) ==
        parse_poly("u^5*z^2*(2*u^3*z - u + z)"));

  const MultiPoly fix_t0 = load_fixture("t0_equation.txt");
  CHECK(fix_t0.degree(VT0) == 5);
  CHECK(fix_t0.substitute(VX, Rational(0)) ==
        parse_poly("z^2*(16*t0^3*z^6 + (8*t0^2 - 36*t0 + 27)*z^3 + t0 - 1)"));
}

TEST_CASE("solved sections satisfy the closed-form relation at the critical x") {
  const int zmax = 24;
  const RS t0 = solve_section(builtin_model("example2"), zmax, 4, 0);
  const RS t1 = solve_section(builtin_model("example2"), zmax, 4, 1);
  CHECK(t0.at(0).coeff(0, 0) == 1);
  CHECK(t0.at(3).coeff(0, 0) == 1);
  CHECK(t0.at(6).coeff(0, 0) == 4);

  // t1 = (t0 - 1)/z where the perturbation vanishes
  const SeriesCtx ctx{Caps{0, 0}, zmax};
  std::vector<CP> t0c, t1c;
  for (int n = 0; n <= zmax; ++n) {
    t0c.push_back(CP::constant(t0.at(n).coeff(0, 0)));
    t1c.push_back(CP::constant(t1.at(n).coeff(0, 0)));
  }
  const RS t0_bare = RS::from_coeffs(t0c, 0, zmax);
  const RS t1_bare = RS::from_coeffs(t1c, 0, zmax);
  const RS one = RS::constant(CP::from_rational(Rational(1)));
  const RS diff = RS::mul(t1_bare, RS::z_power(1), ctx) - (t0_bare - one);
  CHECK(series_vanishes(diff, zmax - 1));
}

TEST_CASE("unperturbed branch point satisfies its algebraic equation") {
  const int zmax = 40;
  const auto [s, tt] = unperturbed_branch(builtin_model("example2"), zmax);
  CHECK(s.at(1).coeff(0, 0) == 1);
  CHECK(s.at(0).coeff(0, 0) == 0);

  const SeriesCtx ctx{Caps{0, 0}, zmax};
  std::array<RS, kNumVars> pt;
  pt[VZ] = RS::z_power(1);
  pt[VU] = s;
  const RS kernel = eval_poly_series(parse_poly("2*u^3*z - u + z"), pt, ctx);
  CHECK(series_vanishes(kernel, zmax - 4));

  // the lift solves the derivative pair; the curve equation itself must
  // come out for free
  const Model& m = builtin_model("example2");
  SolveOptions so;
  so.zmax = zmax;
  so.xmode = XMode::kNumeric;
  so.x_value = Rational(0);
  SeriesSolver<Rational> solver(m, so);
  solver.extend(zmax);
  std::array<RS, kNumVars> full;
  full[VZ] = RS::z_power(1);
  full[VU] = s;
  full[VT] = tt;
  full[VT0] = section_row(solver.coefficients(), 0, zmax);
  const RS residual =
      eval_poly_series(polynomialize_unperturbed(m).poly, full, ctx);
  CHECK(series_vanishes(residual, zmax - 4));
}

TEST_CASE("verify_annihilator reports the first failing order") {
  RS s = RS::from_coeffs({CP::from_rational(Rational(1)),
                          CP::from_rational(Rational(1)),
                          CP::from_rational(Rational(1))},
                         0, 20);
  const SeriesCtx ctx{Caps{0, 2}, 20};
  Annihilator good{VT0, parse_poly("t0 - 1 - z - z^2"), {}};
  CHECK(verify_annihilator(good, s, ctx) == 21);
  Annihilator bad{VT0, parse_poly("t0 - 1 - z"), {}};
  CHECK(verify_annihilator(bad, s, ctx) == 2);
  Annihilator wrong{VT0, parse_poly("t0 + u"), {}};
  CHECK_THROWS_AS(verify_annihilator(wrong, s, ctx), Error);
}

TEST_CASE("text form round trips") {
  CHECK(poly_to_text(MultiPoly()) == "0");
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> cf(-9, 9);
  std::uniform_int_distribution<int> ex(0, 4);
  for (int trial = 0; trial < 10; ++trial) {
    MultiPoly p;
    for (int t = 0; t < 6; ++t) {
      Exps e{};
      e[VZ] = int16_t(ex(rng));
      e[VU] = int16_t(ex(rng));
      e[VX] = int16_t(ex(rng));
      e[VT0] = int16_t(ex(rng));
      const int c = cf(rng);
      if (c != 0) p += MultiPoly::monomial(Rational(c), e);
    }
    CHECK(poly_from_text(poly_to_text(p)) == p);
  }
}

// The end-to-end check: derive both annihilators by elimination, then pin
// them against the solved series, the lifted branches, and the printed
// reference equations.
TEST_CASE("derived annihilators agree with solved series and branches") {
  const Model& m = builtin_model("example2");
  const auto [au, at0] = critical_annihilators(m);
  CHECK(au.target == VU);
  CHECK(at0.target == VT0);
  CHECK(!au.provenance.empty());
  CHECK(!at0.provenance.empty());

  const int zmax = 48, xcap = 8, need = 31;
  const SeriesCtx ctx{Caps{0, xcap}, zmax};

  const RS t0 = solve_section(m, zmax, xcap, 0);
  CHECK(verify_annihilator(at0, t0, ctx) >= need);

  // branch two divides by a deeper power of z per lift pass, so it needs a
  // wider solve window to certify the same residual order
  const BranchSeries b1 = branch1_series(m, zmax, xcap);
  const BranchSeries b2 = branch2_series(m, 60, xcap);
  CHECK(verify_annihilator(au, b1.u, b1.x_bind, ctx) >= need);
  CHECK(verify_annihilator(au, b2.u, b2.x_bind, ctx) >= need);

  // the printed reference equations annihilate the same objects
  const Annihilator fix_u{VU, load_fixture("u_equation.txt"), {}};
  const Annihilator fix_t0{VT0, load_fixture("t0_equation.txt"), {}};
  CHECK(verify_annihilator(fix_u, b1.u, b1.x_bind, ctx) >= need);
  CHECK(verify_annihilator(fix_u, b2.u, b2.x_bind, ctx) >= need);
  CHECK(verify_annihilator(fix_t0, t0, ctx) >= need);

  // report, without failing, any shape difference against the printed forms
  if (au.poly != fix_u.poly) {
    const bool related =
        divides(au.poly, fix_u.poly) || divides(fix_u.poly, au.poly);
    WARN_MESSAGE(related,
                 "derived u-annihilator differs from the printed equation: ["
                     << poly_to_text(au.poly) << "] vs ["
                     << poly_to_text(fix_u.poly) << "]");
  }
  if (at0.poly != fix_t0.poly) {
    const bool related =
        divides(at0.poly, fix_t0.poly) || divides(fix_t0.poly, at0.poly);
    WARN_MESSAGE(related,
                 "derived t0-annihilator differs from the printed equation: ["
                     << poly_to_text(at0.poly) << "] vs ["
                     << poly_to_text(fix_t0.poly) << "]");
  }

  // branch structure: u2 starts at -x = -z*y, both branches satisfy the
  // full equation, and branch two recovers the t1 section it was not given
  CHECK(b2.u.at(1).coeff(0, 1) == -1);
  const auto triple = critical_triple(m);
  std::array<RS, kNumVars> pt;
  pt[VZ] = RS::z_power(1);
  pt[VX] = b1.x_bind;
  pt[VT0] = b1.t0;
  pt[VT1] = b1.t1;
  pt[VU] = b1.u;
  pt[VT] = b1.t;
  CHECK(series_vanishes(eval_poly_series(triple[0], pt, ctx), need));
  pt[VX] = b2.x_bind;
  pt[VT0] = b2.t0;
  pt[VT1] = b2.t1;
  pt[VU] = b2.u;
  pt[VT] = b2.t;
  CHECK(series_vanishes(eval_poly_series(triple[0], pt, ctx), need));

  const RS t1_diff = b2.t1 - b1.t1;
  CHECK(series_vanishes(t1_diff, need));
}
