#pragma once

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pdde/model.hpp"
#include "pdde/multipoly.hpp"
#include "pdde/series.hpp"

namespace pdde {

// ---------------------------------------------------------------------------
// Polynomial clearing of a model equation.
//
// The solution series T(z,u,x) of a model satisfies rhs(T) - T = 0 where the
// discrete derivatives contribute denominators u^j.  Multiplying by u^order
// and by whatever polynomial denominator remains turns this into a polynomial
// identity in the slots (z, u, x, T, t0, t1), with t_j standing for the j-th
// u-section of the solution.  poly vanishes on the solution sheet and
// poly == multiplier * (rhs - T) as rational functions.
// ---------------------------------------------------------------------------
struct Polynomialization {
  MultiPoly poly;
  MultiPoly multiplier;
  bool monomial_clearing = true;
  int order = 0;  // how many u-sections appear (t0 .. t_{order-1})
};

// The discrete derivatives substituted as y_j = (T - t0 - ... ) / u^j demand
// order <= 2 so the sections fit the slot table.  With require_monomial_clearing
// set, a model whose cleared denominator is not a monomial (for instance a
// kernel factor like 1 - u*T) throws DenominatorNotMonomial instead of
// recording the full multiplier.
Polynomialization polynomialize(const Model& m, bool require_monomial_clearing = false);

// Same clearing with the perturbation frozen at its neutral value and the
// perturbation wing dropped; the order is the one of the unperturbed equation.
Polynomialization polynomialize_unperturbed(const Model& m);

// The model right-hand side with discrete derivatives substituted, as a
// rational function in (z, u, x, T, t0, t1).
RationalFunction model_rhs_rf(const Model& m);

// {P, P_u, P_T}: the cleared polynomial and its partials in the catalytic
// variable and the series value.  A joint root in (u, T) for given sections
// is a branch point of the kernel.
std::vector<MultiPoly> critical_triple(const Model& m);

// Two copies of the critical triple sharing the sections: branch one on the
// slots (VU, VT), branch two renamed onto (VA, VB).  Six equations whose
// solution carries (u1, u2, T1, T2, t0, t1) as functions of (z, x).
std::vector<MultiPoly> two_branch_system(const Model& m);

// Unperturbed analogues {P1, P1_u, P1_T} and the discriminant
// P1_uu * P1_TT - P1_uT^2 whose additional vanishing locates the dominant
// singularity of the unperturbed solution.
std::vector<MultiPoly> unperturbed_triple(const Model& m);
MultiPoly unperturbed_discriminant(const Model& m);

// Branch two of the critical triple after the rescaling u = e*V,
// T = t0 + e*N, where e is the perturbation factor (x or x - 1), with the
// common powers e^(2, 1, 1) stripped.  Slots: VA = V, VB = N, VT1 = t1
// unknown; VZ, VX, VT0 parameters.  Where the perturbation vanishes the
// system is solved in closed form by V = -1, N = (1-t0)/z, t1 = (t0-1)/z.
std::vector<MultiPoly> rescaled_system(const Model& m);

// Jacobian of rescaled_system with respect to (V, N, t1).  Its determinant
// equals -z*V * (P_uu*P_TT - P_uT^2) on the rescaled branch and evaluates to
// -z^3 on the closed-form point at the critical x, hence is nonzero for
// z != 0.
std::array<std::array<MultiPoly, 3>, 3> rescaled_jacobian(const Model& m);

// ---------------------------------------------------------------------------
// Resultant-based elimination.
// ---------------------------------------------------------------------------
struct Annihilator {
  int target = VU;
  MultiPoly poly;  // squarefree, integer-primitive, in (target, z, x)
  std::vector<std::string> provenance;
};

struct EliminateOptions {
  // Factors divided out of every intermediate for as long as they divide it
  // (trivial-diagonal components such as u1 - u2).
  std::vector<MultiPoly> saturate;
  // Elimination order; variables not listed are appended smallest-degree
  // first.  Empty means fully automatic.
  std::vector<int> order;
};

// Iterated bivariate resultants against a minimal-degree pivot, with content
// removal and squarefree reduction interleaved, until only the keep slots
// remain.  Throws EliminationCollapse when every resultant of a step vanishes
// identically (shared component) or when nothing survives.
Annihilator eliminate(std::vector<MultiPoly> system, const std::set<int>& keep,
                      int target, const EliminateOptions& opts = {});

// The tuned pipeline: the u-annihilator from the two-branch system
// (eliminating T1, T2, t1, t0, u2 with the diagonal u1 - u2 saturated away),
// then the t0-annihilator by solving the branch-one pair, linear in
// (t0, t1), for t0 and eliminating u against the u-annihilator.
std::pair<Annihilator, Annihilator> critical_annihilators(const Model& m);

// ---------------------------------------------------------------------------
// Verification against solved series.
// ---------------------------------------------------------------------------

// z-order of the first nonvanishing coefficient of a.poly with the series s
// substituted for the target and x left symbolic; one past the inspected
// window when none is found.  The check covers x-degrees up to ctx.caps.x.
int verify_annihilator(const Annihilator& a, const TruncatedSeries<Rational>& s,
                       const SeriesCtx& ctx);

// Same check with the x slot bound to an explicit series instead of x itself;
// this is how branch series are verified, since they live in a rescaled frame
// (see BranchSeries::x_bind).
int verify_annihilator(const Annihilator& a, const TruncatedSeries<Rational>& s,
                       const TruncatedSeries<Rational>& x_bind,
                       const SeriesCtx& ctx);

// ---------------------------------------------------------------------------
// Kernel branch series.
//
// The two small kernel branches collide where z and the perturbation factor
// e vanish together, so neither is a joint power series in (z, e): the
// e-expansion has Laurent coefficients in z whose pole order grows with the
// e-degree.  In the rescaled variable y = e/z both branches are plain power
// series, so that is the frame everything is computed and returned in: the
// stored x-degree of every member counts powers of e/z, and x_bind records
// the series the VX slot must be bound to when the members are substituted
// back into polynomials over the original variables.
//
// Branch one continues the unperturbed branch point (u1, T1) through
// {P_u = 0, P_T = 0}; branch two lifts (V, N, t1) through the rescaled
// system and returns u2 = e*V.  Both lifts bind the solved sections t0, t1
// as known input and solve one y-order per pass against the Jacobian of the
// unperturbed slice.
// ---------------------------------------------------------------------------
struct BranchSeries {
  TruncatedSeries<Rational> u;
  TruncatedSeries<Rational> t;   // series value along the branch
  TruncatedSeries<Rational> t0;  // bound section, rebased to this frame
  TruncatedSeries<Rational> t1;  // branch two recovers t1; branch one echoes the bound row
  TruncatedSeries<Rational> x_bind;  // value of the x slot in this frame
};

// Unperturbed branch point (u(z), T(z)) of {P1_u = 0, P1_T = 0} with the
// solved t0(z, 0) bound; pure power series, seeds (0, 1).
std::pair<TruncatedSeries<Rational>, TruncatedSeries<Rational>>
unperturbed_branch(const Model& m, int zmax);

BranchSeries branch1_series(const Model& m, int zmax, int xcap);
BranchSeries branch2_series(const Model& m, int zmax, int xcap);

// Row extraction helpers: the series of the given u-section of a solved
// coefficient table (du = 0 keeps the full x-dependence of each entry).
TruncatedSeries<Rational> section_row(const std::vector<CoeffPoly<Rational>>& coeffs,
                                      int du, int zmax);

// ---------------------------------------------------------------------------
// Fixture text form: sums of explicit monomials like 2*z^3*u^8 over the
// default slot names.
// ---------------------------------------------------------------------------
std::string poly_to_text(const MultiPoly& p);
MultiPoly poly_from_text(const std::string& text);

}  // namespace pdde
