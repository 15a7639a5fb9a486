#pragma once

#include <array>
#include <vector>

#include "pdde/model.hpp"
#include "pdde/multipoly.hpp"
#include "pdde/numeric.hpp"

namespace pdde {

// ---------------------------------------------------------------------------
// Numeric solves of the critical-point systems.
//
// Everything here runs Newton on the exact polynomial systems from polysys,
// over BigFloat at a configurable precision.  A residual passes when it is
// small relative to the sum of absolute monomial contributions at the point,
// so the tolerance means the same thing for equations of any scale.
// ---------------------------------------------------------------------------

struct NumericOptions {
  unsigned precision_bits = 256;
  double residual_tol = 1e-12;  // relative, see above
  double step_tol = 1e-14;      // Newton stops once steps shrink this far
  int max_iterations = 120;
};

// Solution of the unperturbed critical system: the clearing of the bare
// equation together with its u- and T-derivatives and the Hessian
// determinant condition, solved for (z, u, T, t0).
struct CriticalPoint0 {
  BigFloat z0, u0, tt0, t00;
  std::array<BigFloat, 4> residuals;
  // Converged grid roots that were not selected; coordinates as above.
  std::vector<std::array<BigFloat, 4>> other_roots;
};

// Newton solution of the rescaled secondary system at fixed (z, x, t0).
struct RescaledSolution {
  BigFloat z, x, t0;  // the parameters the solve ran at
  BigFloat v, n, t1;
  BigFloat jacobian_det;  // det of the (V, N, t1) Jacobian at the solution
  std::array<BigFloat, 3> residuals;
  bool closed_form = false;  // perturbation-free point hit the closed forms
};

// One continuation point of the perturbed critical system: the critical
// triple plus the Hessian condition in (z, u, T, t0), coupled with the
// rescaled system in (V, N, t1) so the section closure stays polynomial.
struct PerturbedCritical {
  BigFloat x;
  BigFloat z0, u1, tt1, t00;
  BigFloat v, n, t1;
  BigFloat u2;  // second kernel root to first order: pert(x) * V
  std::array<BigFloat, 7> residuals;
};

struct TwoBranchPoint {
  BigFloat u1, tt1, u2, tt2, t0, t1;
  std::array<BigFloat, 6> residuals;
};

struct Z0Derivatives {
  BigFloat z0;
  BigFloat d1;  // implicit-differentiation value, cross-checked against the
                // centered difference of the continued curve
  BigFloat d2;  // centered second difference
  BigFloat d1_centered;
};

// Grid-seeded Newton solve of the unperturbed critical system.  Seeds come
// from a coarse scan of the positive orthant, with the section bound taken
// from solved series data; among converged roots the smallest z0 with
// t00 > 1 wins and the rest are reported in other_roots.  Throws
// NoConvergence when no seed converges, MultipleRoots when distinct roots
// tie for the selection.
CriticalPoint0 solve_critical0(const Model& m, const NumericOptions& opt = {});

// Newton on the rescaled system from the perturbation-free closed forms
// V = -1, N = (1 - t0)/z, t1 = (t0 - 1)/z.  At the unperturbed x the closed
// forms are returned directly when they already satisfy the system (no
// iteration); models whose rescaled system rejects them fall through to the
// Newton path.  Throws SingularJacobian when the Jacobian degenerates.
RescaledSolution solve_rescaled(const Model& m, const BigFloat& z,
                                const BigFloat& x, const BigFloat& t0,
                                const NumericOptions& opt = {});

// Residuals of the reduced system: the rational equation rhs - T and its
// (u, T) partials, evaluated with the section closure t1 = t1(z, x, t0)
// substituted from solve_rescaled.  Holding the closure value fixed under
// the partials is sound because the closure does not depend on (u, T).
// Residuals are raw rational-function values, not the cleared polynomials,
// so at a perturbation-free x they coincide with the unperturbed system's.
std::array<BigFloat, 3> reduced_system_residual(const Model& m,
                                                const BigFloat& z,
                                                const BigFloat& u,
                                                const BigFloat& t,
                                                const BigFloat& t0,
                                                const BigFloat& x,
                                                const NumericOptions& opt = {});

// Continuation of the perturbed critical point along x_path, which must
// start at the unperturbed x.  Each point Newton-solves the coupled
// 7-equation system seeded from its predecessor; failed steps are bisected
// and StepCollapse is thrown once the inserted step underflows 1e-12.
std::vector<PerturbedCritical> continue_z0(const Model& m,
                                           const std::vector<BigFloat>& x_path,
                                           const NumericOptions& opt = {});

// z0(x) and its first two derivatives at at_x: d1 by implicit
// differentiation of the coupled system, cross-checked against the centered
// O(h^2) difference (the two must agree to 1e-6 relative, else
// DerivativeMismatch); d2 by centered difference.
Z0Derivatives z0_derivatives(const Model& m, const BigFloat& at_x,
                             const BigFloat& h, const NumericOptions& opt = {});

// Newton on the six-equation two-branch system at fixed (z, x), seeded with
// the kernel-collision scaling u = +-sqrt(z * pert(x)).
TwoBranchPoint solve_two_branch(const Model& m, const BigFloat& z,
                                const BigFloat& x,
                                const NumericOptions& opt = {});

// ---------------------------------------------------------------------------
// Substitution ansatz for general order k: the u-section expansion of T
// along the rescaled branch u = X*V,
//   T = t0 + X V t1 + ... + X^(k-1) V^(k-1) t_(k-1) + X^k V^k N,
// where N is the k-th discrete-derivative remainder.  Only orders up to 2
// have dedicated section slots, so the ansatz is returned as exponent
// descriptors: one row per term of T, with t_index = -1 marking the closing
// N term.  The numeric pipeline above consumes only k = 2; higher orders are
// exposed for structural use.
// ---------------------------------------------------------------------------
struct SubstitutionTerm {
  int x_pow;
  int v_pow;
  int t_index;  // 0 .. k-1, or -1 for the N term
};

std::vector<SubstitutionTerm> general_substitution(int k);

}  // namespace pdde
