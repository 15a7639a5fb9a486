#include "pdde/critical.hpp"

#include <algorithm>
#include <sstream>
#include <utility>
#include <vector>

#include "pdde/errors.hpp"
#include "pdde/polysys.hpp"
#include "pdde/solver.hpp"

namespace pdde {

namespace {

BigFloat bf_abs(const BigFloat& v) { return v < 0 ? BigFloat(-v) : v; }

const BigFloat& bf_max(const BigFloat& a, const BigFloat& b) {
  return a < b ? b : a;
}

bool bf_is_nan(const BigFloat& v) { return !(v == v); }

std::string fmt(const BigFloat& v) {
  std::ostringstream os;
  os << v.convert_to<double>();
  return os.str();
}

BigFloat pert_value(const Model& m, const BigFloat& x) {
  return m.perturbation == Perturbation::kX ? x : BigFloat(x - 1);
}

// ---------------------------------------------------------------------------
// evaluation
//
// Polynomials are baked once per solve into terms with BigFloat coefficients
// at the active precision, so the inner Newton loop never touches rational
// arithmetic.  A PointEval shares one table of slot powers across all the
// evaluations at a point.
// ---------------------------------------------------------------------------

struct BakedPoly {
  struct Term {
    Exps e;
    BigFloat c;
  };
  std::vector<Term> terms;

  explicit BakedPoly(const MultiPoly& p) {
    terms.reserve(p.terms().size());
    for (const auto& t : p.terms()) terms.push_back({t.e, to_bigfloat(t.c)});
  }
};

struct PointEval {
  explicit PointEval(const std::array<BigFloat, kNumVars>& point) : pt(point) {}

  const std::array<BigFloat, kNumVars>& pt;
  std::array<std::vector<BigFloat>, kNumVars> pw;

  const BigFloat& power(size_t var, int e) {
    auto& col = pw[var];
    if (col.empty()) col.emplace_back(1);
    while (int(col.size()) <= e) {
      BigFloat nx = col.back() * pt[var];
      col.push_back(std::move(nx));
    }
    return col[size_t(e)];
  }

  // scale, when requested, accumulates the absolute values of the term
  // contributions; residuals are judged relative to it so the tolerance is
  // meaningful for equations of any magnitude.
  void eval(const BakedPoly& p, BigFloat* value, BigFloat* scale) {
    BigFloat acc(0), sc(0);
    for (const auto& t : p.terms) {
      BigFloat m = t.c;
      for (size_t var = 0; var < size_t(kNumVars); ++var)
        if (t.e[var] != 0) m *= power(var, t.e[var]);
      acc += m;
      if (scale) sc += bf_abs(m);
    }
    *value = std::move(acc);
    if (scale) *scale = std::move(sc);
  }

  BigFloat value(const BakedPoly& p) {
    BigFloat v;
    eval(p, &v, nullptr);
    return v;
  }
};

// ---------------------------------------------------------------------------
// dense linear algebra
// ---------------------------------------------------------------------------

using Vec = std::vector<BigFloat>;
using Mat = std::vector<std::vector<BigFloat>>;

// Partial-pivoting LU; solves a * x = b and returns det(a).  A pivot within
// rounding distance of zero relative to the matrix scale throws.
BigFloat lu_solve(Mat a, Vec b, Vec* x_out) {
  const size_t n = a.size();
  BigFloat scale(0);
  for (const auto& row : a)
    for (const auto& v : row) scale = bf_max(scale, bf_abs(v));
  const BigFloat tiny = ldexp(scale, 16 - int(precision_bits()));
  int sign = 1;
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    for (size_t i = k + 1; i < n; ++i)
      if (bf_abs(a[i][k]) > bf_abs(a[piv][k])) piv = i;
    if (!(bf_abs(a[piv][k]) > tiny))
      throw SingularJacobian("pivot vanished in LU factorization");
    if (piv != k) {
      std::swap(a[piv], a[k]);
      std::swap(b[piv], b[k]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      BigFloat f = a[i][k] / a[k][k];
      if (f == 0) continue;
      for (size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  BigFloat det(sign);
  for (size_t k = 0; k < n; ++k) det *= a[k][k];
  if (x_out) {
    Vec x(n);
    for (size_t ir = n; ir-- > 0;) {
      BigFloat s = b[ir];
      for (size_t j = ir + 1; j < n; ++j) s -= a[ir][j] * x[j];
      x[ir] = s / a[ir][ir];
    }
    *x_out = std::move(x);
  }
  return det;
}

// ---------------------------------------------------------------------------
// Newton driver
// ---------------------------------------------------------------------------

struct PolySystem {
  std::vector<MultiPoly> eqs;
  std::vector<int> unknowns;
  std::vector<BakedPoly> beqs;
  std::vector<std::vector<BakedPoly>> bjac;
};

PolySystem make_system(std::vector<MultiPoly> eqs, std::vector<int> unknowns) {
  PolySystem s;
  s.eqs = std::move(eqs);
  s.unknowns = std::move(unknowns);
  for (const auto& e : s.eqs) {
    s.beqs.emplace_back(e);
    std::vector<BakedPoly> row;
    for (int v : s.unknowns) row.emplace_back(e.derivative(v));
    s.bjac.push_back(std::move(row));
  }
  return s;
}

Vec rel_residuals(const PolySystem& sys, const std::array<BigFloat, kNumVars>& pt) {
  PointEval pe(pt);
  Vec rel(sys.beqs.size());
  for (size_t i = 0; i < sys.beqs.size(); ++i) {
    BigFloat v, s;
    pe.eval(sys.beqs[i], &v, &s);
    rel[i] = bf_abs(v) / bf_max(BigFloat(1), s);
  }
  return rel;
}

BigFloat max_rel(const PolySystem& sys, const std::array<BigFloat, kNumVars>& pt) {
  BigFloat mr(0);
  for (const auto& r : rel_residuals(sys, pt)) {
    if (bf_is_nan(r)) return r;
    mr = bf_max(mr, r);
  }
  return mr;
}

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  Vec rel;
};

// Damped Newton.  Iteration stops once the relative step drops under
// step_tol, so a converged solution is polished well past residual_tol;
// residual_tol itself only decides the final verdict.  Steps that worsen the
// residual are halved a bounded number of times and then taken anyway, which
// lets the iteration cross a ridge without looping forever.
NewtonReport newton_solve(const PolySystem& sys, std::array<BigFloat, kNumVars>& pt,
                          const NumericOptions& opt, int max_iters) {
  const size_t n = sys.beqs.size();
  const BigFloat tol(opt.residual_tol);
  const BigFloat stol(opt.step_tol);
  const BigFloat blowup(1e30);
  NewtonReport rep;

  for (int iter = 0; iter < max_iters; ++iter) {
    PointEval pe(pt);
    Vec f(n), sc(n);
    BigFloat mr(0);
    bool bad = false;
    for (size_t i = 0; i < n; ++i) {
      pe.eval(sys.beqs[i], &f[i], &sc[i]);
      BigFloat r = bf_abs(f[i]) / bf_max(BigFloat(1), sc[i]);
      if (bf_is_nan(r)) bad = true;
      mr = bf_max(mr, r);
    }
    if (bad) break;
    rep.iterations = iter;

    Mat jm(n, Vec(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) jm[i][j] = pe.value(sys.bjac[i][j]);
    Vec rhs(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = -f[i];
    Vec step;
    lu_solve(std::move(jm), std::move(rhs), &step);

    BigFloat lambda(1);
    std::array<BigFloat, kNumVars> cand;
    BigFloat cand_mr(0);
    bool placed = false;
    for (int halvings = 0; halvings <= 60; ++halvings) {
      cand = pt;
      for (size_t j = 0; j < n; ++j)
        cand[size_t(sys.unknowns[j])] += lambda * step[j];
      cand_mr = max_rel(sys, cand);
      if (!bf_is_nan(cand_mr)) {
        const bool improved = cand_mr <= mr || cand_mr <= tol;
        if (improved || halvings >= 24) {
          placed = true;
          break;
        }
      }
      lambda /= 2;
    }
    if (!placed) break;
    pt = cand;

    BigFloat sn(0);
    bool blew = false;
    for (size_t j = 0; j < n; ++j) {
      const BigFloat& c = pt[size_t(sys.unknowns[j])];
      BigFloat rs = bf_abs(lambda * step[j]) / (BigFloat(1) + bf_abs(c));
      sn = bf_max(sn, rs);
      if (bf_abs(c) > blowup) blew = true;
    }
    if (blew) break;
    if (sn <= stol) break;
  }

  rep.rel = rel_residuals(sys, pt);
  rep.converged = true;
  for (const auto& r : rep.rel) {
    const bool ok = !bf_is_nan(r) && r <= tol;
    rep.converged = rep.converged && ok;
  }
  return rep;
}

std::array<BigFloat, kNumVars> zero_point() {
  std::array<BigFloat, kNumVars> pt;
  for (auto& v : pt) v = BigFloat(0);
  return pt;
}

// ---------------------------------------------------------------------------
// coupled continuation system
// ---------------------------------------------------------------------------

// The critical triple and the collision condition in (z, u, T, t0), coupled
// with the rescaled secondary system in (V, N, t1); x is the parameter.  The
// collision condition is P_uu * P_TT - P_uT^2 built from the triple's own
// partials.
PolySystem coupled_system(const Model& m) {
  std::vector<MultiPoly> eqs = critical_triple(m);
  MultiPoly disc = eqs[1].derivative(VU) * eqs[2].derivative(VT);
  {
    MultiPoly mix = eqs[1].derivative(VT);
    disc -= mix * mix;
  }
  eqs.push_back(std::move(disc));
  for (auto& q : rescaled_system(m)) eqs.push_back(std::move(q));
  return make_system(std::move(eqs),
                     {VZ, VU, VT, VT0, VA, VB, VT1});
}

std::array<BigFloat, kNumVars> state_point(const PerturbedCritical& s) {
  auto pt = zero_point();
  pt[VX] = s.x;
  pt[VZ] = s.z0;
  pt[VU] = s.u1;
  pt[VT] = s.tt1;
  pt[VT0] = s.t00;
  pt[VA] = s.v;
  pt[VB] = s.n;
  pt[VT1] = s.t1;
  return pt;
}

PerturbedCritical snapshot(const Model& m, const std::array<BigFloat, kNumVars>& pt,
                           const Vec& rel) {
  PerturbedCritical s;
  s.x = pt[VX];
  s.z0 = pt[VZ];
  s.u1 = pt[VU];
  s.tt1 = pt[VT];
  s.t00 = pt[VT0];
  s.v = pt[VA];
  s.n = pt[VB];
  s.t1 = pt[VT1];
  s.u2 = pert_value(m, s.x) * s.v;
  for (size_t i = 0; i < s.residuals.size(); ++i) s.residuals[i] = rel[i];
  return s;
}

// Steps the coupled solution from the x already bound in pt to x_target.
// A Newton failure bisects toward the last good x; once the inserted step
// falls under 1e-12 the curve is treated as impassable.
NewtonReport advance_to(const PolySystem& sys, std::array<BigFloat, kNumVars>& pt,
                        const BigFloat& x_target, const NumericOptions& opt) {
  NewtonReport last;
  BigFloat cur = pt[VX];
  if (cur == x_target) {
    last = newton_solve(sys, pt, opt, opt.max_iterations);
    return last;
  }
  while (cur != x_target) {
    BigFloat trial = x_target;
    for (;;) {
      std::array<BigFloat, kNumVars> cand = pt;
      cand[VX] = trial;
      bool ok = false;
      try {
        last = newton_solve(sys, cand, opt, opt.max_iterations);
        ok = last.converged;
      } catch (const SingularJacobian&) {
        ok = false;
      }
      if (ok) {
        pt = std::move(cand);
        cur = trial;
        break;
      }
      trial = (cur + trial) / 2;
      if (bf_abs(trial - cur) < BigFloat(1e-12))
        throw StepCollapse("continuation step collapsed near x = " + fmt(cur));
    }
  }
  return last;
}

}  // namespace

// ---------------------------------------------------------------------------
// unperturbed critical point
// ---------------------------------------------------------------------------

CriticalPoint0 solve_critical0(const Model& m, const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  std::vector<MultiPoly> eqs = unperturbed_triple(m);
  eqs.push_back(unperturbed_discriminant(m));
  const PolySystem sys = make_system(std::move(eqs), {VZ, VU, VT, VT0});

  // Seed geometry from the solved series: the tail ratio of the section row
  // estimates the singularity radius, and partial sums just inside it bound
  // the section and branch values.  Coefficient rows can have unbounded
  // u-degree, so the solve is capped and the bounds are read off at u = 1/2.
  const int probe = 40;
  SolveOptions so;
  so.zmax = probe;
  so.xmode = XMode::kNumeric;
  so.x_value = unperturbed_x(m);
  so.ucap = probe + 4;
  SeriesSolver<Rational> solver(m, so);
  solver.extend(probe);
  const auto& cs = solver.coefficients();

  BigFloat zhat(-1);
  {
    std::vector<int> nz;
    for (int n = 0; n <= probe; ++n)
      if (cs[size_t(n)].coeff(0, 0) != 0) nz.push_back(n);
    if (nz.size() >= 6) {
      const int n1 = nz[nz.size() - 2], n2 = nz.back();
      const Rational a1 = cs[size_t(n1)].coeff(0, 0);
      const Rational a2 = cs[size_t(n2)].coeff(0, 0);
      BigFloat ratio = bf_abs(to_bigfloat(a1) / to_bigfloat(a2));
      zhat = pow(ratio, BigFloat(1) / (n2 - n1));
    }
  }

  BigFloat bound(4);
  if (zhat > 0 && zhat < 1) {
    BigFloat zq = zhat * BigFloat(9) / 10;
    if (zq > BigFloat(95) / 100) zq = BigFloat(95) / 100;
    BigFloat t_est(0), f_est(0), zp(1);
    const BigFloat half(0.5);
    for (int n = 0; n <= probe; ++n) {
      t_est += to_bigfloat(cs[size_t(n)].coeff(0, 0)) * zp;
      BigFloat row(0);
      for (const auto& t : cs[size_t(n)].terms())
        row += to_bigfloat(t.c) * pow(half, t.du);
      f_est += row * zp;
      zp *= zq;
    }
    bound = bf_max(BigFloat(3), bf_max(t_est, f_est) * 2);
    if (bound > 12) bound = BigFloat(12);
  }

  std::vector<BigFloat> zs;
  if (zhat > 0 && zhat < 1) {
    for (int pc : {35, 60, 85, 100, 120}) {
      BigFloat zc = zhat * pc / 100;
      zs.push_back(zc > 1 ? BigFloat(1) : zc);
    }
  } else {
    for (int pc : {10, 30, 50, 70, 90}) zs.push_back(BigFloat(pc) / 100);
  }
  std::vector<BigFloat> us;
  for (int pc : {20, 40, 60, 80, 100}) us.push_back(BigFloat(pc) / 100);
  std::vector<BigFloat> ts;
  for (int k = 0; k < 4; ++k)
    ts.push_back(BigFloat(1) + (bound - 1) * k / 3);

  const int scan_iters = std::min(opt.max_iterations, 60);
  std::vector<std::array<BigFloat, 4>> roots;
  BigFloat best(-1);
  for (const auto& z : zs)
    for (const auto& u : us)
      for (const auto& tv : ts)
        for (const auto& t0 : ts) {
          auto pt = zero_point();
          pt[VZ] = z;
          pt[VU] = u;
          pt[VT] = tv;
          pt[VT0] = t0;
          NewtonReport rep;
          try {
            rep = newton_solve(sys, pt, opt, scan_iters);
          } catch (const SingularJacobian&) {
            continue;
          }
          BigFloat mr(0);
          for (const auto& r : rep.rel) mr = bf_max(mr, r);
          if (!bf_is_nan(mr) && (best < 0 || mr < best)) best = mr;
          if (!rep.converged) continue;
          bool sane = true;
          for (int v : sys.unknowns) {
            const bool ok = !bf_is_nan(pt[size_t(v)]) && bf_abs(pt[size_t(v)]) < BigFloat(1e6);
            sane = sane && ok;
          }
          if (!sane) continue;
          std::array<BigFloat, 4> root{pt[VZ], pt[VU], pt[VT], pt[VT0]};
          bool dup = false;
          for (const auto& r : roots) {
            BigFloat d(0);
            for (int i = 0; i < 4; ++i)
              d = bf_max(d, bf_abs(root[size_t(i)] - r[size_t(i)]) /
                                (BigFloat(1) + bf_abs(r[size_t(i)])));
            if (d < BigFloat(1e-8)) dup = true;
          }
          if (!dup) roots.push_back(std::move(root));
        }

  if (roots.empty())
    throw NoConvergence("critical scan: no seed converged (best residual " +
                        fmt(best) + ")");

  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  std::vector<size_t> eligible;
  for (size_t i = 0; i < roots.size(); ++i) {
    const bool ok = roots[i][0] > BigFloat(1e-12) && roots[i][3] > 1;
    if (ok) eligible.push_back(i);
  }
  if (eligible.empty())
    throw NoConvergence("critical scan: no converged root has z0 > 0 and t00 > 1");
  if (eligible.size() >= 2) {
    const auto& a = roots[eligible[0]];
    const auto& b = roots[eligible[1]];
    if (bf_abs(b[0] - a[0]) <= BigFloat(1e-8) * (BigFloat(1) + bf_abs(a[0])))
      throw MultipleRoots("two distinct roots share the smallest z0 = " +
                          fmt(a[0]));
  }

  const auto& sel = roots[eligible[0]];
  CriticalPoint0 out;
  out.z0 = sel[0];
  out.u0 = sel[1];
  out.tt0 = sel[2];
  out.t00 = sel[3];
  auto pt = zero_point();
  pt[VZ] = out.z0;
  pt[VU] = out.u0;
  pt[VT] = out.tt0;
  pt[VT0] = out.t00;
  const Vec rel = rel_residuals(sys, pt);
  for (size_t i = 0; i < 4; ++i) out.residuals[i] = rel[i];
  for (size_t i = 0; i < roots.size(); ++i)
    if (i != eligible[0]) out.other_roots.push_back(roots[i]);
  return out;
}

// ---------------------------------------------------------------------------
// rescaled secondary system
// ---------------------------------------------------------------------------

RescaledSolution solve_rescaled(const Model& m, const BigFloat& z,
                                const BigFloat& x, const BigFloat& t0,
                                const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  if (z == 0) throw Error("rescaled system needs z != 0");
  const PolySystem sys = make_system(rescaled_system(m), {VA, VB, VT1});

  auto pt = zero_point();
  pt[VZ] = z;
  pt[VX] = x;
  pt[VT0] = t0;
  pt[VA] = BigFloat(-1);
  pt[VB] = (BigFloat(1) - t0) / z;
  pt[VT1] = (t0 - BigFloat(1)) / z;

  RescaledSolution out;
  out.z = z;
  out.x = x;
  out.t0 = t0;

  const BigFloat tol(opt.residual_tol);
  Vec rel = rel_residuals(sys, pt);
  BigFloat mr(0);
  for (const auto& r : rel) mr = bf_max(mr, r);
  if (pert_value(m, x) == 0 && mr <= tol) {
    out.closed_form = true;
  } else {
    NewtonReport rep = newton_solve(sys, pt, opt, opt.max_iterations);
    if (!rep.converged)
      throw NoConvergence("rescaled solve stalled at relative residual " +
                          fmt(*std::max_element(rep.rel.begin(), rep.rel.end())));
    rel = std::move(rep.rel);
  }
  out.v = pt[VA];
  out.n = pt[VB];
  out.t1 = pt[VT1];
  for (size_t i = 0; i < 3; ++i) out.residuals[i] = rel[i];

  const auto jp = rescaled_jacobian(m);
  PointEval pe(pt);
  std::array<std::array<BigFloat, 3>, 3> j;
  for (size_t i = 0; i < 3; ++i)
    for (size_t k = 0; k < 3; ++k) j[i][k] = pe.value(BakedPoly(jp[i][k]));
  out.jacobian_det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  return out;
}

std::array<BigFloat, 3> reduced_system_residual(const Model& m, const BigFloat& z,
                                                const BigFloat& u, const BigFloat& t,
                                                const BigFloat& t0, const BigFloat& x,
                                                const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  const RescaledSolution rs = solve_rescaled(m, z, x, t0, opt);

  const RationalFunction e =
      model_rhs_rf(m) - RationalFunction::variable(VT);
  const std::array<RationalFunction, 3> row = {e, e.derivative(VU),
                                               e.derivative(VT)};
  auto pt = zero_point();
  pt[VZ] = z;
  pt[VU] = u;
  pt[VX] = x;
  pt[VT] = t;
  pt[VT0] = t0;
  pt[VT1] = rs.t1;

  PointEval pe(pt);
  std::array<BigFloat, 3> out;
  for (size_t i = 0; i < 3; ++i) {
    const BigFloat den = pe.value(BakedPoly(row[i].den()));
    if (den == 0)
      throw ZeroDenominator("reduced residual evaluated on the cleared locus");
    out[i] = pe.value(BakedPoly(row[i].num())) / den;
  }
  return out;
}

// ---------------------------------------------------------------------------
// continuation in x
// ---------------------------------------------------------------------------

std::vector<PerturbedCritical> continue_z0(const Model& m,
                                           const std::vector<BigFloat>& x_path,
                                           const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  if (x_path.empty()) throw Error("continuation path is empty");
  const BigFloat xu = to_bigfloat(unperturbed_x(m));
  if (bf_abs(x_path[0] - xu) > BigFloat(1e-20))
    throw Error("continuation must start at the unperturbed x = " + fmt(xu));

  const PolySystem sys = coupled_system(m);

  const CriticalPoint0 c0 = solve_critical0(m, opt);
  const RescaledSolution r0 = solve_rescaled(m, c0.z0, xu, c0.t00, opt);
  auto pt = zero_point();
  pt[VX] = xu;
  pt[VZ] = c0.z0;
  pt[VU] = c0.u0;
  pt[VT] = c0.tt0;
  pt[VT0] = c0.t00;
  pt[VA] = r0.v;
  pt[VB] = r0.n;
  pt[VT1] = r0.t1;
  NewtonReport rep = newton_solve(sys, pt, opt, opt.max_iterations);
  if (!rep.converged)
    throw NoConvergence("coupled system rejected the unperturbed seed");

  std::vector<PerturbedCritical> out;
  out.push_back(snapshot(m, pt, rep.rel));
  for (size_t i = 1; i < x_path.size(); ++i) {
    rep = advance_to(sys, pt, x_path[i], opt);
    out.push_back(snapshot(m, pt, rep.rel));
  }
  return out;
}

Z0Derivatives z0_derivatives(const Model& m, const BigFloat& at_x,
                             const BigFloat& h, const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  if (!(h > 0)) throw Error("difference step h must be positive");

  // The differences divide out h^2, so the curve is polished far below the
  // reporting tolerance to keep cancellation out of the quotient.
  NumericOptions tight = opt;
  tight.step_tol = std::min(opt.step_tol, 1e-40);
  tight.max_iterations = std::max(opt.max_iterations, 200);

  const BigFloat xu = to_bigfloat(unperturbed_x(m));
  std::vector<BigFloat> path{xu};
  if (at_x != xu) path.push_back(at_x);
  const std::vector<PerturbedCritical> curve = continue_z0(m, path, tight);
  const PerturbedCritical& base = curve.back();

  const PolySystem sys = coupled_system(m);
  const auto pt = state_point(base);
  const size_t n = sys.beqs.size();
  PointEval pe(pt);
  Mat jm(n, Vec(n));
  Vec rhs(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) jm[i][j] = pe.value(sys.bjac[i][j]);
    rhs[i] = -pe.value(BakedPoly(sys.eqs[i].derivative(VX)));
  }
  Vec w;
  lu_solve(std::move(jm), std::move(rhs), &w);

  Z0Derivatives out;
  out.z0 = base.z0;
  out.d1 = w[0];

  auto z_at = [&](const BigFloat& xq) {
    auto q = pt;
    advance_to(sys, q, xq, tight);
    return BigFloat(q[VZ]);
  };
  const BigFloat zp = z_at(at_x + h);
  const BigFloat zm = z_at(at_x - h);
  out.d1_centered = (zp - zm) / (2 * h);
  out.d2 = (zp - 2 * base.z0 + zm) / (h * h);

  const BigFloat gap =
      bf_abs(out.d1 - out.d1_centered) / bf_max(BigFloat(1), bf_abs(out.d1));
  if (gap > BigFloat(1e-6))
    throw DerivativeMismatch("implicit z0' = " + fmt(out.d1) +
                             " vs centered " + fmt(out.d1_centered));
  return out;
}

// ---------------------------------------------------------------------------
// two-branch solve
// ---------------------------------------------------------------------------

TwoBranchPoint solve_two_branch(const Model& m, const BigFloat& z,
                                const BigFloat& x, const NumericOptions& opt) {
  set_precision_bits(opt.precision_bits);
  const PolySystem sys =
      make_system(two_branch_system(m), {VU, VT, VA, VB, VT0, VT1});

  // The kernel roots collide like +-sqrt(z * pert) as the perturbation
  // vanishes; that scaling is the seed.
  const BigFloat prod = z * pert_value(m, x);
  const BigFloat s = sqrt(bf_abs(prod));
  auto pt = zero_point();
  pt[VZ] = z;
  pt[VX] = x;
  pt[VU] = s;
  pt[VA] = -s;
  pt[VT] = BigFloat(1);
  pt[VB] = BigFloat(1);
  pt[VT0] = BigFloat(1);
  pt[VT1] = BigFloat(0);

  NewtonReport rep = newton_solve(sys, pt, opt, opt.max_iterations);
  if (!rep.converged)
    throw NoConvergence("two-branch solve stalled at relative residual " +
                        fmt(*std::max_element(rep.rel.begin(), rep.rel.end())));
  TwoBranchPoint out;
  out.u1 = pt[VU];
  out.tt1 = pt[VT];
  out.u2 = pt[VA];
  out.tt2 = pt[VB];
  out.t0 = pt[VT0];
  out.t1 = pt[VT1];
  for (size_t i = 0; i < 6; ++i) out.residuals[i] = rep.rel[i];
  return out;
}

// ---------------------------------------------------------------------------
// general-order ansatz
// ---------------------------------------------------------------------------

std::vector<SubstitutionTerm> general_substitution(int k) {
  if (k < 1) throw Error("substitution order must be at least 1");
  std::vector<SubstitutionTerm> rows;
  rows.reserve(size_t(k) + 1);
  for (int j = 0; j < k; ++j) rows.push_back({j, j, j});
  rows.push_back({k, k, -1});
  return rows;
}

}  // namespace pdde
