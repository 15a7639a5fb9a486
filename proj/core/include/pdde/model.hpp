#pragma once

#include <string>
#include <vector>

#include "pdde/expr.hpp"

namespace pdde {

enum class Perturbation { kX, kXMinus1 };

// A catalytic equation with a singular perturbation:
//   F(z,u,x) = z*Q(z,u,dF) + pert(x) * z * R(z,u,x,dF)
// where d^j F is the j-th discrete derivative in u and `order` is the
// highest derivative appearing in R.  Q may use at most d^1 and never x.
struct Model {
  std::string name;
  int order = 2;
  Perturbation perturbation = Perturbation::kX;
  Expr q;
  Expr r;  // null means R = 0
};

// The x value at which the perturbed wing vanishes.
Rational unperturbed_x(const Model& m);
Expr perturbation_expr(const Model& m);
// The full right side z*Q + pert(x)*z*R as one expression.
Expr rhs_expr(const Model& m);

// Throws if the structural rules above are violated.
void validate_model(const Model& m);

// Text form: `key = value;` statements (name, order, perturbation, Q, R),
// '#' starts a comment until end of line.
Model parse_model(const std::string& text);
std::string print_model(const Model& m);

const Model& builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

// ---------------------------------------------------------------------------
// hypotheses of the asymptotic transfer theorem
// ---------------------------------------------------------------------------

enum class Tri { kPass, kFail, kUnknown };

struct AssumptionReport {
  bool order_ge_2 = false;
  bool q_x_free = false;
  bool r_linear_in_top = false;       // R linear in its highest derivative
  bool q_nonzero_origin = false;      // Q(z,0,0,0) != 0
  bool q_u_partial_nonzero = false;   // dQ/du nonzero after setting y1 = 0
  bool q_y1_partial_nonzero = false;  // dQ/dy1 != 0
  bool q_second_order_nonzero = false;  // Q_y0y0 != 0 or Q_uy0 != 0
  Tri q_nonnegative = Tri::kUnknown;  // verified by series expansion, degree 8
  bool strongly_connected = false;    // coefficient dependency graph at x = 1

  bool all_pass() const;
  std::string summary() const;
};

AssumptionReport check_assumptions(const Model& m, int graph_bound = -1);

// Dependency of the right side's catalytic coefficients on the solution
// coefficients at x = 1, found by randomized exact probing.  Edge i -> j
// means coefficient i of the right side reads solution coefficient j.
struct DependencyGraph {
  int bound = 0;  // nodes are 0..bound
  std::vector<std::vector<int>> edges;
  bool strongly_connected = false;
};

DependencyGraph dependency_graph(const Model& m, int bound = -1);

}  // namespace pdde
