#pragma once

// The operators U, T and S on step functions, and the gaussibility check
// for arbitrary operators given as black boxes.

#include "rikit/dictionary.hpp"
#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"
#include "rikit/report.hpp"
#include "rikit/sigma_map.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace rikit {

/// U f(t) = f*(sigma^{-1}(t^{1/p})^p) / b2(t) on the pull-back of f*'s grid,
/// sampled at representatives.
StepFunction op_U(const StepFunction& f, const SigmaMap& m);

/// T f(t) = sup_{t <= s < 1} f*(sigma(s^{1/p})^p) / b1(sigma(s^{1/p})^p)^p,
/// the sup running over representatives of f*'s grid (refined as for op_S).
StepFunction op_T(const StepFunction& f, const SigmaMap& m);

/// S f(t) = (int_t^1 |f|^p / (s b1^p) ds)^{1/p} at representatives of f's
/// grid, with cells wider than a fixed ratio b/a split geometrically.
StepFunction op_S(const StepFunction& f, const SlowlyVarying& b1, double p);

/// Right-hand side integrand of the gaussibility inequality as a step
/// function: f*(sigma^{-1}(s^{1/p})^p) / b2(s) on the pull-back grid, with
/// the composition evaluated at cell midpoints and b2 at representatives.
StepFunction gaussible_majorant(const StepFunction& f, const SigmaMap& m);

struct OperatorHandle {
  std::string label;
  std::function<StepFunction(const StepFunction&)> apply;

  StepFunction operator()(const StepFunction& f) const { return apply(f); }

  static OperatorHandle U(const SigmaMap& m);
  static OperatorHandle T(const SigmaMap& m);
  /// f -> S(f*).
  static OperatorHandle S_star(const SlowlyVarying& b1, double p);
  static OperatorHandle scaled(const OperatorHandle& op, double c);
  static OperatorHandle sum(const OperatorHandle& a, const OperatorHandle& b);
  /// f -> (op f)*.
  static OperatorHandle rearranged(const OperatorHandle& op);
};

/// Operator from JSON: "U", "T", "S" (meaning S o *), or one of
/// {"scaled": {"c": c, "op": ...}}, {"sum": [a, b]}, {"rearranged": op}.
/// S uses the map's b1 and p.
OperatorHandle operator_from_json(const nlohmann::json& j, const SigmaMap& m);

/// sup over dictionary functions f and evaluation points t of
///   int_0^t [(op f)* b1]^p / int_0^t [gaussible_majorant(f) b1]^p,
/// where t runs over the breakpoints of both integrands' grids. Throws
/// precondition-violation unless (b1, b2) passes the B_p check.
ConstantReport gaussibility_check(const OperatorHandle& op, const SigmaMap& m,
                                  const std::vector<LabeledFunction>& dictionary);

/// Same sweep without the B_p gate; used where the gate was already run.
ConstantReport gaussibility_sweep(const OperatorHandle& op, const SigmaMap& m,
                                  const std::vector<LabeledFunction>& dictionary);

/// Smallest c with T f(t) <= c [f*(x)/b1(x)^p + T f(sigma^{-1}(t^{1/p})^p)],
/// x = sigma(t^{1/p})^p, over representatives t of T f's grid.
double t_recursion_constant(const StepFunction& f, const SigmaMap& m);

}  // namespace rikit
