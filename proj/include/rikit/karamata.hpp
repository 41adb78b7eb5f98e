#pragma once

// The slowly varying algebra generated by l(t) = 1 - log t, and the class
// B_p membership checker.

#include "rikit/grid_fn.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rikit {

/// Monotonicity of a function of t on (0, 1).
enum class Monotonicity {
  constant,
  strictly_decreasing,
  strictly_increasing,
  nonincreasing,
  nondecreasing,
  neither,
  unknown,
};

const char* to_string(Monotonicity m) noexcept;
bool is_nonincreasing(Monotonicity m) noexcept;
bool is_nondecreasing(Monotonicity m) noexcept;

/// coef * l^exponent.
struct PowerForm {
  double coef = 1.0;
  double exponent = 0.0;
};

/// Expression tree over the atoms l^alpha, closed under product, real power
/// and positive linear combination. Every node is a function of L = l(t)
/// only, so evaluation also works in log coordinates where t itself would
/// underflow.
class SlowlyVarying {
 public:
  static SlowlyVarying atom(double alpha);
  static SlowlyVarying one() { return atom(0.0); }
  static SlowlyVarying product(std::vector<SlowlyVarying> factors);
  static SlowlyVarying power(const SlowlyVarying& base, double exponent);
  static SlowlyVarying lincomb(std::vector<std::pair<double, SlowlyVarying>> terms);

  /// Value at t in (0, 1]; t = 1 is accepted since l(1) = 1.
  double operator()(double t) const;
  /// Value as a function of L = l(t) >= 1.
  double at_log(double L) const;

  /// Set when the node reduces to coef * l^exponent.
  const std::optional<PowerForm>& power_form() const;
  bool has_closed_form() const { return power_form().has_value(); }
  Monotonicity monotonicity() const;

  nlohmann::json to_json() const;
  static SlowlyVarying from_json(const nlohmann::json& j);
  std::string describe() const;

  struct Node;

 private:
  explicit SlowlyVarying(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// b1 * b2^{-1} raised to the power q, as a node of the algebra.
SlowlyVarying ratio_power(const SlowlyVarying& b1, const SlowlyVarying& b2, double q);

/// Strict evaluation on the open interval; throws domain-error otherwise.
double eval_sv(const SlowlyVarying& b, double t);

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
  bool bounded(double band) const { return min >= 1.0 / band && max <= band; }
};

/// Range over the grid breakpoints (t < 1) of
/// int_0^t s^{alpha-1} b(s) ds / (t^alpha b(t)).
RatioRange sv_integral_property_check(const SlowlyVarying& b, double alpha, const Grid& grid);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v) noexcept;

struct BpConditionC {
  RatioRange range;
  double L_lo = 0.0;   // window in log coordinates actually used
  double L_hi = 0.0;
  bool window_shifted = false;
  Verdict verdict = Verdict::inconclusive;
};

struct BpConditionD {
  double sup_estimate = 0.0;
  std::vector<std::pair<double, double>> far_field;  // (L, D(L))
  Verdict verdict = Verdict::inconclusive;
};

struct BpReport {
  bool condition_a = true;
  Verdict condition_b = Verdict::inconclusive;
  Monotonicity b1_monotonicity = Monotonicity::unknown;
  Monotonicity b2_monotonicity = Monotonicity::unknown;
  BpConditionC condition_c;
  BpConditionD condition_d;
  Verdict verdict = Verdict::inconclusive;
  std::optional<bool> analytic_verdict;

  nlohmann::json to_json() const;
};

/// Closed-form membership rule for b1 = l^alpha, b2 = l^{-beta}.
bool bp_analytic_predicate(double alpha, double beta, double p);

/// Distance of (alpha, beta) from the switching surface of the rule above.
double bp_surface_distance(double alpha, double beta, double p);

/// int_s^1 dtau / (tau b1(tau)^p) expressed through L = l(s).
double tail_log_integral(const SlowlyVarying& b1, double p, double L);

/// b2(s)^p int_s^1 dtau / (tau b1(tau)^p) at L = l(s).
double condition_d_function(const SlowlyVarying& b1, const SlowlyVarying& b2, double p, double L);

BpReport in_class_Bp(const SlowlyVarying& b1, const SlowlyVarying& b2, double p);

}  // namespace rikit
