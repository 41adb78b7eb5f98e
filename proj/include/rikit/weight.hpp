#pragma once

// Weights s^kappa * coef * b(s)^q with exact cell integrals, and primitives
// of |f|^p against such weights for step functions f.

#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"

#include <memory>
#include <optional>
#include <string>

namespace rikit {

class Weight {
 public:
  Weight(double kappa, SlowlyVarying b, double q, double coef = 1.0);

  /// Unit weight (Lebesgue measure).
  static Weight lebesgue() { return Weight(0.0, SlowlyVarying::one(), 1.0); }

  double operator()(double s) const;
  /// int_a^b of the weight; +inf when the integral diverges at 0.
  double integral(double a, double b) const;

  double kappa() const { return kappa_; }
  /// coef * b^q as a power of l, when available.
  const std::optional<PowerForm>& power_form() const { return form_; }
  /// Stable identity used to memoize cell tables on a grid.
  const std::string& key() const { return key_; }

 private:
  double log_panel(double lu, double hu) const;
  double composite(double a, double b) const;
  double closed_primitive(double x) const;

  double kappa_;
  SlowlyVarying b_;
  double q_;
  double coef_;
  std::optional<PowerForm> form_;
  std::string key_;
};

/// int over each cell of the weight, memoized on the grid.
std::shared_ptr<const Eigen::ArrayXd> cell_integrals(const Grid& grid, const Weight& w);

/// P(t) = int_0^t |f|^p w and its complement int_t^1 |f|^p w for a step
/// function f. Prefix and suffix sums are compensated, partial cells are
/// integrated exactly.
class WeightedPrimitive {
 public:
  WeightedPrimitive(const StepFunction& f, double p, Weight w);

  double head(double t) const;
  double tail(double t) const;
  double total() const { return head_[head_.size() - 1]; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::ArrayXd vp_;
  Weight w_;
  Eigen::ArrayXd head_;
  Eigen::ArrayXd tail_;
};

}  // namespace rikit
