#pragma once

// Rearrangement-invariant (quasi-)norms on step functions: Lebesgue,
// Orlicz-Karamata L^{q,b}, powered spaces X^{1/p} and associate spaces.

#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rikit {

enum class Banach { banach, quasi, unknown };
const char* to_string(Banach b) noexcept;

class SpaceSpec {
 public:
  enum class Kind { lebesgue, karamata, power, associate };

  /// L^q for q in (0, inf]; pass infinity() for L^inf.
  static SpaceSpec lebesgue(double q);
  /// ||b f*||_{L^q}. For q = inf the weight must be bounded (l^gamma with
  /// gamma <= 0 or a constant).
  static SpaceSpec karamata(double q, SlowlyVarying b);
  /// X^{1/p}: ||f|| = || |f|^{1/p} ||_X^p.
  static SpaceSpec power(const SpaceSpec& base, double p);
  /// X'. The base must carry a Banach norm.
  static SpaceSpec associate(const SpaceSpec& base);

  Kind kind() const { return d_->kind; }
  /// Exponent of a Lebesgue or Karamata space.
  double q() const { return d_->q; }
  const SlowlyVarying& b() const { return d_->b; }
  /// Power of a powered space.
  double p() const { return d_->p; }
  const SpaceSpec& base() const { return *d_->base; }

  Banach banach() const;
  /// Structural p-convexity: X^{1/p} is (equivalent to) a Banach norm.
  bool p_convex(double p) const;
  /// Same space written without a power node when the power can be pushed
  /// into the exponent: (L^q)^{1/p} = L^{q/p}, (L^{q,b})^{1/p} = L^{q/p,b^p}.
  SpaceSpec simplified() const;
  /// Closed-form associate (Lebesgue bases only).
  std::optional<SpaceSpec> closed_associate() const;

  nlohmann::json to_json() const;
  static SpaceSpec from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  struct Data {
    Kind kind = Kind::lebesgue;
    double q = 1.0;
    SlowlyVarying b = SlowlyVarying::one();
    double p = 1.0;
    std::shared_ptr<const SpaceSpec> base;
  };
  explicit SpaceSpec(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

enum class AssociatePolicy { exact, dictionary_lower_bound };

/// Norm of f. Associates without a closed form throw unsupported-associate
/// under the exact policy and fall back to associate_norm_estimate over the
/// standard dual dictionary of f's grid otherwise.
double norm(const SpaceSpec& space, const StepFunction& f, AssociatePolicy policy = AssociatePolicy::exact);

/// Lower bound sup_g int f* g* / ||g||_base over the dictionary.
double associate_norm_estimate(const SpaceSpec& base, const StepFunction& f,
                               const std::vector<StepFunction>& dictionary);

/// Normalized indicators chi_(0,a) on 128 log-spaced and 16 uniform levels
/// snapped to breakpoints, powers t^{-gamma} and l^delta, all sampled at
/// representatives of `grid`.
std::vector<StepFunction> standard_dual_dictionary(const Grid& grid);

struct HolderReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// int |f g| <= ||f||_base ||g||_base' (1 + 1e-12). The base needs a
/// closed-form associate.
HolderReport holder_check(const StepFunction& f, const StepFunction& g, const SpaceSpec& base);

}  // namespace rikit
