#pragma once

// The change of variables sigma = sigma(b1, b2, p): the increasing bijection
// of [0, 1] with t^p = W(sigma(t)^p) / C, where W(u) = int_0^u (b1/b2)^p and
// C = W(1).

#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"
#include "rikit/weight.hpp"

#include <memory>
#include <ostream>
#include <string>

namespace rikit {

class SigmaMap {
 public:
  /// Tabulates sigma on a geometric-toward-both-ends grid of `resolution`
  /// cells. Throws resolution-too-coarse when the defining-identity
  /// residual exceeds `tolerance`.
  static SigmaMap build(const SlowlyVarying& b1, const SlowlyVarying& b2, double p, Eigen::Index resolution,
                        double tolerance = 1e-6);

  double p() const { return d_->p; }
  const SlowlyVarying& b1() const { return d_->b1; }
  const SlowlyVarying& b2() const { return d_->b2; }
  double C() const { return d_->C; }
  Eigen::Index resolution() const { return d_->resolution; }
  /// Max over nodes and t-midpoints of |t^p - W(sigma(t)^p)/C|.
  double residual() const { return d_->residual; }
  /// The weight (b1/b2)^p.
  const Weight& weight() const { return d_->weight; }
  /// True when (b1/b2)^p is constant, so sigma is the identity.
  bool identity() const { return d_->identity; }

  double sigma(double t) const;
  double sigma_inverse(double t) const;
  /// s -> sigma(s^{1/p})^p = W^{-1}(C s), interpolated linearly in s
  /// between table nodes.
  double contract(double s) const;
  /// s -> sigma^{-1}(s^{1/p})^p = W(s) / C, evaluated exactly.
  double dilate(double s) const;
  /// dilate(s) - s without cancellation near 1.
  double dilate_gap(double s) const;

  /// Table nodes t_0 = 0 < ... < t_N = 1 and sigma at those nodes.
  const Eigen::ArrayXd& nodes() const { return d_->t; }
  Eigen::ArrayXd forward() const;

  /// Grid whose breakpoints are contract() of the given breakpoints, polished
  /// by Newton steps on dilate(), so that cell j is mapped by dilate() onto
  /// cell j of `grid`. Memoized.
  Grid pullback(const Grid& grid) const;

  /// Columns t, sigma, sigma_inv, residual at nodes and t-midpoints.
  void write_csv(std::ostream& out, const std::string& provenance) const;

  /// Stable identity of (b1, b2, p, resolution).
  const std::string& key() const { return d_->key; }

 private:
  struct Data {
    double p = 1.0;
    SlowlyVarying b1 = SlowlyVarying::one();
    SlowlyVarying b2 = SlowlyVarying::one();
    Weight weight = Weight::lebesgue();
    double C = 1.0;
    Eigen::Index resolution = 0;
    bool identity = false;
    Eigen::ArrayXd t;      // nodes in t, with t_0 = 0
    Eigen::ArrayXd s;      // t^p
    Eigen::ArrayXd u;      // W^{-1}(C s) = sigma(t)^p
    Eigen::ArrayXd head;   // W at the nodes t, reused as the u-grid
    Eigen::ArrayXd tail;   // C - W at the same nodes
    double residual = 0.0;
    std::string key;
  };

  explicit SigmaMap(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  double point_residual(double t) const;

  std::shared_ptr<const Data> d_;
};

struct DominationReport {
  bool holds = false;
  bool strict = false;
  bool strictly_decreasing_ratio = false;
  Eigen::Index points = 0;
  Eigen::Index violations = 0;
  Eigen::Index non_strict = 0;
  double min_gap = 0.0;
};

/// Range of sigma^{-1}(t) / (t b1(t^p) b2(t^p)^{-1}) over nodes in
/// [1e-8, 1 - 1e-8].
RatioRange sigma_inverse_asymptotic_check(const SigmaMap& m);

/// t <= sigma^{-1}(t^{1/p})^p at every interior node, strict when b1/b2 is
/// strictly decreasing. Throws precondition-violation unless b1/b2 is
/// classified nonincreasing.
DominationReport sigma_domination_check(const SigmaMap& m);

struct RemarkCRanges {
  RatioRange via_inverse;   // b1(t) / b1(sigma^{-1}(t^{1/p})^p)
  RatioRange via_forward;   // b1(t) / b1(sigma(t^{1/p})^p)
};

RemarkCRanges bp_remark_c_check(const SigmaMap& m);

/// Finite-difference derivative of s -> sigma^{-1}(s^{1/p})^p divided by
/// (b1/b2)^p(s) over the nodes. Diagnostic only.
RatioRange sigma_derivative_diagnostic(const SigmaMap& m);

}  // namespace rikit
