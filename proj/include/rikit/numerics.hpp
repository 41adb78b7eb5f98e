#pragma once

// Small numeric kernels: compensated and exact summation, Gauss rules and
// the upper incomplete gamma function for arbitrary real order.

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace rikit {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exact running sum of doubles kept as a nonoverlapping expansion
/// (Shewchuk's algorithm, as in Python's math.fsum). value() returns the
/// correctly rounded total, independent of the order of the terms.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

struct GaussRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch). Cached per n.
const GaussRule& gauss_legendre(int n);

/// n-point Gauss-Laguerre rule for the weight e^{-x} on [0, inf).
const GaussRule& gauss_laguerre(int n);

/// Gamma(a, x) = int_x^inf s^{a-1} e^{-s} ds for any real a and x > 0.
double upper_incomplete_gamma(double a, double x);

/// 1 - log(t), the basic slowly varying function.
inline double ell(double t) { return 1.0 - std::log(t); }

}  // namespace rikit
