#include "rikit/weight.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace rikit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string exact_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Weight::Weight(double kappa, SlowlyVarying b, double q, double coef)
    : kappa_(kappa), b_(std::move(b)), q_(q), coef_(coef) {
  if (!std::isfinite(kappa) || !std::isfinite(q) || !(coef > 0.0))
    throw Error(ErrorCode::invalid_argument, "weight parameters must be finite with positive coefficient");
  if (const auto& f = b_.power_form()) form_ = PowerForm{coef_ * std::pow(f->coef, q_), f->exponent * q_};
  key_ = "w|" + exact_number(kappa_) + "|" + exact_number(q_) + "|" + exact_number(coef_) + "|" + b_.to_json().dump();
}

double Weight::operator()(double s) const {
  const double L = ell(s);
  const double bq = form_ ? form_->coef * std::pow(L, form_->exponent) : coef_ * std::pow(b_.at_log(L), q_);
  return (kappa_ == 0.0 ? 1.0 : std::pow(s, kappa_)) * bq;
}

// int_{lu}^{hu} w(e^u) e^u du with 12-point Gauss-Legendre; accurate to
// rounding when hu - lu <= log 2.
double Weight::log_panel(double lu, double hu) const {
  const GaussRule& rule = gauss_legendre(12);
  const double half = 0.5 * (hu - lu);
  const double mid = 0.5 * (hu + lu);
  CompensatedSum sum;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const double u = mid + half * rule.nodes[k];
    const double L = 1.0 - u;
    const double bq = form_ ? form_->coef * std::pow(L, form_->exponent) : coef_ * std::pow(b_.at_log(L), q_);
    sum.add(rule.weights[k] * std::exp((kappa_ + 1.0) * u) * bq);
  }
  return half * sum.value();
}

double Weight::composite(double a, double b) const {
  const double la = std::log(a);
  const double lb = std::log(b);
  const int panels = std::max(1, static_cast<int>(std::ceil((lb - la) / std::log(2.0))));
  CompensatedSum sum;
  for (int k = 0; k < panels; ++k) {
    const double lo = la + (lb - la) * k / panels;
    const double hi = k + 1 == panels ? lb : la + (lb - la) * (k + 1) / panels;
    sum.add(log_panel(lo, hi));
  }
  return sum.value();
}

// int_0^x s^kappa c l^gamma ds for kappa > -1, via s = e^{1-L}:
// c e^{kappa+1} (kappa+1)^{-(gamma+1)} Gamma(gamma+1, (kappa+1) l(x)).
double Weight::closed_primitive(double x) const {
  if (x <= 0.0) return 0.0;
  const double k1 = kappa_ + 1.0;
  const double g = form_->exponent;
  if (g == 0.0) return form_->coef * std::pow(x, k1) / k1;
  return form_->coef * std::exp(k1 - (g + 1.0) * std::log(k1)) * upper_incomplete_gamma(g + 1.0, k1 * ell(x));
}

double Weight::integral(double a, double b) const {
  if (!(a >= 0.0) || !(b <= 1.0) || a > b) throw Error(ErrorCode::invalid_argument, "weight integral needs 0 <= a <= b <= 1");
  if (a == b) return 0.0;

  if (form_ && kappa_ == -1.0) {
    // int_a^b ds / s * c l^gamma = c int_{l(b)}^{l(a)} L^gamma dL
    const double g1 = form_->exponent + 1.0;
    const double Lb = ell(b);
    if (a == 0.0) return g1 < 0.0 ? form_->coef * std::pow(Lb, g1) / -g1 : kInf;
    const double rel = std::log1p((b - a) / a) / Lb;  // (l(a) - l(b)) / l(b)
    if (g1 == 0.0) return form_->coef * std::log1p(rel);
    return form_->coef * std::pow(Lb, g1) * std::expm1(g1 * std::log1p(rel)) / g1;
  }

  if (kappa_ <= -1.0 && a == 0.0) return kInf;

  if (form_ && kappa_ > -1.0) {
    const double k1 = kappa_ + 1.0;
    if (form_->exponent == 0.0) {
      if (kappa_ == 0.0) return form_->coef * (b - a);
      if (a == 0.0) return form_->coef * std::pow(b, k1) / k1;
      return form_->coef * std::pow(a, k1) * std::expm1(k1 * std::log1p((b - a) / a)) / k1;
    }
    if (a == 0.0) return closed_primitive(b);
    if (b <= 2.0 * a) return log_panel(std::log(a), std::log(b));
    return closed_primitive(b) - closed_primitive(a);
  }

  if (a > 0.0) return composite(a, b);

  // Non-closed weight from 0 with kappa > -1: Gauss-Laguerre in L below a
  // small cut, panels above it.
  const double cut = std::min(b, 1e-6);
  const double k1 = kappa_ + 1.0;
  const double Lc = ell(cut);
  const GaussRule& rule = gauss_laguerre(64);
  CompensatedSum sum;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    sum.add(rule.weights[i] * coef_ * std::pow(b_.at_log(Lc + rule.nodes[i] / k1), q_));
  double value = std::pow(cut, k1) / k1 * sum.value();
  if (b > cut) value += composite(cut, b);
  return value;
}

std::shared_ptr<const Eigen::ArrayXd> cell_integrals(const Grid& grid, const Weight& w) {
  return grid.memo<Eigen::ArrayXd>(w.key(), [&] {
    Eigen::ArrayXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = w.integral(grid.left(i), grid.right(i));
    return out;
  });
}

WeightedPrimitive::WeightedPrimitive(const StepFunction& f, double p, Weight w)
    : grid_(f.grid()), w_(std::move(w)) {
  vp_ = f.values().abs();
  if (p != 1.0) vp_ = vp_.pow(p);
  const auto cells = cell_integrals(grid_, w_);
  const Eigen::Index n = grid_.size();
  head_.resize(n + 1);
  tail_.resize(n + 1);
  auto contribution = [&](Eigen::Index i) { return vp_[i] == 0.0 ? 0.0 : vp_[i] * (*cells)[i]; };
  CompensatedSum h;
  head_[0] = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    h.add(contribution(i));
    head_[i + 1] = h.value();
  }
  CompensatedSum s;
  tail_[n] = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    s.add(contribution(i));
    tail_[i] = s.value();
  }
}

double WeightedPrimitive::head(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return total();
  const Eigen::Index j = grid_.locate(t);
  const double left = grid_.left(j);
  double partial = 0.0;
  if (t > left && vp_[j] != 0.0) partial = vp_[j] * w_.integral(left, t);
  return head_[j] + partial;
}

double WeightedPrimitive::tail(double t) const {
  if (t >= 1.0) return 0.0;
  if (t <= 0.0) return tail_[0];
  const Eigen::Index j = grid_.locate(t);
  if (t == grid_.left(j)) return tail_[j];
  double partial = 0.0;
  if (vp_[j] != 0.0) partial = vp_[j] * w_.integral(t, grid_.right(j));
  return tail_[j + 1] + partial;
}

}  // namespace rikit
