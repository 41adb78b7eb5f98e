#include "rikit/sigma_map.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rikit {

namespace {

// Solves W(u) = y (head form) or C - W(u) = y (tail form) for u. The node
// tables bracket the root in one cell; Newton with W' = (b1/b2)^p refines
// it, falling back to bisection whenever a step leaves the bracket.
class Inverter {
 public:
  Inverter(const Weight& w, const Eigen::ArrayXd& x, const Eigen::ArrayXd& head, const Eigen::ArrayXd& tail)
      : w_(w), x_(x), head_(head), tail_(tail) {}

  double solve_head(double y) const {
    const Eigen::Index n = x_.size() - 1;
    if (y <= 0.0) return 0.0;
    if (y >= head_[n]) return 1.0;
    const Eigen::Index j = std::clamp<Eigen::Index>(
        std::upper_bound(head_.data(), head_.data() + n + 1, y) - head_.data() - 1, 0, n - 1);
    const double base = head_[j];
    const double x0 = x_[j];
    return refine([&](double u) { return base + w_.integral(x0, u) - y; }, x0, x_[j + 1],
                  x0 + (x_[j + 1] - x0) * (y - base) / std::max(head_[j + 1] - base, 1e-300));
  }

  double solve_tail(double y) const {
    const Eigen::Index n = x_.size() - 1;
    if (y <= 0.0) return 1.0;
    if (y >= tail_[0]) return 0.0;
    // tail_ is decreasing; find j with tail_[j + 1] <= y < tail_[j].
    const Eigen::Index j = std::clamp<Eigen::Index>(
        std::upper_bound(tail_.data(), tail_.data() + n + 1, y, std::greater<>()) - tail_.data() - 1, 0, n - 1);
    const double base = tail_[j + 1];
    const double x1 = x_[j + 1];
    return refine([&](double u) { return y - base - w_.integral(u, x1); }, x_[j], x1,
                  x1 - (x1 - x_[j]) * (y - base) / std::max(tail_[j] - base, 1e-300));
  }

 private:
  // F is increasing in u on [lo, hi] with a sign change.
  template <class F>
  double refine(F&& f, double lo, double hi, double u) const {
    if (!(u > lo && u < hi)) u = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double v = f(u);
      if (v == 0.0) return u;
      if (v > 0.0) hi = u; else lo = u;
      const double d = w_(u);
      double next = u - v / d;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) <= 2e-16 * u || hi - lo <= 2e-16 * hi) return next;
      u = next;
    }
    return u;
  }

  const Weight& w_;
  const Eigen::ArrayXd& x_;
  const Eigen::ArrayXd& head_;
  const Eigen::ArrayXd& tail_;
};

// 1 - t^p without cancellation.
double one_minus_pow(double t, double p) { return -std::expm1(p * std::log(t)); }

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SigmaMap SigmaMap::build(const SlowlyVarying& b1, const SlowlyVarying& b2, double p, Eigen::Index resolution,
                         double tolerance) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::invalid_argument, "p must be positive and finite");
  auto d = std::make_shared<Data>();
  d->p = p;
  d->b1 = b1;
  d->b2 = b2;
  d->resolution = resolution;
  d->weight = Weight(0.0, ratio_power(b1, b2, p), 1.0);
  d->key = "sigma|" + number(p) + "|" + std::to_string(resolution) + "|" + b1.to_json().dump() + "|" +
           b2.to_json().dump();
  const auto& form = d->weight.power_form();
  d->identity = form && form->exponent == 0.0;

  d->C = d->weight.integral(0.0, 1.0);
  if (!std::isfinite(d->C) || !(d->C > 0.0))
    throw Error(ErrorCode::non_integrable_weight, "(b1/b2)^p is not integrable on (0,1)");

  const Grid grid = make_grid(resolution, GridScheme::geometric_toward_both_ends, 1e-14);
  const Eigen::Index n = grid.size();
  d->t.resize(n + 1);
  d->t[0] = 0.0;
  d->t.tail(n) = grid.breakpoints();
  d->s = d->t.pow(p);
  d->s[n] = 1.0;

  const auto cells = cell_integrals(grid, d->weight);
  d->head.resize(n + 1);
  d->tail.resize(n + 1);
  CompensatedSum h;
  d->head[0] = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    h.add((*cells)[i]);
    d->head[i + 1] = h.value();
  }
  CompensatedSum tl;
  d->tail[n] = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    tl.add((*cells)[i]);
    d->tail[i] = tl.value();
  }

  d->u.resize(n + 1);
  if (d->identity) {
    d->u = d->s;
  } else {
    const Inverter inv(d->weight, d->t, d->head, d->tail);
    d->u[0] = 0.0;
    d->u[n] = 1.0;
    for (Eigen::Index i = 1; i < n; ++i) {
      const double s = d->s[i];
      d->u[i] = s <= 0.5 ? inv.solve_head(d->C * s) : inv.solve_tail(d->C * one_minus_pow(d->t[i], p));
    }
    for (Eigen::Index i = 1; i <= n; ++i)
      if (!(d->u[i] > d->u[i - 1]))
        throw Error(ErrorCode::resolution_too_coarse, "sigma table is not strictly increasing at node " + std::to_string(i));
  }

  SigmaMap m(d);
  double res = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    res = std::max(res, m.point_residual(d->t[i + 1]));
    res = std::max(res, m.point_residual(0.5 * (d->t[i] + d->t[i + 1])));
  }
  d->residual = res;
  if (!(res <= tolerance))
    throw Error(ErrorCode::resolution_too_coarse,
                "sigma residual " + number(res) + " exceeds tolerance " + number(tolerance));
  return m;
}

double SigmaMap::point_residual(double t) const {
  const double p = d_->p;
  const double s = std::pow(t, p);
  const double u = contract(s);
  if (u <= 0.5) return std::abs(s - d_->weight.integral(0.0, u) / d_->C);
  return std::abs(one_minus_pow(t, p) - d_->weight.integral(u, 1.0) / d_->C);
}

double SigmaMap::contract(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (d_->identity) return s;
  const Eigen::ArrayXd& S = d_->s;
  const Eigen::Index k = std::upper_bound(S.data(), S.data() + S.size(), s) - S.data() - 1;
  const double s0 = S[k];
  const double s1 = S[k + 1];
  return d_->u[k] + (d_->u[k + 1] - d_->u[k]) * ((s - s0) / (s1 - s0));
}

double SigmaMap::dilate(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  if (d_->identity) return s;
  if (s <= 0.5) return d_->weight.integral(0.0, s) / d_->C;
  return 1.0 - d_->weight.integral(s, 1.0) / d_->C;
}

double SigmaMap::dilate_gap(double s) const {
  if (s <= 0.0 || s >= 1.0 || d_->identity) return 0.0;
  if (s <= 0.5) return (d_->weight.integral(0.0, s) - d_->C * s) / d_->C;
  return (1.0 - s) - d_->weight.integral(s, 1.0) / d_->C;
}

double SigmaMap::sigma(double t) const {
  const double p = d_->p;
  const double u = contract(p == 1.0 ? t : std::pow(t, p));
  return p == 1.0 ? u : std::pow(u, 1.0 / p);
}

double SigmaMap::sigma_inverse(double t) const {
  const double p = d_->p;
  const double v = dilate(p == 1.0 ? t : std::pow(t, p));
  return p == 1.0 ? v : std::pow(v, 1.0 / p);
}

Eigen::ArrayXd SigmaMap::forward() const {
  return d_->p == 1.0 ? d_->u : d_->u.pow(1.0 / d_->p).eval();
}

Grid SigmaMap::pullback(const Grid& grid) const {
  if (d_->identity) return grid;
  return *grid.memo<Grid>("pullback|" + d_->key, [&] {
    const Eigen::Index n = grid.size();
    Eigen::ArrayXd out(n);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      // Newton steps on the exact dilate() so that dilate maps the pulled
      // cells onto the original ones to rounding accuracy.
      const double x = grid.right(j);
      double y = contract(x);
      for (int it = 0; it < 3 && y > 0.0 && y < 1.0; ++it) {
        const double next = y - (dilate(y) - x) * d_->C / d_->weight(y);
        if (!(next > 0.0 && next < 1.0) || next == y) break;
        y = next;
      }
      out[j] = y;
      const double floor = j == 0 ? 0.0 : out[j - 1];
      if (!(out[j] > floor)) out[j] = std::nextafter(floor, 1.0);
    }
    out[n - 1] = 1.0;
    return Grid::from_breakpoints(std::move(out), grid.scheme());
  });
}

void SigmaMap::write_csv(std::ostream& out, const std::string& provenance) const {
  out << "# " << provenance << "\n";
  out << "t,sigma,sigma_inv,residual\n";
  auto row = [&](double t) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.6e\n", t, sigma(t), sigma_inverse(t),
                  t == 0.0 ? 0.0 : point_residual(t));
    out << buf;
  };
  const Eigen::ArrayXd& t = d_->t;
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    row(t[i]);
    row(0.5 * (t[i] + t[i + 1]));
  }
  row(1.0);
}

RatioRange sigma_inverse_asymptotic_check(const SigmaMap& m) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  const double p = m.p();
  for (double t : m.nodes()) {
    if (t < 1e-8 || t > 1.0 - 1e-8) continue;
    const double L = 1.0 - p * std::log(t);
    const double ratio = m.sigma_inverse(t) / (t * m.b1().at_log(L) / m.b2().at_log(L));
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
  }
  return r;
}

DominationReport sigma_domination_check(const SigmaMap& m) {
  const Monotonicity mono = ratio_power(m.b1(), m.b2(), 1.0).monotonicity();
  if (!is_nonincreasing(mono))
    throw Error(ErrorCode::precondition_violation,
                std::string("b1/b2 must be nonincreasing, classified as ") + to_string(mono));
  DominationReport rep;
  rep.strictly_decreasing_ratio = mono == Monotonicity::strictly_decreasing;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (double t : m.nodes()) {
    if (t <= 0.0 || t >= 1.0) continue;
    ++rep.points;
    if (m.dilate(t) < t) ++rep.violations;
    const double gap = m.dilate_gap(t);
    if (!(gap > 0.0)) ++rep.non_strict;
    rep.min_gap = std::min(rep.min_gap, gap);
  }
  rep.holds = rep.violations == 0;
  rep.strict = rep.holds && rep.non_strict == 0;
  return rep;
}

RemarkCRanges bp_remark_c_check(const SigmaMap& m) {
  const double inf = std::numeric_limits<double>::infinity();
  RemarkCRanges r{{inf, 0.0}, {inf, 0.0}};
  for (double t : m.nodes()) {
    if (t <= 0.0 || t >= 1.0) continue;
    const double b = m.b1().at_log(ell(t));
    const double a = b / m.b1().at_log(ell(m.dilate(t)));
    const double c = b / m.b1().at_log(ell(m.contract(t)));
    r.via_inverse.min = std::min(r.via_inverse.min, a);
    r.via_inverse.max = std::max(r.via_inverse.max, a);
    r.via_forward.min = std::min(r.via_forward.min, c);
    r.via_forward.max = std::max(r.via_forward.max, c);
  }
  return r;
}

RatioRange sigma_derivative_diagnostic(const SigmaMap& m) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  const Eigen::ArrayXd& t = m.nodes();
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i) {
    const double slope = m.weight().integral(t[i], t[i + 1]) / m.C() / (t[i + 1] - t[i]);
    const double ratio = slope / m.weight()(t[i]);
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
  }
  return r;
}

}  // namespace rikit
