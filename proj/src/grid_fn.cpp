#include "rikit/grid_fn.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rikit {

const char* to_string(GridScheme scheme) noexcept {
  switch (scheme) {
    case GridScheme::geometric_toward_zero: return "geometric-toward-0";
    case GridScheme::geometric_toward_both_ends: return "geometric-toward-both-ends";
    case GridScheme::uniform: return "uniform";
  }
  return "unknown";
}

GridScheme grid_scheme_from_string(const std::string& name) {
  if (name == "geometric-toward-0") return GridScheme::geometric_toward_zero;
  if (name == "geometric-toward-both-ends") return GridScheme::geometric_toward_both_ends;
  if (name == "uniform") return GridScheme::uniform;
  throw Error(ErrorCode::invalid_argument, "unknown grid scheme '" + name + "'");
}

Grid Grid::from_breakpoints(Eigen::ArrayXd breakpoints, GridScheme scheme) {
  if (breakpoints.size() == 0) throw Error(ErrorCode::invalid_argument, "grid needs at least one cell");
  if (breakpoints[breakpoints.size() - 1] != 1.0)
    throw Error(ErrorCode::invalid_argument, "last breakpoint must be 1");
  double prev = 0.0;
  for (Eigen::Index i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > prev)) throw Error(ErrorCode::invalid_argument, "breakpoints must increase strictly");
    prev = breakpoints[i];
  }
  Grid grid;
  grid.data_ = std::make_shared<Data>();
  grid.data_->breakpoints = std::move(breakpoints);
  grid.data_->scheme = scheme;
  return grid;
}

Eigen::ArrayXd Grid::representatives() const {
  Eigen::ArrayXd reps(size());
  for (Eigen::Index i = 0; i < size(); ++i) reps[i] = representative(i);
  return reps;
}

Eigen::ArrayXd Grid::widths() const {
  Eigen::ArrayXd w(size());
  for (Eigen::Index i = 0; i < size(); ++i) w[i] = width(i);
  return w;
}

Eigen::Index Grid::locate(double t) const {
  const auto& x = data_->breakpoints;
  const double* begin = x.data();
  const double* end = begin + x.size();
  const double* it = std::upper_bound(begin, end, t);
  return std::min<Eigen::Index>(it - begin, x.size() - 1);
}

namespace {

// Cells of a geometric partition of [0, total] with first width `first`:
// x_i = first * expm1((i+1) q) / expm1(q).
Eigen::ArrayXd geometric_partition(Eigen::Index cells, double first, double total) {
  auto covered = [&](double q) { return first * std::expm1(cells * q) / std::expm1(q); };
  double lo = 0.0;
  double hi = std::log(total / first) / std::max<Eigen::Index>(cells - 1, 1) + 1.0;
  while (covered(hi) < total) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || covered(mid) < total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double q = 0.5 * (lo + hi);
  const double denom = std::expm1(q);
  Eigen::ArrayXd x(cells);
  for (Eigen::Index i = 0; i < cells; ++i) x[i] = first * std::expm1((i + 1) * q) / denom;
  x[cells - 1] = total;
  return x;
}

}  // namespace

Grid make_grid(Eigen::Index size, GridScheme scheme, double min_cell) {
  if (size < 8) throw Error(ErrorCode::invalid_argument, "grid size must be at least 8");
  if (!(min_cell > 0.0) || !(min_cell < 1.0 / static_cast<double>(size)))
    throw Error(ErrorCode::invalid_argument, "min_cell must lie in (0, 1/size)");

  Eigen::ArrayXd x(size);
  switch (scheme) {
    case GridScheme::uniform:
      for (Eigen::Index i = 0; i < size; ++i) x[i] = static_cast<double>(i + 1) / static_cast<double>(size);
      break;
    case GridScheme::geometric_toward_zero:
      x = geometric_partition(size, min_cell, 1.0);
      break;
    case GridScheme::geometric_toward_both_ends: {
      const Eigen::Index left = (size + 1) / 2;
      const Eigen::Index right = size - left;
      Eigen::ArrayXd lx = geometric_partition(left, min_cell, 0.5);
      Eigen::ArrayXd rx = geometric_partition(right, min_cell, 0.5);
      x.head(left) = lx;
      for (Eigen::Index k = 0; k + 1 < right; ++k) x[left + k] = 1.0 - rx[right - 2 - k];
      break;
    }
  }
  x[size - 1] = 1.0;
  return Grid::from_breakpoints(std::move(x), scheme);
}

Grid common_refinement(const Grid& a, const Grid& b) {
  if (a.same_as(b)) return a;
  const auto& xa = a.breakpoints();
  const auto& xb = b.breakpoints();
  std::vector<double> merged;
  merged.reserve(static_cast<std::size_t>(xa.size() + xb.size()));
  std::merge(xa.data(), xa.data() + xa.size(), xb.data(), xb.data() + xb.size(), std::back_inserter(merged));
  std::vector<double> out;
  out.reserve(merged.size());
  for (double v : merged) {
    if (!out.empty() && v - out.back() <= 4.0 * std::numeric_limits<double>::epsilon() * v) continue;
    out.push_back(v);
  }
  out.back() = 1.0;
  Eigen::ArrayXd x = Eigen::Map<Eigen::ArrayXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  if (x.size() == xa.size()) return a;
  if (x.size() == xb.size()) return b;
  return Grid::from_breakpoints(std::move(x), a.scheme());
}

StepFunction::StepFunction(Grid grid, Eigen::ArrayXd values, Monotone flag)
    : grid_(std::move(grid)), values_(std::move(values)), monotone_(flag) {
  if (values_.size() != grid_.size()) throw Error(ErrorCode::invalid_argument, "value count differs from cell count");
  if (!values_.isFinite().all()) throw Error(ErrorCode::invalid_argument, "step function values must be finite");
  if (monotone_ == Monotone::nonincreasing && !values_nonincreasing())
    throw Error(ErrorCode::invalid_argument, "values flagged nonincreasing are not");
}

StepFunction StepFunction::constant(const Grid& grid, double c) {
  return StepFunction(grid, Eigen::ArrayXd::Constant(grid.size(), c), Monotone::nonincreasing);
}

StepFunction StepFunction::sample(const Grid& grid, const std::function<double(double)>& fn) {
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.representative(i));
  StepFunction f(grid, std::move(v));
  if (f.values_nonincreasing()) f.monotone_ = Monotone::nonincreasing;
  return f;
}

StepFunction StepFunction::indicator(const Grid& grid, double a) {
  return sample(grid, [a](double t) { return t < a ? 1.0 : 0.0; });
}

bool StepFunction::values_nonincreasing() const {
  for (Eigen::Index i = 1; i < values_.size(); ++i)
    if (values_[i] > values_[i - 1]) return false;
  return true;
}

StepFunction StepFunction::on_grid(const Grid& finer) const {
  if (finer.same_as(grid_)) return *this;
  Eigen::ArrayXd v(finer.size());
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < finer.size(); ++i) {
    const double mid = 0.5 * (finer.left(i) + finer.right(i));
    while (j + 1 < grid_.size() && grid_.right(j) <= mid) ++j;
    v[i] = values_[j];
  }
  return StepFunction(finer, std::move(v), monotone_);
}

StepFunction StepFunction::abs() const {
  StepFunction f(grid_, values_.abs());
  if (f.values_nonincreasing()) f.monotone_ = Monotone::nonincreasing;
  return f;
}

StepFunction StepFunction::abs_pow(double q) const {
  Eigen::ArrayXd v = values_.abs();
  if (q != 1.0) v = v.pow(q);
  StepFunction f(grid_, std::move(v));
  if (f.values_nonincreasing()) f.monotone_ = Monotone::nonincreasing;
  return f;
}

StepFunction StepFunction::scaled(double c) const {
  const Monotone flag = c >= 0.0 ? monotone_ : Monotone::unknown;
  return StepFunction(grid_, values_ * c, flag);
}

QuadratureResult integrate(const StepFunction& f, double a, double b) {
  if (!(a <= b)) throw Error(ErrorCode::invalid_argument, "integrate needs a <= b");
  if (a < 0.0 || b > 1.0) throw Error(ErrorCode::invalid_argument, "integration bounds must lie in [0, 1]");
  const Grid& g = f.grid();
  CompensatedSum sum;
  if (a == b) return {};
  for (Eigen::Index i = g.locate(a); i < g.size(); ++i) {
    const double lo = std::max(a, g.left(i));
    const double hi = std::min(b, g.right(i));
    if (hi > lo) sum.add(f.value(i) * (hi - lo));
    if (g.right(i) >= b) break;
  }
  return {sum.value(), 0.0};
}

double integrate_product(const StepFunction& f, const StepFunction& g) {
  // Merge sweep over both breakpoint sequences; no refined grid is built.
  const Eigen::ArrayXd& a = f.grid().breakpoints();
  const Eigen::ArrayXd& b = g.grid().breakpoints();
  CompensatedSum sum;
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double x = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(a[i], b[j]);
    sum.add(f.value(i) * g.value(j) * (next - x));
    x = next;
    if (a[i] == next) ++i;
    if (b[j] == next) ++j;
  }
  return sum.value();
}

StepFunction pointwise_max(const StepFunction& f, const StepFunction& g) {
  const Grid grid = common_refinement(f.grid(), g.grid());
  StepFunction ff = f.on_grid(grid);
  StepFunction gg = g.on_grid(grid);
  StepFunction out(grid, ff.values().max(gg.values()));
  return out.values_nonincreasing() ? StepFunction(grid, out.values(), Monotone::nonincreasing) : out;
}

StepFunction pointwise_sum(const StepFunction& f, const StepFunction& g) {
  const Grid grid = common_refinement(f.grid(), g.grid());
  StepFunction ff = f.on_grid(grid);
  StepFunction gg = g.on_grid(grid);
  StepFunction out(grid, ff.values() + gg.values());
  return out.values_nonincreasing() ? StepFunction(grid, out.values(), Monotone::nonincreasing) : out;
}

StepFunction compose_with_monotone(const StepFunction& f, const MonotoneMap& phi) {
  const Grid& g = f.grid();
  Eigen::ArrayXd v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double s = phi.fn(g.representative(i));
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::domain_error, "composed map leaves [0, 1]");
    v[i] = f(s);
  }
  const bool keep = f.monotone() == Monotone::nonincreasing && phi.nondecreasing;
  return StepFunction(g, std::move(v), keep ? Monotone::nonincreasing : Monotone::unknown);
}

}  // namespace rikit
