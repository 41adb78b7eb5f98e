#include "rikit/rearrange.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace rikit {

StepFunction rearrangement(const StepFunction& f) {
  const Grid& grid = f.grid();
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd a = f.values().abs();

  bool sorted = true;
  for (Eigen::Index i = 1; i < n && sorted; ++i) sorted = a[i] <= a[i - 1];
  if (sorted) return StepFunction(grid, std::move(a), Monotone::nonincreasing);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a[i] > a[j]; });

  Eigen::ArrayXd values(n);
  bool same_widths = true;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    values[k] = a[src];
    if (same_widths && grid.width(src) != grid.width(k)) same_widths = false;
  }
  if (same_widths) return StepFunction(grid, std::move(values), Monotone::nonincreasing);

  Eigen::ArrayXd y(n);
  ExactSum running;
  for (Eigen::Index k = 0; k < n; ++k) {
    running.add(grid.width(order[static_cast<std::size_t>(k)]));
    y[k] = running.value();
  }
  y[n - 1] = 1.0;
  return StepFunction(Grid::from_breakpoints(std::move(y), grid.scheme()), std::move(values), Monotone::nonincreasing);
}

StepFunction maximal_rearrangement(const StepFunction& f) {
  const StepFunction fs = rearrangement(f);
  const Grid& grid = fs.grid();
  Eigen::ArrayXd out(grid.size());
  CompensatedSum prefix;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    // The first representative sits inside cell 0 where f* is constant.
    out[i] = i == 0 ? fs.value(0) : prefix.value() / grid.left(i);
    prefix.add(fs.value(i) * grid.width(i));
  }
  return StepFunction(grid, std::move(out), Monotone::nonincreasing);
}

double distribution(const StepFunction& f, double lambda) {
  const Grid& grid = f.grid();
  const Eigen::ArrayXd a = f.values().abs();
  bool sorted = true;
  for (Eigen::Index i = 1; i < a.size() && sorted; ++i) sorted = a[i] <= a[i - 1];
  if (sorted) {
    // The level set is an initial interval; its measure is a breakpoint.
    Eigen::Index m = 0;
    while (m < a.size() && a[m] > lambda) ++m;
    return m == 0 ? 0.0 : grid.right(m - 1);
  }
  ExactSum sum;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] > lambda) {
      sum.add(grid.width(i));
      ++count;
    }
  // Floating widths need not telescope to 1; the whole interval is exactly
  // the last breakpoint, as in the rearranged grid.
  return count == a.size() ? grid.right(count - 1) : sum.value();
}

namespace {

void require_nonnegative(const StepFunction& f, const char* name) {
  if ((f.values() < 0.0).any()) throw Error(ErrorCode::invalid_argument, std::string(name) + " must be nonnegative");
}

// Prefix integrals of f and g at every breakpoint of their common refinement.
bool prefix_dominated(const StepFunction& f, const StepFunction& g) {
  const Grid grid = common_refinement(f.grid(), g.grid());
  const StepFunction ff = f.on_grid(grid);
  const StepFunction gg = g.on_grid(grid);
  CompensatedSum F;
  CompensatedSum G;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    F.add(ff.value(i) * grid.width(i));
    G.add(gg.value(i) * grid.width(i));
    if (F.value() > G.value() * (1.0 + 1e-13) + 1e-300) return false;
  }
  return true;
}

}  // namespace

ImplicationReport hardy_lemma_check(const StepFunction& f, const StepFunction& g, const StepFunction& h) {
  require_nonnegative(f, "f");
  require_nonnegative(g, "g");
  require_nonnegative(h, "h");
  if (!h.values_nonincreasing()) throw Error(ErrorCode::invalid_argument, "h must be nonincreasing");
  ImplicationReport rep;
  rep.hypothesis = prefix_dominated(f, g);
  rep.lhs = integrate_product(f, h);
  rep.rhs = integrate_product(g, h);
  rep.conclusion = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-300;
  return rep;
}

ImplicationReport hlp_check(const StepFunction& f, const StepFunction& g, const SpaceSpec& norm_spec) {
  if (norm_spec.banach() != Banach::banach)
    throw Error(ErrorCode::invalid_argument, "HLP needs an r.i. Banach norm, got " + norm_spec.describe());
  ImplicationReport rep;
  rep.hypothesis = prefix_dominated(rearrangement(f), rearrangement(g));
  rep.lhs = norm(norm_spec, f);
  rep.rhs = norm(norm_spec, g);
  rep.conclusion = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-300;
  return rep;
}

namespace random_fn {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng) { return -std::log1p(-uniform01(rng)); }

StepFunction nonnegative(const Grid& grid, std::mt19937_64& rng) {
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = exponential(rng);
  return StepFunction(grid, std::move(v));
}

StepFunction nonincreasing(const Grid& grid, std::mt19937_64& rng) {
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = exponential(rng);
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return StepFunction(grid, std::move(v), Monotone::nonincreasing);
}

StepFunction delayed_mass(const StepFunction& g, std::mt19937_64& rng) {
  const Grid& grid = g.grid();
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd v = g.values();
  const int moves = 1 + static_cast<int>(rng() % 8);
  for (int m = 0; m < moves; ++m) {
    const Eigen::Index i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n - 1));
    const Eigen::Index j = i + 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n - 1 - i));
    const double mass = uniform01(rng) * v[i] * grid.width(i);
    v[i] = std::max(0.0, v[i] - mass / grid.width(i));
    v[j] += mass / grid.width(j);
  }
  return StepFunction(grid, std::move(v));
}

StepFunction majorized(const StepFunction& g, std::mt19937_64& rng) {
  const StepFunction gs = rearrangement(g);
  const Grid& grid = gs.grid();
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd v(n);
  for (Eigen::Index start = 0; start < n;) {
    const Eigen::Index len = std::min<Eigen::Index>(n - start, 1 + static_cast<Eigen::Index>(rng() % 16));
    double mass = 0.0;
    double width = 0.0;
    for (Eigen::Index k = start; k < start + len; ++k) {
      mass += gs.value(k) * grid.width(k);
      width += grid.width(k);
    }
    for (Eigen::Index k = start; k < start + len; ++k) v[k] = mass / width;
    start += len;
  }
  bool uniform = true;
  for (Eigen::Index k = 1; k < n && uniform; ++k) uniform = grid.width(k) == grid.width(0);
  if (uniform) {
    for (Eigen::Index k = n - 1; k > 0; --k) {
      const Eigen::Index r = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(v[k], v[r]);
    }
  }
  return StepFunction(grid, std::move(v));
}

}  // namespace random_fn

}  // namespace rikit
