#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/rearrange.hpp"
#include "rikit/spaces.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace rikit;

namespace {

// Random signed values on a random nonuniform grid.
StepFunction random_signed(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::ArrayXd w(n);
  for (auto& x : w) x = 0.05 + random_fn::uniform01(rng);
  Eigen::ArrayXd bp(n);
  double acc = 0.0;
  const double total = w.sum();
  for (Eigen::Index i = 0; i < n; ++i) bp[i] = (acc += w[i]) / total;
  bp[n - 1] = 1.0;
  Eigen::ArrayXd v(n);
  for (auto& x : v) x = std::round(8 * (random_fn::uniform01(rng) - 0.5)) / 4;  // ties on purpose
  return StepFunction(Grid::from_breakpoints(bp, GridScheme::uniform), v);
}

}  // namespace

TEST_CASE("constant rearranges to its modulus") {
  const Grid g = make_grid(32, GridScheme::geometric_toward_zero, 1e-6);
  const StepFunction fs = rearrangement(StepFunction::constant(g, -3.0));
  CHECK((fs.values() == 3.0).all());
  CHECK(fs.grid().same_as(g));
}

TEST_CASE("indicator of a scattered set rearranges to an initial interval") {
  const Grid g = make_grid(8, GridScheme::uniform, 1e-3);
  Eigen::ArrayXd v(8);
  v << 0, 1, 0, 0, 1, 1, 0, 0;
  const StepFunction fs = rearrangement(StepFunction(g, v));
  CHECK(integrate(fs, 0.0, 1.0).value == 0.375);
  CHECK(fs(0.37) == 1.0);
  CHECK(fs(0.38) == 0.0);
}

TEST_CASE("values come out sorted with cumulative widths") {
  std::mt19937_64 rng(3);
  const StepFunction f = random_signed(rng, 40);
  const StepFunction fs = rearrangement(f);
  std::vector<std::pair<double, double>> pairs;
  for (Eigen::Index i = 0; i < f.size(); ++i) pairs.emplace_back(std::abs(f.value(i)), f.grid().width(i));
  std::stable_sort(pairs.begin(), pairs.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double acc = 0.0;
  for (Eigen::Index k = 0; k < fs.size(); ++k) {
    acc += pairs[static_cast<std::size_t>(k)].second;
    CHECK(fs.value(k) == pairs[static_cast<std::size_t>(k)].first);
    CHECK(fs.grid().right(k) == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("equimeasurability is exact") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const StepFunction f = random_signed(rng, 3 + static_cast<Eigen::Index>(rng() % 60));
    const StepFunction fs = rearrangement(f);
    // Every level of |f|, just below it, and below zero.
    for (Eigen::Index i = 0; i < f.size(); ++i)
      for (double lambda : {std::abs(f.value(i)), std::abs(f.value(i)) - 1e-3, std::nextafter(std::abs(f.value(i)), -1.0), -1.0})
        CHECK(distribution(f, lambda) == distribution(fs, lambda));
  }
}

TEST_CASE("rearrangement is idempotent") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const StepFunction fs = rearrangement(random_signed(rng, 50));
    const StepFunction fss = rearrangement(fs);
    CHECK(fss.grid().same_as(fs.grid()));
    CHECK((fss.values() == fs.values()).all());
  }
}

TEST_CASE("Lp norms are preserved") {
  std::mt19937_64 rng(23);
  for (double q : {1.0, 2.0, 3.5}) {
    const SpaceSpec Lq = SpaceSpec::lebesgue(q);
    for (int trial = 0; trial < 100; ++trial) {
      const StepFunction f = random_signed(rng, 64);
      const double a = norm(Lq, f);
      const double b = norm(Lq, rearrangement(f));
      CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
    }
  }
}

TEST_CASE("maximal rearrangement examples") {
  const Grid g = make_grid(256, GridScheme::geometric_toward_zero, 1e-6);
  CHECK((maximal_rearrangement(StepFunction::constant(g, 1.0)).values() - 1.0).abs().maxCoeff() < 1e-14);

  const double a = g.right(150);
  const StepFunction fss = maximal_rearrangement(StepFunction::indicator(g, a));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double t = g.representative(i);
    CHECK(fss.value(i) == doctest::Approx(std::min(1.0, a / t)).epsilon(1e-13));
  }

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const StepFunction f = random_signed(rng, 80);
    const StepFunction fs = rearrangement(f);
    const StepFunction m = maximal_rearrangement(f);
    CHECK((fs.values() <= m.values() * (1 + 1e-14)).all());
  }
}

TEST_CASE("Hardy lemma on trivial inputs") {
  const Grid g = make_grid(64, GridScheme::uniform, 1e-3);
  std::mt19937_64 rng(31);
  const StepFunction f = random_fn::nonnegative(g, rng);
  const StepFunction h = random_fn::nonincreasing(g, rng);
  auto rep = hardy_lemma_check(f, f, h);
  CHECK(rep.hypothesis);
  CHECK(rep.conclusion);
  const StepFunction bigger(g, f.values() + 0.5);
  rep = hardy_lemma_check(f, bigger, StepFunction::constant(g, 1.0));
  CHECK(rep.hypothesis);
  CHECK(rep.conclusion);
  CHECK_THROWS_AS(hardy_lemma_check(f, f, f), Error);
}

TEST_CASE("Hardy lemma: 1000 seeded triples") {
  std::mt19937_64 rng(20240601);
  int hypothesis = 0, violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Grid grid = make_grid(8 + static_cast<Eigen::Index>(rng() % 120),
                                trial % 2 ? GridScheme::uniform : GridScheme::geometric_toward_zero, 1e-4);
    const StepFunction g = random_fn::nonnegative(grid, rng);
    const StepFunction f = random_fn::delayed_mass(g, rng);
    const StepFunction h = random_fn::nonincreasing(grid, rng);
    const auto rep = hardy_lemma_check(f, g, h);
    hypothesis += rep.hypothesis;
    violations += !rep.implication_holds();
  }
  CHECK(hypothesis == 1000);
  CHECK(violations == 0);
}

TEST_CASE("HLP examples") {
  const Grid g = make_grid(8, GridScheme::uniform, 1e-3);
  const StepFunction f = StepFunction::indicator(g, 0.25);
  const StepFunction h = StepFunction::indicator(g, 0.5);
  const auto same = hlp_check(f, f, SpaceSpec::lebesgue(2.0));
  CHECK(same.hypothesis);
  CHECK(same.conclusion);
  const auto rep = hlp_check(f, h, SpaceSpec::lebesgue(1.0));
  CHECK(rep.hypothesis);
  CHECK(rep.lhs == 0.25);
  CHECK(rep.rhs == 0.5);
  CHECK_THROWS_AS(hlp_check(f, h, SpaceSpec::lebesgue(0.5)), Error);
}

TEST_CASE("HLP: 1000 seeded pairs per norm") {
  const SpaceSpec norms[] = {SpaceSpec::lebesgue(2.0), SpaceSpec::karamata(1.0, SlowlyVarying::atom(0.5))};
  for (const SpaceSpec& X : norms) {
    std::mt19937_64 rng(77);
    int hypothesis = 0, violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Grid grid = make_grid(8 + static_cast<Eigen::Index>(rng() % 120),
                                  trial % 2 ? GridScheme::uniform : GridScheme::geometric_toward_zero, 1e-4);
      const StepFunction g = random_fn::nonnegative(grid, rng);
      const StepFunction f = random_fn::majorized(g, rng);
      const auto rep = hlp_check(f, g, X);
      hypothesis += rep.hypothesis;
      violations += !rep.implication_holds();
    }
    CHECK(hypothesis == 1000);
    CHECK(violations == 0);
  }
}
