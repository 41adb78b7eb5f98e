#include "rikit/error.hpp"
#include "rikit/grid_fn.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rikit;

TEST_CASE("uniform grid of 8 cells") {
  const Grid g = make_grid(8, GridScheme::uniform, 1e-3);
  REQUIRE(g.size() == 8);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(g.right(i) == (i + 1) / 8.0);
  CHECK(g.left(0) == 0.0);
  CHECK(g.representative(0) == 1.0 / 16.0);
  CHECK(g.representative(3) == 3.0 / 8.0);
}

TEST_CASE("geometric grid endpoints") {
  const Grid g = make_grid(16, GridScheme::geometric_toward_zero, 1e-8);
  CHECK(g.right(0) == 1e-8);
  CHECK(g.right(15) == 1.0);
}

TEST_CASE("geometric grid has a constant width ratio") {
  const Grid g = make_grid(1024, GridScheme::geometric_toward_zero, 1e-12);
  CHECK(g.right(0) == doctest::Approx(1e-12).epsilon(1e-12));
  const double q = g.width(1) / g.width(0);
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) CHECK(g.width(i) / g.width(i - 1) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("two-ended grid is symmetric") {
  const Grid g = make_grid(1000, GridScheme::geometric_toward_both_ends, 1e-9);
  CHECK(g.width(0) == doctest::Approx(1e-9).epsilon(1e-9));
  CHECK(g.width(g.size() - 1) == doctest::Approx(1e-9).epsilon(1e-6));
  for (Eigen::Index i = 0; i < 500; ++i)
    CHECK(g.width(i) == doctest::Approx(g.width(g.size() - 1 - i)).epsilon(1e-6));
}

TEST_CASE("make_grid rejects bad parameters") {
  CHECK_THROWS_AS(make_grid(4, GridScheme::uniform, 1e-3), Error);
  CHECK_THROWS_AS(make_grid(16, GridScheme::uniform, 0.5), Error);
  CHECK_THROWS_AS(make_grid(16, GridScheme::uniform, 0.0), Error);
}

TEST_CASE("from_breakpoints validates") {
  CHECK_THROWS_AS(Grid::from_breakpoints(Eigen::ArrayXd::LinSpaced(4, 0.1, 0.9), GridScheme::uniform), Error);
  Eigen::ArrayXd bad(3);
  bad << 0.5, 0.5, 1.0;
  CHECK_THROWS_AS(Grid::from_breakpoints(bad, GridScheme::uniform), Error);
}

TEST_CASE("locate") {
  const Grid g = make_grid(8, GridScheme::uniform, 1e-3);
  CHECK(g.locate(0.0) == 0);
  CHECK(g.locate(0.125) == 1);
  CHECK(g.locate(0.99) == 7);
  CHECK(g.locate(1.0) == 7);
}

TEST_CASE("integrate examples") {
  const Grid g = make_grid(1024, GridScheme::uniform, 1e-6);
  CHECK(integrate(StepFunction::constant(g, 1.0), 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(StepFunction::indicator(g, 0.5), 0.0, 1.0).value == 0.5);
  const StepFunction id = StepFunction::sample(g, [](double t) { return t; });
  CHECK(std::abs(integrate(id, 0.0, 1.0).value - 0.5) < 1e-3);
}

TEST_CASE("integrate is additive and exact on partial cells") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = make_grid(300, GridScheme::geometric_toward_zero, 1e-6);
  Eigen::ArrayXd v(g.size());
  for (auto& x : v) x = u(rng);
  const StepFunction f(g, v);
  for (int k = 0; k < 200; ++k) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const double whole = integrate(f, a, c).value;
    CHECK(whole == doctest::Approx(integrate(f, a, b).value + integrate(f, b, c).value).epsilon(1e-12));
  }
  // Half of cell 0 of a uniform grid.
  const Grid h = make_grid(8, GridScheme::uniform, 1e-3);
  CHECK(integrate(StepFunction::constant(h, 2.0), 0.0, 1.0 / 16.0).value == 0.125);
  CHECK_THROWS_AS(integrate(f, 0.5, 0.25), Error);
}

TEST_CASE("integrate_product across grids equals integration on the refinement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid a = make_grid(97, GridScheme::geometric_toward_zero, 1e-5);
  const Grid b = make_grid(64, GridScheme::uniform, 1e-5);
  Eigen::ArrayXd va(a.size()), vb(b.size());
  for (auto& x : va) x = u(rng);
  for (auto& x : vb) x = u(rng);
  const StepFunction f(a, va), g(b, vb);
  const Grid r = common_refinement(a, b);
  const StepFunction fg(r, f.on_grid(r).values() * g.on_grid(r).values());
  CHECK(integrate_product(f, g) == doctest::Approx(integrate(fg, 0.0, 1.0).value).epsilon(1e-13));
}

TEST_CASE("common refinement keeps every breakpoint") {
  const Grid a = make_grid(8, GridScheme::uniform, 1e-3);
  const Grid b = make_grid(10, GridScheme::uniform, 1e-3);
  const Grid r = common_refinement(a, b);
  CHECK(r.size() == 16);  // 8 + 10 minus the shared 1/2 and 1
  CHECK(common_refinement(a, a).same_as(a));
}

TEST_CASE("compose_with_monotone examples") {
  const Grid g = make_grid(64, GridScheme::uniform, 1e-3);
  const StepFunction f = StepFunction::sample(g, [](double t) { return std::exp(-3 * t); });

  const StepFunction same = compose_with_monotone(f, {[](double t) { return t; }, true});
  CHECK((same.values() == f.values()).all());

  const StepFunction sq = compose_with_monotone(f, {[](double t) { return t * t; }, true});
  CHECK(sq.monotone() == Monotone::nonincreasing);
  CHECK(sq.values_nonincreasing());

  const StepFunction chi = StepFunction::indicator(g, 0.25);
  const StepFunction half = compose_with_monotone(chi, {[](double t) { return t / 2; }, true});
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(half.value(i) == (g.representative(i) < 0.5 ? 1.0 : 0.0));

  CHECK_THROWS_AS(compose_with_monotone(f, {[](double t) { return t + 2; }, true}), Error);
}

TEST_CASE("step function construction checks") {
  const Grid g = make_grid(8, GridScheme::uniform, 1e-3);
  CHECK_THROWS_AS(StepFunction(g, Eigen::ArrayXd::Zero(7)), Error);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(8);
  v[3] = NAN;
  CHECK_THROWS_AS(StepFunction(g, v), Error);
  CHECK_THROWS_AS(StepFunction(g, Eigen::ArrayXd::LinSpaced(8, 0, 1), Monotone::nonincreasing), Error);
  CHECK(StepFunction::sample(g, [](double t) { return 1 - t; }).monotone() == Monotone::nonincreasing);
}

TEST_CASE("pointwise max and sum") {
  const Grid a = make_grid(8, GridScheme::uniform, 1e-3);
  const Grid b = make_grid(10, GridScheme::uniform, 1e-3);
  const StepFunction f = StepFunction::indicator(a, 0.5);
  const StepFunction g = StepFunction::indicator(b, 0.3).scaled(2.0);
  const StepFunction m = pointwise_max(f, g);
  const StepFunction s = pointwise_sum(f, g);
  CHECK(m(0.1) == 2.0);
  CHECK(m(0.4) == 1.0);
  CHECK(m(0.9) == 0.0);
  CHECK(s(0.1) == 3.0);
  CHECK(integrate(s, 0, 1).value == doctest::Approx(0.5 + 0.6).epsilon(1e-14));
}
