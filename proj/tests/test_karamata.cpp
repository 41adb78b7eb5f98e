#include "rikit/error.hpp"
#include "rikit/karamata.hpp"
#include "rikit/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace rikit;

using SV = SlowlyVarying;

TEST_CASE("eval_sv examples") {
  CHECK(eval_sv(SV::atom(0.0), 0.3) == 1.0);
  CHECK(eval_sv(SV::atom(1.0), std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-15));
  const SV half = SV::atom(0.5);
  const SV prod = SV::product({half, half});
  for (double t : {1e-300, 1e-8, 0.01, 0.5, 0.999})
    CHECK(std::abs(eval_sv(prod, t) - ell(t)) <= 1e-14 * ell(t));
  CHECK_THROWS_AS(eval_sv(half, 0.0), Error);
  CHECK_THROWS_AS(eval_sv(half, 1.0), Error);
}

TEST_CASE("algebra closure keeps power forms") {
  const SV b = SV::power(SV::product({SV::atom(0.5), SV::atom(-1.5)}), 2.0);
  REQUIRE(b.has_closed_form());
  CHECK(b.power_form()->exponent == -2.0);
  CHECK(b.monotonicity() == Monotonicity::strictly_increasing);
  CHECK(SV::atom(0.25).monotonicity() == Monotonicity::strictly_decreasing);
  CHECK(SV::one().monotonicity() == Monotonicity::constant);

  const SV mix = SV::lincomb({{1.0, SV::atom(0.5)}, {2.0, SV::atom(1.0)}});
  CHECK_FALSE(mix.has_closed_form());
  CHECK(mix.monotonicity() == Monotonicity::strictly_decreasing);
  CHECK(mix.at_log(5.0) == doctest::Approx(std::sqrt(5.0) + 10.0).epsilon(1e-15));
}

TEST_CASE("evaluation in log coordinates survives underflow in t") {
  const SV b = SV::atom(-0.75);
  CHECK(b.at_log(1e6) == doctest::Approx(std::pow(1e6, -0.75)).epsilon(1e-14));
}

TEST_CASE("json round trip") {
  const SV b = SV::lincomb({{0.5, SV::power(SV::atom(0.5), 3.0)}, {1.5, SV::product({SV::atom(1.0), SV::atom(-0.25)})}});
  const SV c = SV::from_json(b.to_json());
  CHECK(c.to_json() == b.to_json());
  for (double L : {1.0, 2.0, 40.0}) CHECK(c.at_log(L) == b.at_log(L));
  CHECK_THROWS_AS(SV::from_json(nlohmann::json{{"frobnicate", 1}}), Error);
}

TEST_CASE("ratio_power") {
  const SV r = ratio_power(SV::atom(0.5), SV::atom(-0.5), 1.0);
  REQUIRE(r.has_closed_form());
  CHECK(r.power_form()->exponent == 1.0);
  CHECK(r.monotonicity() == Monotonicity::strictly_decreasing);
}

TEST_CASE("sv_integral_property examples") {
  const Grid g = make_grid(2048, GridScheme::geometric_toward_zero, 1e-12);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const RatioRange r = sv_integral_property_check(SV::one(), alpha, g);
    CHECK(r.min == doctest::Approx(1.0 / alpha).epsilon(1e-12));
    CHECK(r.max == doctest::Approx(1.0 / alpha).epsilon(1e-12));
  }
  // int_0^t l = t (2 - log t), so the ratio is (1 + l(t)) / l(t): in (1, 2].
  const RatioRange l1 = sv_integral_property_check(SV::atom(1.0), 1.0, g);
  CHECK(l1.min >= 1.0);
  CHECK(l1.max <= 2.0 + 1e-12);
  CHECK(l1.min == doctest::Approx((1 + ell(1e-12)) / ell(1e-12)).epsilon(1e-10));

  const RatioRange lm = sv_integral_property_check(SV::atom(-0.5), 1.0, g);
  CHECK(lm.bounded(4.0));
}

TEST_CASE("t^eps b(t) tends to zero") {
  const SV dict[] = {SV::atom(0.5), SV::atom(3.0), SV::atom(-1.0),
                     SV::lincomb({{1.0, SV::atom(2.0)}, {1.0, SV::atom(0.5)}})};
  for (const SV& b : dict)
    for (double eps : {0.05, 0.2, 1.0}) {
      // t = e^{-x}: log(t^eps b(t)) = -eps x + log b at L = 1 + x.
      const double x = 1e5;
      CHECK(-eps * x + std::log(b.at_log(1.0 + x)) < -100.0);
    }
}

TEST_CASE("membership examples") {
  CHECK(in_class_Bp(SV::atom(0.5), SV::atom(-0.5), 1.0).verdict == Verdict::pass);
  CHECK(in_class_Bp(SV::one(), SV::one(), 1.0).verdict == Verdict::fail);
  CHECK(in_class_Bp(SV::atom(2.0), SV::one(), 1.0).verdict == Verdict::pass);
  CHECK(in_class_Bp(SV::atom(1.0), SV::one(), 2.0).verdict == Verdict::pass);
  CHECK(in_class_Bp(SV::atom(0.25), SV::atom(-0.75), 1.0).verdict == Verdict::pass);
  // Both weights decreasing breaks opposite monotonicity.
  const BpReport same_dir = in_class_Bp(SV::atom(1.0), SV::atom(1.0), 1.0);
  CHECK(same_dir.condition_b == Verdict::fail);
  CHECK(same_dir.verdict == Verdict::fail);
}

TEST_CASE("analytic predicate") {
  CHECK(bp_analytic_predicate(0.5, 0.5, 1.0));
  CHECK_FALSE(bp_analytic_predicate(0.0, 0.0, 1.0));
  CHECK(bp_analytic_predicate(1.0, 0.0, 2.0));
  CHECK_FALSE(bp_analytic_predicate(0.5, 0.0, 2.0));
  CHECK(bp_analytic_predicate(0.0, 1.0, 1.0));
  CHECK_FALSE(bp_analytic_predicate(0.25, 0.5, 1.0));
  CHECK(bp_surface_distance(0.25, 0.5, 1.0) == 0.25);
}

TEST_CASE("tail integral and the far-field function") {
  // b1 = l^{1/2}, p = 1: int_s^1 dtau / (tau l^{1/2}) = 2 (L^{1/2} - 1).
  for (double L : {1.5, 10.0, 1e4})
    CHECK(tail_log_integral(SV::atom(0.5), 1.0, L) == doctest::Approx(2 * (std::sqrt(L) - 1)).epsilon(1e-14));
  // Times b2 = l^{-1/2} this tends to 2.
  CHECK(condition_d_function(SV::atom(0.5), SV::atom(-0.5), 1.0, 1e12) == doctest::Approx(2.0).epsilon(1e-5));
  // b1 = l^{1/2} + 1 has no power form and goes through quadrature:
  // int_1^L dv / (v^{1/2} + 1) = 2 (w - log(1 + w)) from w = 1 to L^{1/2}.
  const SV b1 = SV::lincomb({{1.0, SV::atom(0.5)}, {1.0, SV::one()}});
  REQUIRE_FALSE(b1.has_closed_form());
  auto F = [](double w) { return 2 * (w - std::log1p(w)); };
  for (double L : {2.0, 50.0, 1e6})
    CHECK(tail_log_integral(b1, 1.0, L) == doctest::Approx(F(std::sqrt(L)) - F(1.0)).epsilon(1e-10));
}

TEST_CASE("report json carries every condition") {
  const auto j = in_class_Bp(SV::atom(0.5), SV::atom(-0.5), 1.0).to_json();
  for (const char* key : {"condition_a", "condition_b", "condition_c", "condition_d", "verdict"})
    CHECK(j.contains(key));
}
