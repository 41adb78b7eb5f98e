#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/operators.hpp"
#include "rikit/rearrange.hpp"
#include "rikit/spaces.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rikit;

using SV = SlowlyVarying;

namespace {

// S 1 (1/10) = 2 (l(1/10)^{1/2} - 1) for b1 = l^{1/2}, p = 1, to 40 digits.
constexpr double kS1Tenth = 1.634603193194022209872955614389330064526;

const SigmaMap& gaussian() {
  static const SigmaMap m = SigmaMap::build(SV::atom(0.5), SV::atom(-0.5), 1.0, 1 << 13, 1e-5);
  return m;
}

std::vector<LabeledFunction> dictionary(const Grid& g, std::uint64_t seed = 5) {
  DictionaryConfig c;
  c.indicators = 6;
  c.random = 10;
  return function_dictionary(g, 1.0, c, seed);
}

}  // namespace

TEST_CASE("S on zero and constants") {
  const Grid g = make_grid(512, GridScheme::geometric_toward_zero, 1e-10);
  CHECK((op_S(StepFunction::constant(g, 0.0), SV::atom(0.5), 1.0).values() == 0.0).all());

  const StepFunction one = StepFunction::constant(g, 1.0);
  const StepFunction a = op_S(one, SV::one(), 1.0);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double t = a.grid().representative(j);
    CHECK(a.value(j) == doctest::Approx(-std::log(t)).epsilon(1e-13));
  }
  const StepFunction b = op_S(one, SV::atom(0.5), 1.0);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double t = b.grid().representative(j);
    CHECK(b.value(j) == doctest::Approx(2 * (std::sqrt(ell(t)) - 1)).epsilon(1e-12));
  }
}

TEST_CASE("Gaussian S 1 at 1/10 against the frozen value") {
  const Grid g = make_grid(10, GridScheme::uniform, 1e-3);
  const StepFunction s = op_S(StepFunction::constant(g, 1.0), SV::atom(0.5), 1.0);
  REQUIRE(s.grid().representative(1) == 0.1);
  CHECK(std::abs(s.value(1) - kS1Tenth) < 1e-14);
}

TEST_CASE("S for p = 2 squares the integrand") {
  // f = 1, b1 = l, p = 2: int_t^1 ds / (s l^2) = 1 - 1/l(t).
  const Grid g = make_grid(256, GridScheme::geometric_toward_zero, 1e-8);
  const StepFunction s = op_S(StepFunction::constant(g, 1.0), SV::atom(1.0), 2.0);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double t = s.grid().representative(j);
    CHECK(s.value(j) == doctest::Approx(std::sqrt(1 - 1 / ell(t))).epsilon(1e-12));
  }
}

TEST_CASE("U examples") {
  std::mt19937_64 rng(67);
  const Grid g = make_grid(300, GridScheme::uniform, 1e-4);
  const StepFunction f = random_fn::nonnegative(g, rng);
  const SigmaMap id = SigmaMap::build(SV::one(), SV::one(), 1.0, 1024);
  const StepFunction u = op_U(f, id);
  const StepFunction fs = rearrangement(f);
  CHECK((u.grid().breakpoints() == fs.grid().breakpoints()).all());
  CHECK((u.values() == fs.values()).all());

  const Grid h = make_grid(2048, GridScheme::geometric_toward_zero, 1e-10);
  const StepFunction c = op_U(StepFunction::constant(h, 2.5), gaussian());
  for (Eigen::Index j = 0; j < c.size(); ++j)
    CHECK(c.value(j) == doctest::Approx(2.5 * std::sqrt(ell(c.grid().representative(j)))).epsilon(1e-14));

  // chi_(0,a): the cut sits where sigma^{-1} crosses a.
  const double a = h.right(1500);
  const StepFunction k = op_U(StepFunction::indicator(h, a), gaussian());
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    const double t = k.grid().representative(j);
    const double expect = gaussian().dilate(k.grid().right(j)) <= a * (1 + 1e-12) ? std::sqrt(ell(t)) : 0.0;
    CHECK(k.value(j) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(k.monotone() == Monotone::nonincreasing);
}

TEST_CASE("U is an isometry from L^inf onto L^{inf,b2}") {
  const Grid g = make_grid(4096, GridScheme::geometric_toward_zero, 1e-10);
  const SpaceSpec Linf = SpaceSpec::lebesgue(INFINITY);
  const SpaceSpec Lb2 = SpaceSpec::karamata(INFINITY, SV::atom(-0.5));
  for (const auto& [label, f] : dictionary(g)) {
    const double a = norm(Linf, f);
    CHECK(std::abs(norm(Lb2, op_U(f, gaussian())) - a) <= 1e-12 * a);
  }
}

TEST_CASE("T matches a naive double loop") {
  const SigmaMap& m = gaussian();
  const Grid g = make_grid(200, GridScheme::geometric_toward_zero, 1e-8);
  for (const auto& [label, f] : dictionary(g)) {
    const StepFunction T = op_T(f, m);
    const StepFunction fs = rearrangement(f);
    const Grid& out = T.grid();
    for (Eigen::Index j = 0; j < out.size(); ++j) {
      double sup = 0.0;
      for (Eigen::Index k = j; k < out.size(); ++k) {
        const double x = m.sigma(out.representative(k));  // p = 1
        sup = std::max(sup, fs(x) / std::sqrt(ell(x)));
      }
      CHECK(T.value(j) == doctest::Approx(sup).epsilon(1e-14));
    }
  }
}

TEST_CASE("T for trivial weights and constants") {
  std::mt19937_64 rng(71);
  const Grid g = make_grid(128, GridScheme::uniform, 1e-3);
  const SigmaMap id = SigmaMap::build(SV::one(), SV::one(), 1.0, 1024);
  const StepFunction f = random_fn::nonnegative(g, rng);
  const StepFunction T = op_T(f, id);
  const StepFunction fs = rearrangement(f);
  for (Eigen::Index j = 0; j < T.size(); ++j) CHECK(T.value(j) == fs(T.grid().representative(j)));

  // f = c: T f(t) = c sup_{s >= t} b1(sigma(s))^{-1}. With b1 decreasing
  // the sup sits at the last representative.
  const StepFunction c = op_T(StepFunction::constant(g, 3.0), gaussian());
  const double last = gaussian().sigma(c.grid().representative(c.size() - 1));
  for (Eigen::Index j = 0; j < c.size(); ++j)
    CHECK(c.value(j) == doctest::Approx(3.0 / std::sqrt(ell(last))).epsilon(1e-13));
}

TEST_CASE("T recursion constant is finite and of order one") {
  const Grid g = make_grid(1024, GridScheme::geometric_toward_zero, 1e-10);
  for (const auto& [label, f] : dictionary(g)) {
    const double c = t_recursion_constant(f, gaussian());
    CHECK(std::isfinite(c));
    CHECK(c < 2.0);
  }
}

TEST_CASE("U is gaussible with constant 1") {
  const Grid g = make_grid(2048, GridScheme::geometric_toward_zero, 1e-10);
  const ConstantReport rep = gaussibility_check(OperatorHandle::U(gaussian()), gaussian(), dictionary(g));
  CHECK(std::abs(rep.constant - 1.0) <= 1e-9);
}

TEST_CASE("S o * has a finite constant that scales with a multiplier") {
  const Grid g = make_grid(2048, GridScheme::geometric_toward_zero, 1e-10);
  const auto dict = dictionary(g);
  const OperatorHandle S = OperatorHandle::S_star(SV::atom(0.5), 1.0);
  const double c = gaussibility_sweep(S, gaussian(), dict).constant;
  CHECK(std::isfinite(c));
  CHECK(c > 0.0);
  const double big = gaussibility_sweep(OperatorHandle::scaled(S, 1000.0), gaussian(), dict).constant;
  CHECK(big == doctest::Approx(1000.0 * c).epsilon(1e-12));

  // With p = 2 the integrands are squared, so the constant scales by c^2.
  const SigmaMap m2 = SigmaMap::build(SV::atom(1.0), SV::one(), 2.0, 1 << 13, 1e-5);
  const auto d2 = function_dictionary(g, 2.0, DictionaryConfig{4, 4, true, false, false}, 9);
  const OperatorHandle U2 = OperatorHandle::U(m2);
  CHECK(gaussibility_sweep(OperatorHandle::scaled(U2, 3.0), m2, d2).constant ==
        doctest::Approx(9.0 * gaussibility_sweep(U2, m2, d2).constant).epsilon(1e-12));
}

TEST_CASE("gaussibility is gated on membership") {
  const SigmaMap id = SigmaMap::build(SV::one(), SV::one(), 1.0, 1024);
  const Grid g = make_grid(256, GridScheme::geometric_toward_zero, 1e-8);
  try {
    gaussibility_check(OperatorHandle::U(id), id, dictionary(g));
    FAIL("expected precondition-violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::precondition_violation);
  }
}

TEST_CASE("operators from json") {
  const SigmaMap& m = gaussian();
  const Grid g = make_grid(512, GridScheme::geometric_toward_zero, 1e-10);
  const StepFunction f = StepFunction::sample(g, [](double t) { return std::pow(t, -0.3); });
  const OperatorHandle mix = operator_from_json(nlohmann::json::parse(R"({"scaled": {"c": 0.5, "op": {"sum": ["U", "S"]}}})"), m);
  CHECK(mix.label == "0.5*(U+S*)");
  const StepFunction direct = pointwise_sum(op_U(f, m), op_S(rearrangement(f), m.b1(), 1.0)).scaled(0.5);
  const StepFunction via = mix(f);
  CHECK((via.values() - direct.values()).abs().maxCoeff() == 0.0);

  CHECK(operator_from_json("T", m).label == "T");
  CHECK(operator_from_json(nlohmann::json::parse(R"({"rearranged": "U"})"), m).label == "(U)*");
  CHECK_THROWS_AS(operator_from_json("V", m), Error);
  CHECK_THROWS_AS(operator_from_json(nlohmann::json::parse(R"({"sum": ["U"]})"), m), Error);
}
