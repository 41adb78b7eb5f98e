#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/sigma_map.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace rikit;

using SV = SlowlyVarying;

namespace {

// 40-digit values of sigma(1/2). With (b1/b2)^p = l the defining identity
// reads W(u) = u (2 - log u) = 2 t^p at u = sigma(t)^p.
constexpr double kGaussianHalf = 0.3178444328993726838328447376209491669961;
constexpr double kHalfZeroTwoHalf = 0.3489825741116867832107263131337631351648;

// Independent route: W tabulated on 2^20 uniform panels from the closed
// antiderivative of l, then bisection for W(u) = y.
double invert_W_by_panels(double y) {
  const int panels = 1 << 20;
  auto F = [](double u) { return u == 0.0 ? 0.0 : u * (2.0 - std::log(u)); };
  std::vector<double> cum(panels + 1, 0.0);
  CompensatedSum acc;
  for (int k = 0; k < panels; ++k) {
    acc.add(F((k + 1.0) / panels) - F(static_cast<double>(k) / panels));
    cum[k + 1] = acc.value();
  }
  int k = 0;
  while (cum[k + 1] < y) ++k;
  const double a = static_cast<double>(k) / panels;
  double lo = a, hi = (k + 1.0) / panels;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cum[k] + F(mid) - F(a) < y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Loose tolerance for tables used only as fixtures.
SigmaMap build(const SV& b1, const SV& b2, double p, Eigen::Index n) { return SigmaMap::build(b1, b2, p, n, 1e-3); }
SigmaMap gaussian(Eigen::Index n) { return build(SV::atom(0.5), SV::atom(-0.5), 1.0, n); }

}  // namespace

TEST_CASE("identity map") {
  const SigmaMap m = SigmaMap::build(SV::one(), SV::one(), 1.0, 1024);
  CHECK(m.identity());
  CHECK(m.residual() <= 1e-12);
  for (double t : {0.0, 1e-9, 0.3, 0.5, 0.999, 1.0}) {
    CHECK(m.sigma(t) == t);
    CHECK(m.sigma_inverse(t) == t);
  }
  const SigmaMap m2 = SigmaMap::build(SV::atom(0.7), SV::atom(0.7), 2.0, 1024);
  CHECK(m2.identity());
  CHECK(m2.sigma(0.3) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("endpoints are fixed") {
  for (const SigmaMap& m : {gaussian(512), build(SV::atom(0.5), SV::one(), 2.0, 512)}) {
    CHECK(m.sigma(0.0) == 0.0);
    CHECK(m.sigma(1.0) == 1.0);
    CHECK(m.sigma_inverse(0.0) == 0.0);
    CHECK(m.sigma_inverse(1.0) == 1.0);
  }
}

TEST_CASE("Gaussian sigma(1/2) against the frozen oracle") {
  // The independent route agrees with the frozen digits...
  CHECK(std::abs(invert_W_by_panels(1.0) - kGaussianHalf) < 1e-14);
  // ...and the table, where 1/2 is a node, is Newton-exact there.
  const SigmaMap m = SigmaMap::build(SV::atom(0.5), SV::atom(-0.5), 1.0, 1 << 14);
  CHECK(m.C() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(m.sigma(0.5) - kGaussianHalf) < 1e-14);
  CHECK(m.sigma_inverse(kGaussianHalf) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sigma(1/2) for b1 = l^{1/2}, b2 = 1, p = 2") {
  CHECK(std::abs(std::sqrt(invert_W_by_panels(0.5)) - kHalfZeroTwoHalf) < 1e-14);
  const SigmaMap m = SigmaMap::build(SV::atom(0.5), SV::one(), 2.0, 1 << 14);
  CHECK(std::abs(m.sigma(0.5) - kHalfZeroTwoHalf) < 1e-14);
}

TEST_CASE("sigma inverts sigma_inverse between nodes") {
  const SigmaMap m = gaussian(1 << 13);
  for (double t : {1e-9, 1e-5, 0.01, 0.2, 0.61, 0.97}) {
    CHECK(m.sigma(m.sigma_inverse(t)) == doctest::Approx(t).epsilon(1e-5));
    CHECK(m.sigma_inverse(t) >= t);
  }
}

TEST_CASE("residual at 2^14 and its decay at 2^15") {
  struct Case {
    SV b1, b2;
    double p;
  };
  const Case cases[] = {{SV::atom(0.5), SV::atom(-0.5), 1.0},
                        {SV::atom(0.25), SV::atom(-0.75), 1.0},
                        {SV::atom(0.5), SV::one(), 2.0}};
  for (const Case& c : cases) {
    const double r14 = SigmaMap::build(c.b1, c.b2, c.p, 1 << 14).residual();
    const double r15 = SigmaMap::build(c.b1, c.b2, c.p, 1 << 15).residual();
    CHECK(r14 <= 1e-6);
    CHECK(r15 <= 0.5 * r14);
  }
}

TEST_CASE("coarse tables are rejected") {
  try {
    SigmaMap::build(SV::atom(0.5), SV::atom(-0.5), 1.0, 16);
    FAIL("expected resolution-too-coarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resolution_too_coarse);
  }
}

TEST_CASE("asymptotic ratio of sigma inverse") {
  const RatioRange one = sigma_inverse_asymptotic_check(SigmaMap::build(SV::one(), SV::one(), 1.0, 1024));
  CHECK(one.min == 1.0);
  CHECK(one.max == 1.0);
  CHECK(sigma_inverse_asymptotic_check(gaussian(1 << 13)).bounded(4.0));
  CHECK(sigma_inverse_asymptotic_check(build(SV::atom(1.0), SV::one(), 1.0, 1 << 13)).bounded(4.0));
}

TEST_CASE("domination") {
  const DominationReport id = sigma_domination_check(SigmaMap::build(SV::one(), SV::one(), 1.0, 1024));
  CHECK(id.holds);
  CHECK(id.non_strict == id.points);

  const DominationReport g = sigma_domination_check(gaussian(1 << 13));
  CHECK(g.holds);
  CHECK(g.strict);
  CHECK(g.strictly_decreasing_ratio);

  const DominationReport h = sigma_domination_check(build(SV::atom(0.5), SV::one(), 2.0, 1 << 13));
  CHECK(h.holds);
  CHECK(h.violations == 0);

  CHECK_THROWS_AS(sigma_domination_check(build(SV::atom(-1.0), SV::one(), 1.0, 1 << 12)), Error);
}

TEST_CASE("remark c ranges") {
  const RemarkCRanges one = bp_remark_c_check(build(SV::one(), SV::atom(-0.5), 1.0, 1 << 12));
  CHECK(one.via_inverse.min == 1.0);
  CHECK(one.via_forward.max == 1.0);
  for (const SigmaMap& m : {gaussian(1 << 13), build(SV::atom(0.25), SV::atom(-0.75), 1.0, 1 << 13)}) {
    const RemarkCRanges r = bp_remark_c_check(m);
    CHECK(r.via_inverse.bounded(4.0));
    CHECK(r.via_forward.bounded(4.0));
  }
}

TEST_CASE("pullback cells map exactly onto the original cells") {
  const SigmaMap m = gaussian(1 << 13);
  const Grid g = make_grid(4096, GridScheme::geometric_toward_zero, 1e-10);
  const Grid pb = m.pullback(g);
  REQUIRE(pb.size() == g.size());
  CHECK(m.pullback(g).same_as(pb));  // memoized
  double worst = 0.0;
  for (Eigen::Index j = 0; j + 1 < g.size(); ++j)
    worst = std::max(worst, std::abs(m.dilate(pb.right(j)) - g.right(j)) / g.right(j));
  CHECK(worst < 1e-13);
}

TEST_CASE("derivative of sigma inverse is comparable to the weight") {
  // Cell slopes of W / C over (b1/b2)^p at the left node: 1/C up to the
  // variation of l across one cell.
  const SigmaMap m = gaussian(1 << 13);
  const RatioRange r = sigma_derivative_diagnostic(m);
  CHECK(r.min > 0.95 / m.C());
  CHECK(r.max <= (1 + 1e-12) / m.C());
}

TEST_CASE("csv output") {
  std::ostringstream out;
  gaussian(1024).write_csv(out, "test");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# test");
  std::getline(in, line);
  CHECK(line == "t,sigma,sigma_inv,residual");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 * 1024 + 1);
}
