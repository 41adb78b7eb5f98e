#pragma once

// K-functionals for the couples (L^p, L^inf) and (L^{p,b1}, L^{inf,b2}):
// closed formulas and a brute-force search over truncation decompositions.

#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"
#include "rikit/sigma_map.hpp"
#include "rikit/weight.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rikit {

enum class KMethod { explicit_formula, brute_force };
enum class Couple { lp_linf, karamata };

const char* to_string(KMethod m) noexcept;
const char* to_string(Couple c) noexcept;

struct KEstimate {
  double value = 0.0;
  KMethod method = KMethod::explicit_formula;
  double t = 0.0;
  Couple couple = Couple::lp_linf;
  std::optional<double> witness;  // cut level lambda, brute force only
};

/// (int_0^{min(t,1)^p} f*^p)^{1/p}, precomputed for repeated t.
class LpLinfK {
 public:
  LpLinfK(const StepFunction& f, double p);
  KEstimate operator()(double t) const;

 private:
  double p_;
  WeightedPrimitive prim_;
};

/// I(g)(t) = (int_0^{sigma(t)^p} [g* b1]^p)^{1/p}
///         + t sup_{sigma(t)^p <= s < 1} g*(s) b2(s),
/// with the sup over representatives at or after sigma(t)^p together with
/// the point sigma(t)^p itself.
class ExplicitKaramataK {
 public:
  ExplicitKaramataK(const StepFunction& g, const SigmaMap& m);
  KEstimate operator()(double t) const;

 private:
  SigmaMap m_;
  StepFunction gs_;
  WeightedPrimitive prim_;
  Eigen::ArrayXd suffix_max_;
};

/// Minimum over cut levels lambda in {distinct g* values} U {0} of
///   ||(|g| - lambda)_+||_{X0} + t ||min(|g|, lambda)||_{X1}.
/// Each lambda contributes a line A + t B; the minimum over lambda is their
/// lower envelope, so every query costs one binary search. For integer p the
/// line table is built in O(N p) by binomial shifts of nonnegative moments;
/// other p use the direct O(N K) sum.
class BruteForceK {
 public:
  /// couple lp_linf ignores b1, b2.
  BruteForceK(const StepFunction& g, Couple couple, double p, const SlowlyVarying& b1 = SlowlyVarying::one(),
              const SlowlyVarying& b2 = SlowlyVarying::one());
  KEstimate operator()(double t) const;
  std::size_t candidate_count() const { return candidates_; }

 private:
  struct Line {
    double a;
    double b;
    double lambda;
  };
  Couple couple_;
  std::vector<Line> hull_;
  std::vector<double> cross_;  // hull_[i] is optimal for t in [cross_[i-1], cross_[i]]
  std::size_t candidates_ = 0;
};

KEstimate k_lp_linf(const StepFunction& f, double t, double p);
KEstimate k_explicit_karamata(const StepFunction& g, double t, const SigmaMap& m);
KEstimate k_bruteforce(const StepFunction& g, double t, Couple couple, double p,
                       const SlowlyVarying& b1 = SlowlyVarying::one(), const SlowlyVarying& b2 = SlowlyVarying::one());

struct KComparisonRow {
  double t = 0.0;
  double k_explicit = 0.0;
  double k_bruteforce = 0.0;
  double ratio = 0.0;  // brute force over explicit
  std::optional<double> lambda_witness;
};

/// Closed formula against brute force for one couple at each t in (0, 1);
/// the (L^p, L^inf) couple uses m.p() and ignores the weights.
std::vector<KComparisonRow> k_comparison(const StepFunction& g, Couple couple, const SigmaMap& m,
                                         const std::vector<double>& ts);

/// Columns t, K_explicit, K_bruteforce, ratio, lambda_witness after a
/// "# provenance" line.
void write_k_csv(std::ostream& out, const std::vector<KComparisonRow>& rows, const std::string& provenance);

struct ChainReport {
  /// Best constants of the four equivalent inequality forms, in order:
  /// explicit K bound, gaussible integral form, truncated integral form,
  /// weighted-sup form.
  std::array<double, 4> constants{};
  std::array<double, 4> argmax_t{};
  bool all_finite() const;
};

/// Evaluates the four forms on the given t values (points outside (0, 1]
/// are skipped).
ChainReport k_inequality_chain_check(const StepFunction& f, const StepFunction& g, const SigmaMap& m,
                                     const std::vector<double>& ts);

}  // namespace rikit
