#pragma once

// Nonincreasing rearrangement f*, the maximal function f**, and the Hardy
// lemma / Hardy-Littlewood-Polya test utilities.

#include "rikit/grid_fn.hpp"

#include <cstdint>
#include <random>

namespace rikit {

class SpaceSpec;

/// f* as a step function. Cells of |f| are sorted by value (descending,
/// ties by cell index) and laid out from 0 with their original widths; the
/// new breakpoints are exact partial sums of those widths, so level sets
/// keep their measure bit for bit. When the sorted widths coincide with the
/// original ones the input grid object is reused.
StepFunction rearrangement(const StepFunction& f);

/// t -> (1/t) int_0^t f*(s) ds at the representatives of f*'s grid.
StepFunction maximal_rearrangement(const StepFunction& f);

/// Measure of {|f| > lambda}, summed exactly.
double distribution(const StepFunction& f, double lambda);

struct ImplicationReport {
  bool hypothesis = false;
  bool conclusion = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool implication_holds() const { return !hypothesis || conclusion; }
};

/// Hypothesis: int_0^t f <= int_0^t g at every breakpoint of the common
/// refinement. Conclusion: int f h <= int g h.
ImplicationReport hardy_lemma_check(const StepFunction& f, const StepFunction& g, const StepFunction& h);

/// Hypothesis: int_0^t f* <= int_0^t g* at every breakpoint. Conclusion:
/// ||f|| <= ||g|| (1 + 1e-12) in the given r.i. Banach norm.
ImplicationReport hlp_check(const StepFunction& f, const StepFunction& g, const SpaceSpec& norm);

/// Generators for the randomized Hardy and HLP suites. All of them draw from
/// a caller-owned engine so runs are reproducible.
namespace random_fn {

double uniform01(std::mt19937_64& rng);
double exponential(std::mt19937_64& rng);

/// Nonnegative step function with exponential values.
StepFunction nonnegative(const Grid& grid, std::mt19937_64& rng);
/// Nonincreasing nonnegative step function (sorted exponential values).
StepFunction nonincreasing(const Grid& grid, std::mt19937_64& rng);
/// f obtained from g by moving mass to later cells, so that the Hardy
/// hypothesis holds by construction.
StepFunction delayed_mass(const StepFunction& g, std::mt19937_64& rng);
/// A function whose rearrangement is majorized by g*: block averages of g*
/// scattered by a random permutation.
StepFunction majorized(const StepFunction& g, std::mt19937_64& rng);

}  // namespace random_fn

}  // namespace rikit
