#pragma once

// The test-function dictionary shared by the operator and theorem sweeps:
// indicators of initial intervals, power and log shapes, their products and
// seeded random nonincreasing step functions.

#include "rikit/grid_fn.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rikit {

struct LabeledFunction {
  std::string label;
  StepFunction f;
};

struct DictionaryConfig {
  int indicators = 10;   // chi_(0,a), a log-spaced in [1e-8, 1/2]
  int random = 50;       // seeded random nonincreasing functions
  bool powers = true;    // t^{-gamma/p}, gamma in {0.1, 0.25, 0.45}
  bool logs = true;      // l^delta, delta in {-1, -1/2, 1/2, 1}
  bool products = true;  // every power times every log shape

  static DictionaryConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Builds the dictionary on `grid`. Indicator levels are snapped to the
/// nearest breakpoint; random functions depend only on `seed`, not on the
/// grid, so the same shapes are resampled when the grid is refined.
std::vector<LabeledFunction> function_dictionary(const Grid& grid, double p, const DictionaryConfig& config,
                                                 std::uint64_t seed);

}  // namespace rikit
