#pragma once

// Best-constant reports with grid-refinement stability metadata.

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace rikit {

struct Resolution {
  long long N = 0;
  double constant = 0.0;
};

/// sup of LHS/RHS over a family of functions and evaluation points. The
/// constant and argmax come from the finest resolution.
struct ConstantReport {
  double constant = 0.0;
  std::string argmax_function_label;
  double argmax_t = 0.0;
  std::vector<Resolution> resolutions;

  /// Relative change between the two finest resolutions (0 with fewer).
  double relative_change() const {
    if (resolutions.size() < 2) return 0.0;
    const double a = resolutions[resolutions.size() - 2].constant;
    const double b = resolutions.back().constant;
    if (a == b) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) return INFINITY;
    return std::abs(b - a) / std::max(std::abs(a), std::abs(b));
  }
  bool finite() const { return std::isfinite(constant); }
  bool stable(double tolerance) const { return finite() && resolutions.size() >= 2 && relative_change() <= tolerance; }

  /// Records a sample LHS/RHS; 0/0 counts as 0.
  void observe(double lhs, double rhs, const std::string& label, double t) {
    double ratio = 0.0;
    if (rhs > 0.0) ratio = lhs / rhs;
    else if (lhs > 0.0) ratio = INFINITY;
    if (ratio > constant || (argmax_function_label.empty() && ratio == constant)) {
      constant = ratio;
      argmax_function_label = label;
      argmax_t = t;
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& r : resolutions) res.push_back({{"N", r.N}, {"constant", finite_or_string(r.constant)}});
    return {{"constant", finite_or_string(constant)},
            {"argmax_function_label", argmax_function_label},
            {"argmax_t", argmax_t},
            {"resolutions", res}};
  }

  static nlohmann::json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  }
};

/// Combines single-resolution reports (coarse first) into one.
inline ConstantReport combine_resolutions(const std::vector<ConstantReport>& runs) {
  ConstantReport out;
  for (const auto& r : runs)
    for (const auto& res : r.resolutions) out.resolutions.push_back(res);
  if (!runs.empty()) {
    out.constant = runs.back().constant;
    out.argmax_function_label = runs.back().argmax_function_label;
    out.argmax_t = runs.back().argmax_t;
  }
  return out;
}

}  // namespace rikit
