#include "rikit/dictionary.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace rikit {

namespace {

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

}  // namespace

DictionaryConfig DictionaryConfig::from_json(const nlohmann::json& j) {
  DictionaryConfig c;
  if (j.is_null()) return c;
  c.indicators = j.value("indicators", c.indicators);
  c.random = j.value("random", c.random);
  c.powers = j.value("powers", c.powers);
  c.logs = j.value("logs", c.logs);
  c.products = j.value("products", c.products);
  if (c.indicators < 0 || c.random < 0) throw Error(ErrorCode::invalid_argument, "dictionary counts must be >= 0");
  return c;
}

nlohmann::json DictionaryConfig::to_json() const {
  return {{"indicators", indicators}, {"random", random}, {"powers", powers}, {"logs", logs}, {"products", products}};
}

std::vector<LabeledFunction> function_dictionary(const Grid& grid, double p, const DictionaryConfig& config,
                                                 std::uint64_t seed) {
  std::vector<LabeledFunction> out;
  const Eigen::ArrayXd& bp = grid.breakpoints();

  for (int i = 0; i < config.indicators; ++i) {
    const double frac = config.indicators == 1 ? 1.0 : static_cast<double>(i) / (config.indicators - 1);
    const double target = std::exp(std::log(1e-8) + frac * (std::log(0.5) - std::log(1e-8)));
    Eigen::Index k = std::lower_bound(bp.data(), bp.data() + bp.size(), target) - bp.data();
    k = std::min<Eigen::Index>(k, bp.size() - 1);
    if (k > 0 && target - bp[k - 1] < bp[k] - target) --k;
    out.push_back({fmt("chi(0,%.3g)", target), StepFunction::indicator(grid, bp[k])});
  }

  const double gammas[] = {0.1, 0.25, 0.45};
  const double deltas[] = {-1.0, -0.5, 0.5, 1.0};
  if (config.powers)
    for (double g : gammas) {
      const double e = g / p;
      out.push_back({fmt("t^-%.2g/p", g), StepFunction::sample(grid, [e](double t) { return std::pow(t, -e); })});
    }
  if (config.logs)
    for (double d : deltas)
      out.push_back({fmt("l^%.2g", d), StepFunction::sample(grid, [d](double t) { return std::pow(ell(t), d); })});
  if (config.products)
    for (double g : gammas)
      for (double d : deltas) {
        const double e = g / p;
        out.push_back({fmt("t^-%.2g/p", g) + fmt("*l^%.2g", d),
                       StepFunction::sample(grid, [e, d](double t) { return std::pow(t, -e) * std::pow(ell(t), d); })});
      }

  std::mt19937_64 rng(seed);
  for (int r = 0; r < config.random; ++r) {
    constexpr int kJumps = 32;
    std::vector<double> cuts(kJumps);
    std::vector<double> levels(kJumps + 1);
    for (double& c : cuts) c = std::exp(std::log(1e-8) * random_fn::uniform01(rng));
    for (double& v : levels) v = random_fn::exponential(rng);
    std::sort(cuts.begin(), cuts.end());
    std::sort(levels.begin(), levels.end(), std::greater<>());
    auto fn = [&](double t) {
      const auto k = std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin();
      return levels[static_cast<std::size_t>(k)];
    };
    out.push_back({"random#" + std::to_string(r), StepFunction::sample(grid, fn)});
  }
  return out;
}

}  // namespace rikit
