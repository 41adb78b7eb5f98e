#pragma once

// Scenario-driven verification campaigns: S against U, the main theorem's
// computable links, the l^alpha / l^{-beta} membership table, K-functional
// oracle consistency and the Gaussian preset.

#include "rikit/dictionary.hpp"
#include "rikit/grid_fn.hpp"
#include "rikit/karamata.hpp"
#include "rikit/report.hpp"
#include "rikit/spaces.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rikit {

struct GridConfig {
  Eigen::Index size = 8192;
  GridScheme scheme = GridScheme::geometric_toward_zero;
  double min_cell = 1e-10;
};

struct Tolerances {
  double residual = 1e-6;         // sigma defining-identity residual
  double stability = 0.05;        // relative change allowed between N and 2N
  double equivalence_band = 100;  // largest accepted two-sided equivalence constant
};

struct BpTableConfig {
  std::vector<double> ps{1.0, 2.0};
  std::vector<double> alphas{0, 0.1, 0.25, 0.5, 0.75, 1, 1.5, 2, 3};
  std::vector<double> betas{0, 0.1, 0.25, 0.5, 0.75, 1, 1.5, 2, 3};
};

struct Scenario {
  double p = 1.0;
  SlowlyVarying b1 = SlowlyVarying::one();
  SlowlyVarying b2 = SlowlyVarying::one();
  SpaceSpec X = SpaceSpec::lebesgue(2.0);
  SpaceSpec Y = SpaceSpec::lebesgue(2.0);
  GridConfig grid;
  DictionaryConfig dictionary;
  std::uint64_t seed = 20240601;
  Tolerances tolerances;
  /// Bound, as a multiple of max(||U||, ||S o *||), allowed for the other
  /// operators of the family in the main-theorem link.
  double link_multiple = 4.0;
  /// Allow dictionary lower bounds where an associate norm has no closed form.
  bool allow_dictionary_associates = true;
  BpTableConfig bp_table;

  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
  std::string hash() const;

  /// p = 1, b1 = l^{1/2}, b2 = l^{-1/2}, X = Y = L^2.
  static Scenario gaussian_preset();
};

enum class CheckVerdict { pass, fail, unstable, info };
const char* to_string(CheckVerdict v) noexcept;

struct CheckResult {
  std::string name;
  CheckVerdict verdict = CheckVerdict::info;
  std::optional<ConstantReport> report;
  nlohmann::json details = nlohmann::json::object();
};

struct CampaignReport {
  std::string campaign;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::vector<long long> resolutions;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  /// 0 when every gated check passes, 4 on any failed inequality, 3 on
  /// instability only.
  int exit_code() const;
  nlohmann::json to_json() const;
  const CheckResult* find(const std::string& name) const;
};

/// Extrapolated lim_{s -> 0+} b2(s)^p int_s^1 dtau / (tau b1(tau)^p) from
/// s in {1e-4, 1e-6, 1e-8}, fitting D(s) = D_inf + B l(s)^{-rho}.
struct LimitEstimate {
  std::vector<std::pair<double, double>> samples;  // (s, D(s))
  double limit = 0.0;
  double rate = 0.0;  // rho; infinity when the samples are constant
  bool converges = false;
};
LimitEstimate limit_condition(const SlowlyVarying& b1, const SlowlyVarying& b2, double p);

CampaignReport verify_S_dominated_by_U(const Scenario& scenario);
CampaignReport verify_main_theorem_links(const Scenario& scenario);
CampaignReport verify_k_consistency(const Scenario& scenario);
CampaignReport gaussian_preset_report(const Scenario& scenario = Scenario::gaussian_preset());

/// Gaussibility constant at N and 2N of the operator described by `op`
/// (see operator_from_json), gated on the B_p check.
CampaignReport gaussibility_report(const Scenario& scenario, const nlohmann::json& op);

struct BpTableRow {
  double p = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  Verdict numeric = Verdict::inconclusive;
  bool analytic = false;
  double surface_distance = 0.0;
  bool excluded = false;
  /// Inconclusive numeric verdicts never count as agreement.
  bool match() const {
    return excluded || (numeric == Verdict::pass && analytic) || (numeric == Verdict::fail && !analytic);
  }
};
std::vector<BpTableRow> bp_example_table(double p, const std::vector<double>& alphas, const std::vector<double>& betas);
CampaignReport bp_table_report(const Scenario& scenario);

}  // namespace rikit
