// Command-line front end: sigma tables, K-functional comparisons,
// gaussibility sweeps and the verification campaigns.

#include "rikit/error.hpp"
#include "rikit/harness.hpp"
#include "rikit/kfunc.hpp"
#include "rikit/sigma_map.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace rikit;

namespace {

// Exit statuses besides the campaign ones (0, 3, 4).
constexpr int kUsage = 1;
constexpr int kPrecondition = 2;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// Writes to `path`, or stdout for "-".
void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + path + "'");
  out << text;
}

std::string provenance(const Scenario& s, long long N) {
  return "scenario " + s.hash() + " N=" + std::to_string(N) + " seed=" + std::to_string(s.seed);
}

// {"breakpoints": [...], "values": [...]}
StepFunction function_from_json(const nlohmann::json& j) {
  const auto bp = j.at("breakpoints").get<std::vector<double>>();
  const auto v = j.at("values").get<std::vector<double>>();
  Eigen::ArrayXd x = Eigen::Map<const Eigen::ArrayXd>(bp.data(), static_cast<Eigen::Index>(bp.size()));
  Eigen::ArrayXd y = Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return StepFunction(Grid::from_breakpoints(std::move(x), GridScheme::uniform), std::move(y));
}

int run_sigma(const Scenario& s, long long resolution, const std::string& out) {
  const long long N = resolution > 0 ? resolution : 2 * static_cast<long long>(s.grid.size);
  const SigmaMap m = SigmaMap::build(s.b1, s.b2, s.p, N, s.tolerances.residual);
  std::ostringstream text;
  m.write_csv(text, provenance(s, N));
  write_text(out, text.str());
  return 0;
}

int run_kfunc(const Scenario& s, const std::string& function, const std::string& couple_name,
              const std::string& out) {
  const Grid grid = make_grid(s.grid.size, s.grid.scheme, s.grid.min_cell);
  std::optional<StepFunction> g;
  for (auto& [label, f] : function_dictionary(grid, s.p, s.dictionary, s.seed))
    if (label == function) g = f;
  if (!g) g = function_from_json(read_json(function));
  Couple couple = Couple::karamata;
  if (couple_name == "lp-linf") couple = Couple::lp_linf;
  else if (couple_name != "karamata") throw Error(ErrorCode::invalid_argument, "couple must be karamata or lp-linf");
  const SigmaMap m = SigmaMap::build(s.b1, s.b2, s.p, 2 * s.grid.size, s.tolerances.residual);
  std::vector<double> ts;
  for (Eigen::Index k = 0; k + 1 < grid.size(); ++k) ts.push_back(grid.right(k));
  std::ostringstream text;
  write_k_csv(text, k_comparison(*g, couple, m, ts), provenance(s, static_cast<long long>(grid.size())));
  write_text(out, text.str());
  return 0;
}

int emit(const CampaignReport& rep, const std::string& out) {
  write_text(out, rep.to_json().dump(2) + "\n");
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rikit: reduction-principle numerics for Orlicz-Karamata spaces"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out = "-";
  auto scenario_options = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file (the Gaussian preset if omitted)");
    sub->add_option("--out", out, "output file, '-' for stdout");
  };

  long long resolution = 0;
  auto* sigma = app.add_subcommand("sigma", "tabulate sigma and its inverse as CSV");
  scenario_options(sigma);
  sigma->add_option("--resolution", resolution, "table cells (default twice the grid size)");

  std::string function;
  std::string couple = "karamata";
  auto* kfunc = app.add_subcommand("kfunc", "closed-form against brute-force K-functional as CSV");
  scenario_options(kfunc);
  kfunc->add_option("--function", function, "dictionary label or function JSON file")->required();
  kfunc->add_option("--couple", couple, "karamata or lp-linf");

  std::string op = "U";
  auto* gaussible = app.add_subcommand("gaussible", "gaussibility constant of an operator");
  scenario_options(gaussible);
  gaussible->add_option("--op", op, "U, S, T or an operator JSON file");

  std::string campaign;
  auto* verify = app.add_subcommand("verify", "run a verification campaign");
  scenario_options(verify);
  verify->add_option("campaign", campaign, "s-vs-u, main-links, bp-table, gaussian or k-oracle")
      ->required()
      ->check(CLI::IsMember({"s-vs-u", "main-links", "bp-table", "gaussian", "k-oracle"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const Scenario s = scenario_path.empty() ? Scenario::gaussian_preset() : Scenario::from_json(read_json(scenario_path));
    if (sigma->parsed()) return run_sigma(s, resolution, out);
    if (kfunc->parsed()) return run_kfunc(s, function, couple, out);
    if (gaussible->parsed()) {
      const nlohmann::json spec = (op == "U" || op == "S" || op == "T") ? nlohmann::json(op) : read_json(op);
      return emit(gaussibility_report(s, spec), out);
    }
    if (campaign == "s-vs-u") return emit(verify_S_dominated_by_U(s), out);
    if (campaign == "main-links") return emit(verify_main_theorem_links(s), out);
    if (campaign == "bp-table") return emit(bp_table_report(s), out);
    if (campaign == "gaussian") return emit(gaussian_preset_report(s), out);
    return emit(verify_k_consistency(s), out);
  } catch (const Error& e) {
    std::cerr << "rikit: " << e.what() << "\n";
    return e.code() == ErrorCode::precondition_violation ? kPrecondition : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "rikit: " << e.what() << "\n";
    return kUsage;
  }
}
