#include "rikit/harness.hpp"

#include "rikit/error.hpp"
#include "rikit/kfunc.hpp"
#include "rikit/numerics.hpp"
#include "rikit/operators.hpp"
#include "rikit/rearrange.hpp"
#include "rikit/sigma_map.hpp"
#include "rikit/weight.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace rikit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json num(double x) { return ConstantReport::finite_or_string(x); }

// ---------------------------------------------------------------- scenario

GridConfig grid_from_json(const nlohmann::json& j) {
  GridConfig g;
  if (j.is_null()) return g;
  g.size = j.value("size", static_cast<long long>(g.size));
  if (j.contains("scheme")) g.scheme = grid_scheme_from_string(j.at("scheme").get<std::string>());
  g.min_cell = j.value("min_cell", g.min_cell);
  return g;
}

// ---------------------------------------------------------------- sweeps

// One refinement level of a campaign: the function grid, the sigma table
// (at twice the grid resolution) and the dictionary sampled on the grid.
struct Level {
  long long N = 0;
  Grid grid;
  SigmaMap map;
  std::vector<LabeledFunction> dict;
};

Level make_level(const Scenario& s, Eigen::Index N, GridScheme scheme) {
  const Grid grid = make_grid(N, scheme, s.grid.min_cell);
  SigmaMap map = SigmaMap::build(s.b1, s.b2, s.p, 2 * N, s.tolerances.residual);
  return {static_cast<long long>(N), grid, map, function_dictionary(grid, s.p, s.dictionary, s.seed)};
}

std::vector<Level> make_levels(const Scenario& s, GridScheme scheme) {
  std::vector<Level> out;
  out.push_back(make_level(s, s.grid.size, scheme));
  out.push_back(make_level(s, 2 * s.grid.size, scheme));
  return out;
}

std::vector<long long> level_sizes(const std::vector<Level>& levels) {
  std::vector<long long> out;
  for (const auto& l : levels) out.push_back(l.N);
  return out;
}

// Runs `body(label, f, report)` for each dictionary function in parallel and
// folds the per-function reports in dictionary order.
template <class Body>
ConstantReport dict_sweep(const Level& lv, Body body) {
  std::vector<ConstantReport> parts(lv.dict.size());
  detail::parallel_for(lv.dict.size(), [&](std::size_t i) { body(lv.dict[i].label, lv.dict[i].f, parts[i]); });
  ConstantReport rep = detail::fold_reports(parts);
  rep.resolutions.push_back({lv.N, rep.constant});
  return rep;
}

void gate_bp(const Scenario& s) {
  const BpReport bp = in_class_Bp(s.b1, s.b2, s.p);
  if (bp.verdict != Verdict::pass)
    throw Error(ErrorCode::precondition_violation, "(b1, b2) not certified in B_p (verdict " +
                                                       std::string(to_string(bp.verdict)) + "): " + bp.to_json().dump());
}

void gate_convexity(const Scenario& s) {
  if (!s.X.p_convex(s.p))
    throw Error(ErrorCode::precondition_violation, "X = " + s.X.describe() + " is not certified p-convex");
  if (!s.Y.p_convex(s.p))
    throw Error(ErrorCode::precondition_violation, "Y = " + s.Y.describe() + " is not certified p-convex");
}

std::vector<double> merged_breakpoints(const Grid& a, const Grid& b) {
  std::vector<double> ts(a.breakpoints().data(), a.breakpoints().data() + a.size());
  ts.insert(ts.end(), b.breakpoints().data(), b.breakpoints().data() + b.size());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// M(i, j) = int A_i B_j. Functions are grouped by grid object; a block of
// at least four functions on each side is one GEMM F diag(w) G^T on the common
// refinement of the two grids, smaller blocks use the merge sweep.
Eigen::MatrixXd cross_integrals(const std::vector<StepFunction>& A, const std::vector<StepFunction>& B) {
  auto groups = [](const std::vector<StepFunction>& fs) {
    std::vector<std::vector<std::size_t>> out;
    std::map<const void*, std::size_t> where;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      auto [it, fresh] = where.emplace(fs[i].grid().id(), out.size());
      if (fresh) out.emplace_back();
      out[it->second].push_back(i);
    }
    return out;
  };
  Eigen::MatrixXd M(A.size(), B.size());
  for (const auto& ga : groups(A))
    for (const auto& gb : groups(B)) {
      if (ga.size() < 4 || gb.size() < 4) {
        for (std::size_t r : ga)
          for (std::size_t c : gb) M(r, c) = integrate_product(A[r], B[c]);
        continue;
      }
      const Grid grid = common_refinement(A[ga[0]].grid(), B[gb[0]].grid());
      Eigen::MatrixXd F(ga.size(), grid.size());
      Eigen::MatrixXd G(gb.size(), grid.size());
      for (std::size_t r = 0; r < ga.size(); ++r) F.row(r) = A[ga[r]].on_grid(grid).values().matrix().transpose();
      for (std::size_t r = 0; r < gb.size(); ++r) G.row(r) = B[gb[r]].on_grid(grid).values().matrix().transpose();
      const Eigen::MatrixXd block = F * grid.widths().matrix().asDiagonal() * G.transpose();
      for (std::size_t r = 0; r < ga.size(); ++r)
        for (std::size_t c = 0; c < gb.size(); ++c) M(ga[r], gb[c]) = block(r, c);
    }
  return M;
}

CheckResult constant_check(const std::string& name, const std::vector<ConstantReport>& runs, double stability,
                           double bound = kInf) {
  CheckResult c;
  c.name = name;
  c.report = combine_resolutions(runs);
  const ConstantReport& r = *c.report;
  if (!r.finite() || r.constant > bound) c.verdict = CheckVerdict::fail;
  else if (!r.stable(stability)) c.verdict = CheckVerdict::unstable;
  else c.verdict = CheckVerdict::pass;
  c.details["relative_change"] = num(r.relative_change());
  if (std::isfinite(bound)) c.details["bound"] = bound;
  return c;
}

CampaignReport new_report(const std::string& name, const Scenario& s, const std::vector<Level>& levels) {
  CampaignReport rep;
  rep.campaign = name;
  rep.scenario_hash = s.hash();
  rep.seed = s.seed;
  rep.resolutions = level_sizes(levels);
  return rep;
}

// ---------------------------------------------------------------- S vs U

// Fubini form of int_0^t int_s^1 f*^p / (tau b1^p) dtau ds against
// int_0^t f*(sigma^{-1}(s^{1/p})^p)^p b2^{-p} ds.
ConstantReport s_vs_u_pointwise(const Level& lv, const Scenario& s) {
  const double p = s.p;
  const Weight w_head(0.0, s.b1, -p);
  const Weight w_tail(-1.0, s.b1, -p);
  const Weight w_rhs(0.0, s.b2, -p);
  return dict_sweep(lv, [&](const std::string& label, const StepFunction& f, ConstantReport& rep) {
    const StepFunction fs = rearrangement(f);
    const WeightedPrimitive head(fs, p, w_head);
    const WeightedPrimitive tail(fs, p, w_tail);
    const Grid pulled = lv.map.pullback(fs.grid());
    Eigen::ArrayXd v(pulled.size());
    for (Eigen::Index j = 0; j < pulled.size(); ++j) v[j] = fs(lv.map.dilate(0.5 * (pulled.left(j) + pulled.right(j))));
    const WeightedPrimitive rhs(StepFunction(pulled, std::move(v)), p, w_rhs);
    for (double t : merged_breakpoints(fs.grid(), pulled)) {
      const double lhs = head.head(t) + (t < 1.0 ? t * tail.tail(t) : 0.0);
      rep.observe(lhs, rhs.head(t), label, t);
    }
  });
}

ConstantReport s_vs_u_norm(const Level& lv, const Scenario& s, const SpaceSpec& Y) {
  const AssociatePolicy policy =
      s.allow_dictionary_associates ? AssociatePolicy::dictionary_lower_bound : AssociatePolicy::exact;
  return dict_sweep(lv, [&](const std::string& label, const StepFunction& f, ConstantReport& rep) {
    const StepFunction fs = rearrangement(f);
    rep.observe(norm(Y, op_S(fs, s.b1, s.p), policy), norm(Y, op_U(f, lv.map), policy), label, 0.0);
  });
}

// ---------------------------------------------------------------- links

ConstantReport operator_bound(const Level& lv, const Scenario& s, const OperatorHandle& op) {
  const AssociatePolicy policy =
      s.allow_dictionary_associates ? AssociatePolicy::dictionary_lower_bound : AssociatePolicy::exact;
  return dict_sweep(lv, [&](const std::string& label, const StepFunction& f, ConstantReport& rep) {
    rep.observe(norm(s.Y, op(f), policy), norm(s.X, f, policy), label, 0.0);
  });
}

// sup over (f, g) of int (op f)*^p g* / int f*^p T g.
ConstantReport duality_chain(const Level& lv, const Scenario& s, const OperatorHandle& op) {
  const std::size_t n = lv.dict.size();
  std::vector<std::optional<StepFunction>> parts(4 * n);
  detail::parallel_for(n, [&](std::size_t i) {
    const StepFunction& f = lv.dict[i].f;
    const StepFunction fs = rearrangement(f);
    parts[4 * i] = rearrangement(op(f)).abs_pow(s.p);
    parts[4 * i + 1] = fs.abs_pow(s.p);
    parts[4 * i + 2] = fs;
    parts[4 * i + 3] = op_T(f, lv.map);
  });
  std::vector<StepFunction> opf, fp, gs, tg;
  for (std::size_t i = 0; i < n; ++i) {
    opf.push_back(*parts[4 * i]);
    fp.push_back(*parts[4 * i + 1]);
    gs.push_back(*parts[4 * i + 2]);
    tg.push_back(*parts[4 * i + 3]);
  }
  const Eigen::MatrixXd lhs = cross_integrals(opf, gs);
  const Eigen::MatrixXd rhs = cross_integrals(fp, tg);
  ConstantReport rep;
  for (std::size_t i = 0; i < lv.dict.size(); ++i)
    for (std::size_t j = 0; j < lv.dict.size(); ++j)
      rep.observe(lhs(i, j), rhs(i, j), lv.dict[i].label + " | " + lv.dict[j].label, 0.0);
  rep.resolutions.push_back({lv.N, rep.constant});
  return rep;
}

// ||T g||_{(X^{1/p})'} / ||g||_{(Y^{1/p})'} over the standard dual dictionary.
ConstantReport dual_link(const Level& lv, const Scenario& s, bool& lower_bound_only) {
  const SpaceSpec Xa = SpaceSpec::associate(SpaceSpec::power(s.X, s.p).simplified());
  const SpaceSpec Ya = SpaceSpec::associate(SpaceSpec::power(s.Y, s.p).simplified());
  lower_bound_only = !Xa.base().closed_associate() || !Ya.base().closed_associate();
  if (lower_bound_only && !s.allow_dictionary_associates)
    throw Error(ErrorCode::unsupported_space, "(X^{1/p})' or (Y^{1/p})' has no closed form");
  if (!Ya.base().closed_associate())
    throw Error(ErrorCode::unsupported_space, "(Y^{1/p})' needs a closed form for the denominator");
  const AssociatePolicy policy = AssociatePolicy::dictionary_lower_bound;
  const auto& duals = standard_dual_dictionary(lv.grid);
  std::vector<ConstantReport> parts(duals.size());
  detail::parallel_for(duals.size(), [&](std::size_t k) {
    const StepFunction& g = duals[k];
    parts[k].observe(norm(Xa, op_T(g, lv.map), policy), norm(Ya, g, policy), "dual#" + std::to_string(k), 0.0);
  });
  ConstantReport rep = detail::fold_reports(parts);
  rep.resolutions.push_back({lv.N, rep.constant});
  return rep;
}

// ---------------------------------------------------------------- preset

// Weights l^{-1/2} on the left and l^{-1} on the right with the argument
// s log(e / sqrt(s)) written out directly.
ConstantReport display_form(const Level& lv, const OperatorHandle& op) {
  const SlowlyVarying l = SlowlyVarying::atom(1.0);
  const Weight w_lhs(0.0, l, -0.5);
  const Weight w_rhs(0.0, l, -1.0);
  return dict_sweep(lv, [&](const std::string& label, const StepFunction& f, ConstantReport& rep) {
    const StepFunction fs = rearrangement(f);
    const StepFunction lhs_fn = rearrangement(op(f));
    const Grid pulled = lv.map.pullback(fs.grid());
    Eigen::ArrayXd v(pulled.size());
    for (Eigen::Index j = 0; j < pulled.size(); ++j) {
      const double s = 0.5 * (pulled.left(j) + pulled.right(j));
      v[j] = fs(s * (1.0 - 0.5 * std::log(s)));
    }
    const WeightedPrimitive lhs(lhs_fn, 1.0, w_lhs);
    const WeightedPrimitive rhs(StepFunction(pulled, std::move(v)), 1.0, w_rhs);
    for (double t : merged_breakpoints(lhs_fn.grid(), pulled)) rep.observe(lhs.head(t), rhs.head(t), label, t);
  });
}

void append_prefixed(CampaignReport& into, const CampaignReport& from, const std::string& prefix) {
  for (CheckResult c : from.checks) {
    c.name = prefix + c.name;
    into.checks.push_back(std::move(c));
  }
  for (const auto& n : from.notes) into.notes.push_back(prefix + n);
}

}  // namespace

// ---------------------------------------------------------------- Scenario

Scenario Scenario::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "scenario must be a JSON object");
  for (const char* key : {"p", "b1", "b2"})
    if (!j.contains(key)) throw Error(ErrorCode::invalid_argument, std::string("scenario is missing \"") + key + "\"");
  Scenario s;
  s.p = j.at("p").get<double>();
  if (!(s.p > 0.0) || !std::isfinite(s.p)) throw Error(ErrorCode::invalid_argument, "scenario p must be positive");
  s.b1 = SlowlyVarying::from_json(j.at("b1"));
  s.b2 = SlowlyVarying::from_json(j.at("b2"));
  if (j.contains("X")) s.X = SpaceSpec::from_json(j.at("X"));
  if (j.contains("Y")) s.Y = SpaceSpec::from_json(j.at("Y"));
  s.grid = grid_from_json(j.value("grid", nlohmann::json()));
  if (s.grid.size < 8) throw Error(ErrorCode::invalid_argument, "grid size must be >= 8");
  s.dictionary = DictionaryConfig::from_json(j.value("dictionary", nlohmann::json()));
  s.seed = j.value("seed", s.seed);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    s.tolerances.residual = t.value("residual", s.tolerances.residual);
    s.tolerances.stability = t.value("stability", s.tolerances.stability);
    s.tolerances.equivalence_band = t.value("equivalence_band", s.tolerances.equivalence_band);
  }
  s.link_multiple = j.value("link_multiple", s.link_multiple);
  s.allow_dictionary_associates = j.value("allow_dictionary_associates", s.allow_dictionary_associates);
  if (j.contains("bp_table")) {
    const auto& b = j.at("bp_table");
    s.bp_table.ps = b.value("ps", s.bp_table.ps);
    s.bp_table.alphas = b.value("alphas", s.bp_table.alphas);
    s.bp_table.betas = b.value("betas", s.bp_table.betas);
  }
  return s;
}

nlohmann::json Scenario::to_json() const {
  return {{"p", p},
          {"b1", b1.to_json()},
          {"b2", b2.to_json()},
          {"X", X.to_json()},
          {"Y", Y.to_json()},
          {"grid", {{"size", static_cast<long long>(grid.size)}, {"scheme", to_string(grid.scheme)}, {"min_cell", grid.min_cell}}},
          {"dictionary", dictionary.to_json()},
          {"seed", seed},
          {"tolerances",
           {{"residual", tolerances.residual},
            {"stability", tolerances.stability},
            {"equivalence_band", tolerances.equivalence_band}}},
          {"link_multiple", link_multiple},
          {"allow_dictionary_associates", allow_dictionary_associates},
          {"bp_table", {{"ps", bp_table.ps}, {"alphas", bp_table.alphas}, {"betas", bp_table.betas}}}};
}

std::string Scenario::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario Scenario::gaussian_preset() {
  Scenario s;
  s.p = 1.0;
  s.b1 = SlowlyVarying::atom(0.5);
  s.b2 = SlowlyVarying::atom(-0.5);
  return s;
}

const char* to_string(CheckVerdict v) noexcept {
  switch (v) {
    case CheckVerdict::pass: return "pass";
    case CheckVerdict::fail: return "fail";
    case CheckVerdict::unstable: return "unstable";
    case CheckVerdict::info: return "info";
  }
  return "info";
}

int CampaignReport::exit_code() const {
  bool unstable = false;
  for (const auto& c : checks) {
    if (c.verdict == CheckVerdict::fail) return 4;
    if (c.verdict == CheckVerdict::unstable) unstable = true;
  }
  return unstable ? 3 : 0;
}

nlohmann::json CampaignReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e = {{"name", c.name}, {"verdict", to_string(c.verdict)}, {"details", c.details}};
    if (c.report) e["report"] = c.report->to_json();
    cs.push_back(std::move(e));
  }
  const int code = exit_code();
  return {{"campaign", campaign},
          {"scenario_hash", scenario_hash},
          {"seed", seed},
          {"resolutions", resolutions},
          {"checks", cs},
          {"notes", notes},
          {"verdict", code == 0 ? "pass" : code == 3 ? "unstable" : "fail"}};
}

const CheckResult* CampaignReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

// ---------------------------------------------------------------- limit

LimitEstimate limit_condition(const SlowlyVarying& b1, const SlowlyVarying& b2, double p) {
  LimitEstimate est;
  const double ss[] = {1e-4, 1e-6, 1e-8};
  double x[3];
  double D[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = ell(ss[i]);
    D[i] = condition_d_function(b1, b2, p, x[i]);
    est.samples.emplace_back(ss[i], D[i]);
  }
  const double d12 = D[0] - D[1];
  const double d23 = D[1] - D[2];
  est.limit = D[2];
  if (!std::isfinite(D[0]) || !std::isfinite(D[1]) || !std::isfinite(D[2])) return est;
  if (d12 == 0.0 && d23 == 0.0) {
    est.rate = kInf;
    est.converges = D[2] > 0.0;
    return est;
  }
  if (!(d12 * d23 > 0.0)) return est;
  // (x1^-r - x2^-r) / (x2^-r - x3^-r) increases from its r -> 0 limit.
  auto shape = [&](double r) {
    return (std::pow(x[0], -r) - std::pow(x[1], -r)) / (std::pow(x[1], -r) - std::pow(x[2], -r));
  };
  const double target = d12 / d23;
  const double floor = std::log(x[1] / x[0]) / std::log(x[2] / x[1]);
  if (!(target > floor)) return est;
  double lo = 1e-9;
  double hi = 60.0;
  if (shape(hi) < target) return est;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shape(mid) < target ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  const double B = d12 / (std::pow(x[0], -r) - std::pow(x[1], -r));
  est.rate = r;
  est.limit = D[2] - B * std::pow(x[2], -r);
  est.converges = std::isfinite(est.limit) && est.limit > 0.0;
  return est;
}

// ---------------------------------------------------------------- campaigns

CampaignReport verify_S_dominated_by_U(const Scenario& s) {
  const Monotonicity ratio = ratio_power(s.b1, s.b2, 1.0).monotonicity();
  if (ratio != Monotonicity::strictly_decreasing)
    throw Error(ErrorCode::precondition_violation,
                std::string("b1/b2 must be strictly decreasing, classified as ") + to_string(ratio));
  const LimitEstimate lim = limit_condition(s.b1, s.b2, s.p);
  if (!lim.converges)
    throw Error(ErrorCode::precondition_violation, "limit of b2^p int_s^1 dtau/(tau b1^p) does not converge in (0, inf)");
  gate_bp(s);
  gate_convexity(s);

  const auto levels = make_levels(s, GridScheme::geometric_toward_both_ends);
  CampaignReport rep = new_report("s-vs-u", s, levels);

  CheckResult limit;
  limit.name = "limit-condition";
  limit.verdict = CheckVerdict::pass;
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& [x, d] : lim.samples) samples.push_back({{"s", x}, {"value", d}});
  limit.details = {{"samples", samples}, {"extrapolated_limit", lim.limit}, {"rate", num(lim.rate)}};
  rep.checks.push_back(limit);

  std::vector<ConstantReport> a;
  std::vector<ConstantReport> b;
  for (const auto& lv : levels) {
    a.push_back(s_vs_u_pointwise(lv, s));
    b.push_back(s_vs_u_norm(lv, s, s.Y));
  }
  rep.checks.push_back(constant_check("pointwise-integral-form", a, s.tolerances.stability));
  CheckResult nb = constant_check("norm-form", b, s.tolerances.stability);
  nb.details["Y"] = s.Y.describe();
  rep.checks.push_back(nb);
  return rep;
}

CampaignReport verify_main_theorem_links(const Scenario& s) {
  gate_bp(s);
  gate_convexity(s);
  const auto levels = make_levels(s, s.grid.scheme);
  CampaignReport rep = new_report("main-links", s, levels);

  std::vector<ConstantReport> cu, cs;
  for (const auto& lv : levels) {
    cu.push_back(operator_bound(lv, s, OperatorHandle::U(lv.map)));
    cs.push_back(operator_bound(lv, s, OperatorHandle::S_star(s.b1, s.p)));
  }
  rep.checks.push_back(constant_check("iii/U-bounded", cu, s.tolerances.stability));
  rep.checks.push_back(constant_check("iii/S-bounded", cs, s.tolerances.stability));
  const double base = std::max(cu.back().constant, cs.back().constant);

  // The gaussible family: U, S o *, and combinations of them.
  const std::vector<std::string> family = {"U", "S*", "2*U", "0.5*(U+S*)"};
  for (const std::string& name : family) {
    std::vector<ConstantReport> bounds, gauss;
    for (const auto& lv : levels) {
      const OperatorHandle U = OperatorHandle::U(lv.map);
      const OperatorHandle S = OperatorHandle::S_star(s.b1, s.p);
      OperatorHandle op = name == "U" ? U
                          : name == "S*" ? S
                          : name == "2*U" ? OperatorHandle::scaled(U, 2.0)
                                          : OperatorHandle::scaled(OperatorHandle::sum(U, S), 0.5);
      bounds.push_back(operator_bound(lv, s, op));
      gauss.push_back(gaussibility_sweep(op, lv.map, lv.dict));
    }
    CheckResult c = constant_check("iii-to-i/" + name, bounds, s.tolerances.stability, s.link_multiple * base);
    const ConstantReport g = combine_resolutions(gauss);
    c.details["gaussibility"] = g.to_json();
    if (!g.finite()) c.verdict = CheckVerdict::fail;
    rep.checks.push_back(c);
  }

  bool lower_only = false;
  std::vector<ConstantReport> dual;
  for (const auto& lv : levels) dual.push_back(dual_link(lv, s, lower_only));
  CheckResult d = constant_check("iii-to-iv", dual, s.tolerances.stability);
  d.details["lower_bound_only"] = lower_only;
  if (lower_only) d.verdict = CheckVerdict::info;
  rep.checks.push_back(d);

  for (const std::string& name : {std::string("U"), std::string("S*")}) {
    std::vector<ConstantReport> runs;
    for (const auto& lv : levels) {
      const OperatorHandle op = name == "U" ? OperatorHandle::U(lv.map) : OperatorHandle::S_star(s.b1, s.p);
      runs.push_back(duality_chain(lv, s, op));
    }
    rep.checks.push_back(constant_check("iv-to-i/" + name, runs, s.tolerances.stability));
  }
  rep.notes.push_back(
      "statement (i) ranges over every gaussible operator; only the family {U, S*, 2*U, 0.5*(U+S*)} is tested");
  return rep;
}

CampaignReport verify_k_consistency(const Scenario& s) {
  gate_bp(s);
  const auto levels = make_levels(s, s.grid.scheme);
  CampaignReport rep = new_report("k-oracle", s, levels);
  for (const Couple couple : {Couple::karamata, Couple::lp_linf}) {
    std::vector<ConstantReport> runs;
    for (const auto& lv : levels) {
      // Two-sided deviation max(ratio, 1 / ratio) of brute force against the
      // closed formula.
      runs.push_back(dict_sweep(lv, [&](const std::string& label, const StepFunction& g, ConstantReport& r) {
        const BruteForceK brute(g, couple, s.p, s.b1, s.b2);
        std::optional<ExplicitKaramataK> kar;
        std::optional<LpLinfK> lp;
        if (couple == Couple::karamata) kar.emplace(g, lv.map);
        else lp.emplace(g, s.p);
        for (Eigen::Index k = 0; k + 1 < lv.grid.size(); ++k) {
          const double t = lv.grid.right(k);
          const double ref = kar ? (*kar)(t).value : (*lp)(t).value;
          const double bf = brute(t).value;
          r.observe(std::max(ref, bf), std::min(ref, bf), label, t);
        }
      }));
    }
    CheckResult c = constant_check(std::string("band/") + (couple == Couple::karamata ? "karamata" : "lp-linf"), runs,
                                   s.tolerances.stability, s.tolerances.equivalence_band);
    rep.checks.push_back(c);
  }
  return rep;
}

CampaignReport gaussibility_report(const Scenario& s, const nlohmann::json& op) {
  gate_bp(s);
  const auto levels = make_levels(s, s.grid.scheme);
  CampaignReport rep = new_report("gaussible", s, levels);
  std::vector<ConstantReport> runs;
  std::string label;
  for (const auto& lv : levels) {
    const OperatorHandle handle = operator_from_json(op, lv.map);
    label = handle.label;
    runs.push_back(gaussibility_sweep(handle, lv.map, lv.dict));
  }
  CheckResult c = constant_check("gaussibility/" + label, runs, s.tolerances.stability);
  c.details["operator"] = op;
  rep.checks.push_back(c);
  return rep;
}

std::vector<BpTableRow> bp_example_table(double p, const std::vector<double>& alphas, const std::vector<double>& betas) {
  std::vector<BpTableRow> rows;
  for (double a : alphas)
    for (double b : betas) {
      BpTableRow r;
      r.p = p;
      r.alpha = a;
      r.beta = b;
      r.analytic = bp_analytic_predicate(a, b, p);
      r.surface_distance = bp_surface_distance(a, b, p);
      r.excluded = r.surface_distance > 0.0 && r.surface_distance < 0.01;
      r.numeric = in_class_Bp(SlowlyVarying::atom(a), SlowlyVarying::atom(-b), p).verdict;
      rows.push_back(r);
    }
  return rows;
}

CampaignReport bp_table_report(const Scenario& s) {
  CampaignReport rep;
  rep.campaign = "bp-table";
  rep.scenario_hash = s.hash();
  rep.seed = s.seed;
  for (double p : s.bp_table.ps) {
    CheckResult c;
    char name[32];
    std::snprintf(name, sizeof name, "p=%g", p);
    c.name = name;
    int mismatches = 0;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : bp_example_table(p, s.bp_table.alphas, s.bp_table.betas)) {
      if (!r.match()) ++mismatches;
      rows.push_back({{"alpha", r.alpha},
                      {"beta", r.beta},
                      {"numeric", to_string(r.numeric)},
                      {"analytic", r.analytic},
                      {"surface_distance", r.surface_distance},
                      {"excluded", r.excluded},
                      {"match", r.match()}});
    }
    c.verdict = mismatches == 0 ? CheckVerdict::pass : CheckVerdict::fail;
    c.details = {{"mismatches", mismatches}, {"rows", rows}};
    rep.checks.push_back(c);
  }
  return rep;
}

CampaignReport gaussian_preset_report(const Scenario& s) {
  gate_bp(s);
  const auto levels = make_levels(s, s.grid.scheme);
  CampaignReport rep = new_report("gaussian", s, levels);

  CheckResult asym;
  asym.name = "sigma-inverse-asymptotic";
  asym.verdict = CheckVerdict::info;
  for (const auto& lv : levels) {
    const RatioRange r = sigma_inverse_asymptotic_check(lv.map);
    asym.details["N=" + std::to_string(lv.N)] = {{"min", r.min}, {"max", r.max}};
  }
  rep.checks.push_back(asym);

  for (const std::string& name : {std::string("U"), std::string("S*")}) {
    std::vector<ConstantReport> general, display;
    for (const auto& lv : levels) {
      const OperatorHandle op = name == "U" ? OperatorHandle::U(lv.map) : OperatorHandle::S_star(s.b1, s.p);
      general.push_back(gaussibility_sweep(op, lv.map, lv.dict));
      if (s.p == 1.0) display.push_back(display_form(lv, op));
    }
    CheckResult g = constant_check("general-form/" + name, general, s.tolerances.stability);
    if (name == "U" && std::abs(g.report->constant - 1.0) > 1e-9) g.verdict = CheckVerdict::fail;
    rep.checks.push_back(g);
    if (!display.empty()) {
      CheckResult d = constant_check("display-form/" + name, display, s.tolerances.stability);
      d.verdict = CheckVerdict::info;
      rep.checks.push_back(d);
    }
  }
  rep.notes.push_back(
      "display-form weights (l^{-1/2} left, l^{-1} right) differ from the general form; reported, not gated");

  append_prefixed(rep, verify_S_dominated_by_U(s), "s-vs-u/");
  append_prefixed(rep, verify_main_theorem_links(s), "main-links/");
  return rep;
}

}  // namespace rikit
