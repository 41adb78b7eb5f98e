#include "rikit/operators.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/rearrange.hpp"
#include "rikit/weight.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rikit {

namespace {

StepFunction flagged(const Grid& grid, Eigen::ArrayXd values) {
  StepFunction f(grid, std::move(values));
  return f.values_nonincreasing() ? StepFunction(grid, f.values(), Monotone::nonincreasing) : f;
}

double sv_at(const SlowlyVarying& b, double t) { return b.at_log(ell(t)); }

std::vector<double> merged_breakpoints(const Grid& a, const Grid& b) {
  std::vector<double> ts(a.breakpoints().data(), a.breakpoints().data() + a.size());
  ts.insert(ts.end(), b.breakpoints().data(), b.breakpoints().data() + b.size());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// Splits every cell [a, b) with log(b / a) above 32 / n into geometric
// pieces. Rearranged grids can carry one coarse cell from near t = 1 down
// next to 0, where a left-endpoint sample of a continuous operator is poor.
Grid log_refined(const Grid& grid) {
  const Eigen::Index n = grid.size();
  const double max_log = 32.0 / static_cast<double>(n);
  std::vector<double> bp;
  bp.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = grid.left(j);
    const double b = grid.right(j);
    if (a > 0.0) {
      const double span = std::log(b / a);
      const int pieces = static_cast<int>(std::ceil(span / max_log));
      for (int k = 1; k < pieces; ++k) bp.push_back(a * std::exp(span * k / pieces));
    }
    bp.push_back(b);
  }
  if (static_cast<Eigen::Index>(bp.size()) == n) return grid;
  Eigen::ArrayXd out(static_cast<Eigen::Index>(bp.size()));
  for (std::size_t i = 0; i < bp.size(); ++i) out[static_cast<Eigen::Index>(i)] = bp[i];
  return Grid::from_breakpoints(std::move(out), grid.scheme());
}

}  // namespace

StepFunction op_U(const StepFunction& f, const SigmaMap& m) {
  const StepFunction fs = rearrangement(f);
  const Grid grid = m.pullback(fs.grid());
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) v[j] = fs.value(j) / sv_at(m.b2(), grid.representative(j));
  // Nonincreasing whenever b2 is nondecreasing; the flag follows the values.
  return flagged(grid, std::move(v));
}

StepFunction op_T(const StepFunction& f, const SigmaMap& m) {
  const StepFunction fs = rearrangement(f);
  const Grid grid = log_refined(fs.grid());
  const double p = m.p();
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = m.contract(grid.representative(j));
    v[j] = fs(x) / std::pow(sv_at(m.b1(), x), p);
  }
  for (Eigen::Index j = n - 2; j >= 0; --j) v[j] = std::max(v[j], v[j + 1]);
  return StepFunction(grid, std::move(v), Monotone::nonincreasing);
}

StepFunction op_S(const StepFunction& f, const SlowlyVarying& b1, double p) {
  const Grid grid = log_refined(f.grid());
  const WeightedPrimitive prim(f, p, Weight(-1.0, b1, -p));
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double tail = prim.tail(grid.representative(j));
    v[j] = p == 1.0 ? tail : std::pow(tail, 1.0 / p);
  }
  return flagged(grid, std::move(v));
}

StepFunction gaussible_majorant(const StepFunction& f, const SigmaMap& m) {
  const StepFunction fs = rearrangement(f);
  const Grid grid = m.pullback(fs.grid());
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double mid = 0.5 * (grid.left(j) + grid.right(j));
    v[j] = fs(m.dilate(mid)) / sv_at(m.b2(), grid.representative(j));
  }
  return flagged(grid, std::move(v));
}

OperatorHandle OperatorHandle::U(const SigmaMap& m) {
  return {"U", [m](const StepFunction& f) { return op_U(f, m); }};
}

OperatorHandle OperatorHandle::T(const SigmaMap& m) {
  return {"T", [m](const StepFunction& f) { return op_T(f, m); }};
}

OperatorHandle OperatorHandle::S_star(const SlowlyVarying& b1, double p) {
  return {"S*", [b1, p](const StepFunction& f) { return op_S(rearrangement(f), b1, p); }};
}

OperatorHandle OperatorHandle::scaled(const OperatorHandle& op, double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", c);
  return {std::string(buf) + "*" + op.label, [op, c](const StepFunction& f) { return op(f).scaled(c); }};
}

OperatorHandle OperatorHandle::sum(const OperatorHandle& a, const OperatorHandle& b) {
  return {"(" + a.label + "+" + b.label + ")",
          [a, b](const StepFunction& f) { return pointwise_sum(a(f), b(f)); }};
}

OperatorHandle OperatorHandle::rearranged(const OperatorHandle& op) {
  return {"(" + op.label + ")*", [op](const StepFunction& f) { return rearrangement(op(f)); }};
}

OperatorHandle operator_from_json(const nlohmann::json& j, const SigmaMap& m) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "U") return OperatorHandle::U(m);
    if (name == "T") return OperatorHandle::T(m);
    if (name == "S" || name == "S*") return OperatorHandle::S_star(m.b1(), m.p());
    throw Error(ErrorCode::invalid_argument, "unknown operator '" + name + "'");
  }
  if (j.is_object() && j.size() == 1) {
    if (j.contains("scaled")) {
      const auto& a = j.at("scaled");
      return OperatorHandle::scaled(operator_from_json(a.at("op"), m), a.at("c").get<double>());
    }
    if (j.contains("sum")) {
      const auto& a = j.at("sum");
      if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::invalid_argument, "sum takes two operators");
      return OperatorHandle::sum(operator_from_json(a[0], m), operator_from_json(a[1], m));
    }
    if (j.contains("rearranged")) return OperatorHandle::rearranged(operator_from_json(j.at("rearranged"), m));
  }
  throw Error(ErrorCode::invalid_argument, "malformed operator: " + j.dump());
}

ConstantReport gaussibility_sweep(const OperatorHandle& op, const SigmaMap& m,
                                  const std::vector<LabeledFunction>& dictionary) {
  const double p = m.p();
  const Weight w(0.0, m.b1(), p);
  std::vector<ConstantReport> parts(dictionary.size());
  detail::parallel_for(dictionary.size(), [&](std::size_t i) {
    const auto& [label, f] = dictionary[i];
    const StepFunction lhs_fn = rearrangement(op(f));
    const StepFunction rhs_fn = gaussible_majorant(f, m);
    const WeightedPrimitive lhs(lhs_fn, p, w);
    const WeightedPrimitive rhs(rhs_fn, p, w);
    for (double t : merged_breakpoints(lhs_fn.grid(), rhs_fn.grid()))
      parts[i].observe(lhs.head(t), rhs.head(t), label, t);
  });
  ConstantReport rep = detail::fold_reports(parts);
  const long long N = dictionary.empty() ? 0 : static_cast<long long>(dictionary.front().f.size());
  rep.resolutions.push_back({N, rep.constant});
  return rep;
}

ConstantReport gaussibility_check(const OperatorHandle& op, const SigmaMap& m,
                                  const std::vector<LabeledFunction>& dictionary) {
  const BpReport bp = in_class_Bp(m.b1(), m.b2(), m.p());
  if (bp.verdict != Verdict::pass)
    throw Error(ErrorCode::precondition_violation,
                std::string("(b1, b2) is not certified in B_p: verdict ") + to_string(bp.verdict));
  return gaussibility_sweep(op, m, dictionary);
}

double t_recursion_constant(const StepFunction& f, const SigmaMap& m) {
  const StepFunction fs = rearrangement(f);
  const StepFunction Tf = op_T(fs, m);
  const Grid& grid = Tf.grid();
  const double p = m.p();
  double c = 0.0;
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const double t = grid.representative(j);
    const double x = m.contract(t);
    const double bound = fs(x) / std::pow(sv_at(m.b1(), x), p) + Tf(m.dilate(t));
    if (Tf.value(j) == 0.0) continue;
    c = bound > 0.0 ? std::max(c, Tf.value(j) / bound) : INFINITY;
  }
  return c;
}

}  // namespace rikit
