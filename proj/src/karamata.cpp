#include "rikit/karamata.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rikit {

const char* to_string(Monotonicity m) noexcept {
  switch (m) {
    case Monotonicity::constant: return "constant";
    case Monotonicity::strictly_decreasing: return "strictly-decreasing";
    case Monotonicity::strictly_increasing: return "strictly-increasing";
    case Monotonicity::nonincreasing: return "nonincreasing";
    case Monotonicity::nondecreasing: return "nondecreasing";
    case Monotonicity::neither: return "neither";
    case Monotonicity::unknown: return "unknown";
  }
  return "unknown";
}

bool is_nonincreasing(Monotonicity m) noexcept {
  return m == Monotonicity::constant || m == Monotonicity::strictly_decreasing || m == Monotonicity::nonincreasing;
}

bool is_nondecreasing(Monotonicity m) noexcept {
  return m == Monotonicity::constant || m == Monotonicity::strictly_increasing || m == Monotonicity::nondecreasing;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct SlowlyVarying::Node {
  enum class Kind { atom, product, power, lincomb };
  Kind kind = Kind::atom;
  double alpha = 0.0;
  double exponent = 0.0;
  std::vector<SlowlyVarying> children;
  std::vector<double> coefs;
  std::optional<PowerForm> form;
  Monotonicity mono = Monotonicity::unknown;
};

namespace {

Monotonicity from_exponent(double gamma) {
  // l is strictly decreasing in t, so l^gamma decreases iff gamma > 0.
  if (gamma > 0.0) return Monotonicity::strictly_decreasing;
  if (gamma < 0.0) return Monotonicity::strictly_increasing;
  return Monotonicity::constant;
}

Monotonicity flip(Monotonicity m) {
  switch (m) {
    case Monotonicity::strictly_decreasing: return Monotonicity::strictly_increasing;
    case Monotonicity::strictly_increasing: return Monotonicity::strictly_decreasing;
    case Monotonicity::nonincreasing: return Monotonicity::nondecreasing;
    case Monotonicity::nondecreasing: return Monotonicity::nonincreasing;
    default: return m;
  }
}

// Direction of a product or positive sum of two positive functions.
Monotonicity combine(Monotonicity a, Monotonicity b) {
  if (a == Monotonicity::constant) return b;
  if (b == Monotonicity::constant) return a;
  const bool dec_a = a == Monotonicity::strictly_decreasing || a == Monotonicity::nonincreasing;
  const bool dec_b = b == Monotonicity::strictly_decreasing || b == Monotonicity::nonincreasing;
  const bool inc_a = a == Monotonicity::strictly_increasing || a == Monotonicity::nondecreasing;
  const bool inc_b = b == Monotonicity::strictly_increasing || b == Monotonicity::nondecreasing;
  if (dec_a && dec_b) {
    return (a == Monotonicity::strictly_decreasing || b == Monotonicity::strictly_decreasing)
               ? Monotonicity::strictly_decreasing
               : Monotonicity::nonincreasing;
  }
  if (inc_a && inc_b) {
    return (a == Monotonicity::strictly_increasing || b == Monotonicity::strictly_increasing)
               ? Monotonicity::strictly_increasing
               : Monotonicity::nondecreasing;
  }
  return Monotonicity::unknown;
}

// Dense sampling in L. A monotone sample does not prove monotonicity, so the
// fallback only ever concludes "neither" (both directions witnessed).
Monotonicity sampled_monotonicity(const SlowlyVarying& b) {
  bool up = false;
  bool down = false;
  double prev = b.at_log(1.0);
  for (int k = 1; k <= 4000; ++k) {
    const double L = std::exp(k * std::log(1e8) / 4000.0);
    const double v = b.at_log(L);
    const double tol = 1e-12 * std::max(std::abs(v), std::abs(prev));
    if (v > prev + tol) up = true;
    if (v < prev - tol) down = true;
    prev = v;
  }
  return up && down ? Monotonicity::neither : Monotonicity::unknown;
}

std::string fmt_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

SlowlyVarying SlowlyVarying::atom(double alpha) {
  if (!std::isfinite(alpha)) throw Error(ErrorCode::invalid_argument, "atom exponent must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::atom;
  node->alpha = alpha;
  node->form = PowerForm{1.0, alpha};
  node->mono = from_exponent(alpha);
  return SlowlyVarying(node);
}

SlowlyVarying SlowlyVarying::product(std::vector<SlowlyVarying> factors) {
  if (factors.empty()) return one();
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::product;
  PowerForm form;
  bool closed = true;
  Monotonicity mono = Monotonicity::constant;
  for (const auto& f : factors) {
    if (f.power_form()) {
      form.coef *= f.power_form()->coef;
      form.exponent += f.power_form()->exponent;
    } else {
      closed = false;
    }
    mono = combine(mono, f.node_->mono);
  }
  node->children = std::move(factors);
  if (closed) {
    node->form = form;
    node->mono = from_exponent(form.exponent);
  } else {
    node->mono = mono;
  }
  SlowlyVarying out(node);
  if (node->mono == Monotonicity::unknown) node->mono = sampled_monotonicity(out);
  return out;
}

SlowlyVarying SlowlyVarying::power(const SlowlyVarying& base, double exponent) {
  if (!std::isfinite(exponent)) throw Error(ErrorCode::invalid_argument, "power exponent must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::power;
  node->exponent = exponent;
  node->children = {base};
  if (base.power_form()) {
    node->form = PowerForm{std::pow(base.power_form()->coef, exponent), base.power_form()->exponent * exponent};
    node->mono = from_exponent(node->form->exponent);
  } else if (exponent == 0.0) {
    node->form = PowerForm{1.0, 0.0};
    node->mono = Monotonicity::constant;
  } else {
    node->mono = exponent > 0.0 ? base.node_->mono : flip(base.node_->mono);
  }
  return SlowlyVarying(node);
}

SlowlyVarying SlowlyVarying::lincomb(std::vector<std::pair<double, SlowlyVarying>> terms) {
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "linear combination needs a term");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::lincomb;
  bool closed = true;
  double coef = 0.0;
  std::optional<double> exponent;
  Monotonicity mono = Monotonicity::constant;
  for (auto& [c, child] : terms) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw Error(ErrorCode::invalid_argument, "linear combination coefficients must be positive");
    const auto& f = child.power_form();
    if (f && (!exponent || *exponent == f->exponent)) {
      exponent = f->exponent;
      coef += c * f->coef;
    } else {
      closed = false;
    }
    mono = combine(mono, child.node_->mono);
    node->coefs.push_back(c);
    node->children.push_back(child);
  }
  if (closed) {
    node->form = PowerForm{coef, *exponent};
    node->mono = from_exponent(*exponent);
  } else {
    node->mono = mono;
  }
  SlowlyVarying out(node);
  if (node->mono == Monotonicity::unknown) node->mono = sampled_monotonicity(out);
  return out;
}

double SlowlyVarying::at_log(double L) const {
  const Node& n = *node_;
  if (n.form) return n.form->exponent == 0.0 ? n.form->coef : n.form->coef * std::pow(L, n.form->exponent);
  switch (n.kind) {
    case Node::Kind::atom: return std::pow(L, n.alpha);
    case Node::Kind::product: {
      double v = 1.0;
      for (const auto& c : n.children) v *= c.at_log(L);
      return v;
    }
    case Node::Kind::power: return std::pow(n.children[0].at_log(L), n.exponent);
    case Node::Kind::lincomb: {
      double v = 0.0;
      for (std::size_t i = 0; i < n.children.size(); ++i) v += n.coefs[i] * n.children[i].at_log(L);
      return v;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double SlowlyVarying::operator()(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::domain_error, "slowly varying function evaluated outside (0, 1]");
  return at_log(ell(t));
}

const std::optional<PowerForm>& SlowlyVarying::power_form() const { return node_->form; }

Monotonicity SlowlyVarying::monotonicity() const { return node_->mono; }

nlohmann::json SlowlyVarying::to_json() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::atom: return {{"atom", {{"alpha", n.alpha}}}};
    case Node::Kind::product: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : n.children) arr.push_back(c.to_json());
      return {{"prod", arr}};
    }
    case Node::Kind::power: return {{"pow", {{"base", n.children[0].to_json()}, {"exponent", n.exponent}}}};
    case Node::Kind::lincomb: {
      nlohmann::json arr = nlohmann::json::array();
      for (std::size_t i = 0; i < n.children.size(); ++i) arr.push_back({n.coefs[i], n.children[i].to_json()});
      return {{"lincomb", arr}};
    }
  }
  return nullptr;
}

SlowlyVarying SlowlyVarying::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw Error(ErrorCode::invalid_argument, "sv-tree node must be a one-key object");
  const auto it = j.begin();
  const std::string key = it.key();
  const nlohmann::json& body = it.value();
  try {
    if (key == "atom") return atom(body.is_number() ? body.get<double>() : body.at("alpha").get<double>());
    if (key == "prod") {
      std::vector<SlowlyVarying> factors;
      for (const auto& c : body) factors.push_back(from_json(c));
      return product(std::move(factors));
    }
    if (key == "pow") return power(from_json(body.at("base")), body.at("exponent").get<double>());
    if (key == "lincomb") {
      std::vector<std::pair<double, SlowlyVarying>> terms;
      for (const auto& term : body) terms.emplace_back(term.at(0).get<double>(), from_json(term.at(1)));
      return lincomb(std::move(terms));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed sv-tree: ") + e.what());
  }
  throw Error(ErrorCode::invalid_argument, "unknown sv-tree node '" + key + "'");
}

std::string SlowlyVarying::describe() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::atom: return "l^" + fmt_number(n.alpha);
    case Node::Kind::product: {
      std::string s = "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? "*" : "") + n.children[i].describe();
      return s + ")";
    }
    case Node::Kind::power: return "(" + n.children[0].describe() + ")^" + fmt_number(n.exponent);
    case Node::Kind::lincomb: {
      std::string s = "(";
      for (std::size_t i = 0; i < n.children.size(); ++i)
        s += (i ? " + " : "") + fmt_number(n.coefs[i]) + "*" + n.children[i].describe();
      return s + ")";
    }
  }
  return "?";
}

SlowlyVarying ratio_power(const SlowlyVarying& b1, const SlowlyVarying& b2, double q) {
  return SlowlyVarying::power(SlowlyVarying::product({b1, SlowlyVarying::power(b2, -1.0)}), q);
}

double eval_sv(const SlowlyVarying& b, double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::domain_error, "eval_sv needs t in (0, 1)");
  return b(t);
}

RatioRange sv_integral_property_check(const SlowlyVarying& b, double alpha, const Grid& grid) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "alpha must be positive");
  const Weight w(alpha - 1.0, b, 1.0);
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    const double t = grid.right(i);
    const double ratio = w.integral(0.0, t) / (std::pow(t, alpha) * b(t));
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
  }
  return r;
}

bool bp_analytic_predicate(double alpha, double beta, double p) {
  const double inv = 1.0 / p;
  if (alpha < 0.0 || beta < 0.0) return false;
  return (alpha + beta >= inv - 1e-12 && beta > 0.0) || (alpha > inv + 1e-12 && beta == 0.0);
}

double bp_surface_distance(double alpha, double beta, double p) { return std::abs(alpha + beta - 1.0 / p); }

double tail_log_integral(const SlowlyVarying& b1, double p, double L) {
  if (L <= 1.0) return 0.0;
  if (const auto& f = b1.power_form()) {
    // int_1^L u^{-e} du with e = p * exponent, written to avoid cancellation.
    const double e = p * f->exponent;
    const double scale = std::pow(f->coef, -p);
    const double logL = std::log(L);
    if (e == 1.0) return scale * logL;
    return scale * std::expm1((1.0 - e) * logL) / (1.0 - e);
  }
  // Substituting u = e^v turns the integral into int_0^{log L} e^v / b1^p dv.
  const GaussRule& rule = gauss_legendre(12);
  const double V = std::log(L);
  const int panels = std::max(1, static_cast<int>(std::ceil(V / 0.5)));
  CompensatedSum sum;
  for (int k = 0; k < panels; ++k) {
    const double a = V * k / panels;
    const double b = V * (k + 1) / panels;
    const double half = 0.5 * (b - a);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double v = a + half * (rule.nodes[q] + 1.0);
      sum.add(half * rule.weights[q] * std::exp(v) * std::pow(b1.at_log(std::exp(v)), -p));
    }
  }
  return sum.value();
}

double condition_d_function(const SlowlyVarying& b1, const SlowlyVarying& b2, double p, double L) {
  return std::pow(b2.at_log(L), p) * tail_log_integral(b1, p, L);
}

namespace {

constexpr double kBand = 10.0;

// Range of b1(t) / b1(t b1(t)^p b2(t)^{-p}) for L = l(t) in [lo, hi]. Returns
// nullopt when the inner argument leaves (0, 1) somewhere in the window.
std::optional<RatioRange> condition_c_range(const SlowlyVarying& b1, const SlowlyVarying& b2, double p, double lo,
                                            double hi, int samples) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (int k = 0; k <= samples; ++k) {
    const double L = lo * std::pow(hi / lo, static_cast<double>(k) / samples);
    const double v1 = b1.at_log(L);
    // l(t x) = l(t) - log x
    const double inner = L - p * (std::log(v1) - std::log(b2.at_log(L)));
    if (!(inner > 1.0) || !std::isfinite(inner)) return std::nullopt;
    const double ratio = v1 / b1.at_log(inner);
    if (!std::isfinite(ratio)) return std::nullopt;
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
  }
  return r;
}

double spread(const RatioRange& r) { return std::max(r.max, 1.0 / r.min); }

BpConditionC check_condition_c(const SlowlyVarying& b1, const SlowlyVarying& b2, double p) {
  BpConditionC out;
  double lo = ell(1e-2);
  double hi = ell(1e-8);
  for (int shift = 0; hi <= 1e12; ++shift, lo *= 10.0, hi *= 10.0) {
    const auto here = condition_c_range(b1, b2, p, lo, hi, 200);
    if (!here || !here->bounded(kBand)) continue;
    // The band must neither depend on the sampling density nor widen when
    // the window is pushed further toward 0.
    const auto dense = condition_c_range(b1, b2, p, lo, hi, 400);
    const auto further = condition_c_range(b1, b2, p, lo * 10.0, hi * 10.0, 200);
    const bool stable = dense && std::abs(spread(*dense) - spread(*here)) <= 0.05 * spread(*here) && further &&
                        spread(*further) <= spread(*here) * (1.0 + 1e-9);
    if (!stable) continue;
    out.range = *here;
    out.L_lo = lo;
    out.L_hi = hi;
    out.window_shifted = shift > 0;
    out.verdict = Verdict::pass;
    return out;
  }
  out.verdict = Verdict::fail;
  return out;
}

BpConditionD check_condition_d(const SlowlyVarying& b1, const SlowlyVarying& b2, double p) {
  BpConditionD out;
  for (int k = 0; k <= 120; ++k) {
    const double D = condition_d_function(b1, b2, p, std::pow(10.0, k / 8.0));
    if (!std::isfinite(D)) {
      out.sup_estimate = std::numeric_limits<double>::infinity();
      out.verdict = Verdict::fail;
      return out;
    }
    out.sup_estimate = std::max(out.sup_estimate, D);
  }
  for (double L : {1e6, 1e9, 1e12, 1e15}) out.far_field.emplace_back(L, condition_d_function(b1, b2, p, L));
  const double d2 = out.far_field[2].second - out.far_field[1].second;
  const double d3 = out.far_field[3].second - out.far_field[2].second;
  const double scale = std::max(1.0, std::abs(out.far_field[3].second));
  // Bounded when the far field is flat or falling, or when its increments
  // contract geometrically.
  const bool bounded = d3 <= 1e-12 * scale || (d2 > 0.0 && d3 / d2 < 0.9);
  out.verdict = bounded ? Verdict::pass : Verdict::fail;
  if (!bounded) out.sup_estimate = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

BpReport in_class_Bp(const SlowlyVarying& b1, const SlowlyVarying& b2, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::invalid_argument, "p must be positive and finite");
  BpReport rep;
  rep.b1_monotonicity = b1.monotonicity();
  rep.b2_monotonicity = b2.monotonicity();
  const bool ok1 = is_nonincreasing(rep.b1_monotonicity);
  const bool ok2 = is_nondecreasing(rep.b2_monotonicity);
  const bool bad1 = rep.b1_monotonicity == Monotonicity::strictly_increasing || rep.b1_monotonicity == Monotonicity::neither;
  const bool bad2 = rep.b2_monotonicity == Monotonicity::strictly_decreasing || rep.b2_monotonicity == Monotonicity::neither;
  rep.condition_b = ok1 && ok2 ? Verdict::pass : (bad1 || bad2 ? Verdict::fail : Verdict::inconclusive);
  rep.condition_c = check_condition_c(b1, b2, p);
  rep.condition_d = check_condition_d(b1, b2, p);

  const Verdict parts[] = {rep.condition_b, rep.condition_c.verdict, rep.condition_d.verdict};
  rep.verdict = Verdict::pass;
  for (Verdict v : parts) {
    if (v == Verdict::fail) {
      rep.verdict = Verdict::fail;
      break;
    }
    if (v == Verdict::inconclusive) rep.verdict = Verdict::inconclusive;
  }
  if (b1.power_form() && b2.power_form())
    rep.analytic_verdict = bp_analytic_predicate(b1.power_form()->exponent, -b2.power_form()->exponent, p);
  return rep;
}

nlohmann::json BpReport::to_json() const {
  nlohmann::json j;
  j["condition_a"] = condition_a;
  j["condition_b"] = {{"verdict", to_string(condition_b)},
                      {"b1", to_string(b1_monotonicity)},
                      {"b2", to_string(b2_monotonicity)}};
  j["condition_c"] = {{"verdict", to_string(condition_c.verdict)},
                      {"ratio_min", condition_c.range.min},
                      {"ratio_max", condition_c.range.max},
                      {"L_window", {condition_c.L_lo, condition_c.L_hi}},
                      {"window_shifted", condition_c.window_shifted}};
  nlohmann::json far = nlohmann::json::array();
  for (const auto& [L, D] : condition_d.far_field) far.push_back({L, D});
  j["condition_d"] = {{"verdict", to_string(condition_d.verdict)},
                      {"sup_estimate", std::isfinite(condition_d.sup_estimate) ? nlohmann::json(condition_d.sup_estimate)
                                                                               : nlohmann::json("inf")},
                      {"far_field", far}};
  j["verdict"] = to_string(verdict);
  j["analytic_verdict"] = analytic_verdict ? nlohmann::json(*analytic_verdict) : nlohmann::json(nullptr);
  return j;
}

}  // namespace rikit
