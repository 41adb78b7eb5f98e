#include "rikit/spaces.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/rearrange.hpp"
#include "rikit/weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rikit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string number(double x) {
  if (std::isinf(x)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

nlohmann::json exponent_json(double q) { return std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q); }

double exponent_from_json(const nlohmann::json& j) {
  if (j.is_string() && (j == "inf" || j == "infinity")) return kInf;
  if (!j.is_number()) throw Error(ErrorCode::invalid_argument, "space exponent must be a number or \"inf\"");
  return j.get<double>();
}

bool bounded_weight(const SlowlyVarying& b) {
  if (const auto& f = b.power_form()) return f->exponent <= 0.0;
  return is_nondecreasing(b.monotonicity());
}

bool constant_weight(const SlowlyVarying& b) {
  if (const auto& f = b.power_form()) return f->exponent == 0.0;
  return b.monotonicity() == Monotonicity::constant;
}

}  // namespace

const char* to_string(Banach b) noexcept {
  switch (b) {
    case Banach::banach: return "banach";
    case Banach::quasi: return "quasi";
    case Banach::unknown: return "unknown";
  }
  return "unknown";
}

SpaceSpec SpaceSpec::lebesgue(double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::invalid_argument, "Lebesgue exponent must lie in (0, inf]");
  auto d = std::make_shared<Data>();
  d->kind = Kind::lebesgue;
  d->q = q;
  return SpaceSpec(d);
}

SpaceSpec SpaceSpec::karamata(double q, SlowlyVarying b) {
  if (!(q > 0.0)) throw Error(ErrorCode::invalid_argument, "Karamata exponent must lie in (0, inf]");
  if (std::isinf(q) && !bounded_weight(b))
    throw Error(ErrorCode::invalid_argument, "L^{inf,b} needs a bounded b, got " + b.describe());
  auto d = std::make_shared<Data>();
  d->kind = Kind::karamata;
  d->q = q;
  d->b = std::move(b);
  return SpaceSpec(d);
}

SpaceSpec SpaceSpec::power(const SpaceSpec& base, double p) {
  if (!(p > 0.0) || std::isinf(p)) throw Error(ErrorCode::invalid_argument, "power must be positive and finite");
  auto d = std::make_shared<Data>();
  d->kind = Kind::power;
  d->p = p;
  d->base = std::make_shared<const SpaceSpec>(base);
  return SpaceSpec(d);
}

SpaceSpec SpaceSpec::associate(const SpaceSpec& base) {
  if (base.banach() != Banach::banach)
    throw Error(ErrorCode::invalid_argument, "associate needs a Banach base, got " + base.describe());
  auto d = std::make_shared<Data>();
  d->kind = Kind::associate;
  d->base = std::make_shared<const SpaceSpec>(base);
  return SpaceSpec(d);
}

SpaceSpec SpaceSpec::simplified() const {
  switch (kind()) {
    case Kind::lebesgue:
    case Kind::karamata: return *this;
    case Kind::associate: {
      if (auto closed = base().closed_associate()) return *closed;
      return *this;
    }
    case Kind::power: {
      const SpaceSpec s = base().simplified();
      const double p = this->p();
      if (s.kind() == Kind::lebesgue) return lebesgue(s.q() / p);
      if (s.kind() == Kind::karamata) return karamata(s.q() / p, SlowlyVarying::power(s.b(), p));
      if (s.kind() == Kind::power) return power(s.base(), s.p() * p).simplified();
      return power(s, p);
    }
  }
  return *this;
}

std::optional<SpaceSpec> SpaceSpec::closed_associate() const {
  const SpaceSpec s = simplified();
  if (s.kind() != Kind::lebesgue || s.q() < 1.0) return std::nullopt;
  const double q = s.q();
  if (q == 1.0) return lebesgue(kInf);
  if (std::isinf(q)) return lebesgue(1.0);
  return lebesgue(q / (q - 1.0));
}

Banach SpaceSpec::banach() const {
  const SpaceSpec s = simplified();
  switch (s.kind()) {
    case Kind::lebesgue: return s.q() >= 1.0 ? Banach::banach : Banach::quasi;
    case Kind::karamata: {
      if (s.q() < 1.0) return Banach::quasi;
      if (std::isinf(s.q())) return constant_weight(s.b()) ? Banach::banach : Banach::unknown;
      const Monotonicity m = s.b().monotonicity();
      if (is_nonincreasing(m)) return Banach::banach;
      if (s.q() == 1.0 && is_nondecreasing(m)) return Banach::quasi;
      return Banach::unknown;
    }
    case Kind::associate: return Banach::banach;
    case Kind::power: return Banach::unknown;
  }
  return Banach::unknown;
}

bool SpaceSpec::p_convex(double p) const {
  const SpaceSpec s = power(*this, p).simplified();
  if (s.banach() == Banach::banach) return true;
  // L^{q,b} with q > 1 is equivalent to a Banach norm for every slowly
  // varying b.
  return s.kind() == Kind::karamata && s.q() > 1.0 && std::isfinite(s.q());
}

nlohmann::json SpaceSpec::to_json() const {
  switch (kind()) {
    case Kind::lebesgue: return {{"lebesgue", exponent_json(q())}};
    case Kind::karamata: return {{"karamata", {{"p", exponent_json(q())}, {"b", b().to_json()}}}};
    case Kind::power: return {{"power", {{"base", base().to_json()}, {"p", p()}}}};
    case Kind::associate: return {{"associate", base().to_json()}};
  }
  return nullptr;
}

SpaceSpec SpaceSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw Error(ErrorCode::invalid_argument, "space spec must be a one-key object");
  const auto it = j.begin();
  const std::string key = it.key();
  const nlohmann::json& v = it.value();
  if (key == "lebesgue") return lebesgue(exponent_from_json(v));
  if (key == "karamata") return karamata(exponent_from_json(v.at("p")), SlowlyVarying::from_json(v.at("b")));
  if (key == "power") return power(from_json(v.at("base")), v.at("p").get<double>());
  if (key == "associate") return associate(from_json(v));
  throw Error(ErrorCode::invalid_argument, "unknown space kind \"" + key + "\"");
}

std::string SpaceSpec::describe() const {
  switch (kind()) {
    case Kind::lebesgue: return "L^" + number(q());
    case Kind::karamata: return "L^{" + number(q()) + "," + b().describe() + "}";
    case Kind::power: return "(" + base().describe() + ")^{1/" + number(p()) + "}";
    case Kind::associate: return "(" + base().describe() + ")'";
  }
  return "?";
}

double norm(const SpaceSpec& space, const StepFunction& f, AssociatePolicy policy) {
  using Kind = SpaceSpec::Kind;
  switch (space.kind()) {
    case Kind::lebesgue: {
      const double q = space.q();
      const Eigen::ArrayXd a = f.values().abs();
      if (std::isinf(q)) return a.size() ? a.maxCoeff() : 0.0;
      CompensatedSum sum;
      for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a[i] != 0.0) sum.add(std::pow(a[i], q) * f.grid().width(i));
      return std::pow(sum.value(), 1.0 / q);
    }
    case Kind::karamata: {
      const StepFunction fs = rearrangement(f);
      const double q = space.q();
      if (std::isinf(q)) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < fs.size(); ++i)
          if (fs.value(i) != 0.0) best = std::max(best, fs.value(i) * space.b().at_log(ell(fs.grid().representative(i))));
        return best;
      }
      const WeightedPrimitive prim(fs, q, Weight(0.0, space.b(), q));
      return std::pow(prim.total(), 1.0 / q);
    }
    case Kind::power: {
      const double p = space.p();
      return std::pow(norm(space.base(), f.abs_pow(1.0 / p), policy), p);
    }
    case Kind::associate: {
      if (auto closed = space.base().closed_associate()) return norm(*closed, f, policy);
      if (policy == AssociatePolicy::exact)
        throw Error(ErrorCode::unsupported_associate, "no closed-form associate for " + space.base().describe());
      return associate_norm_estimate(space.base(), f, standard_dual_dictionary(f.grid()));
    }
  }
  return 0.0;
}

double associate_norm_estimate(const SpaceSpec& base, const StepFunction& f,
                               const std::vector<StepFunction>& dictionary) {
  if (dictionary.empty()) throw Error(ErrorCode::invalid_argument, "dual dictionary is empty");
  if (base.banach() != Banach::banach)
    throw Error(ErrorCode::invalid_argument, "associate estimate needs a Banach base, got " + base.describe());
  const StepFunction fs = rearrangement(f);
  double best = 0.0;
  for (const StepFunction& g : dictionary) {
    const double ng = norm(base, g, AssociatePolicy::dictionary_lower_bound);
    if (!(ng > 0.0) || !std::isfinite(ng)) continue;
    best = std::max(best, integrate_product(fs, rearrangement(g)) / ng);
  }
  return best;
}

std::vector<StepFunction> standard_dual_dictionary(const Grid& grid) {
  // Only the values are memoized: a cached StepFunction would own the grid
  // that owns the cache.
  const auto values = grid.memo<std::vector<Eigen::ArrayXd>>("dual-dictionary", [&] {
    std::vector<Eigen::ArrayXd> out;
    std::vector<Eigen::Index> cuts;
    const Eigen::ArrayXd& bp = grid.breakpoints();
    auto snap = [&](double a) {
      Eigen::Index k = std::lower_bound(bp.data(), bp.data() + bp.size(), a) - bp.data();
      k = std::min<Eigen::Index>(k, bp.size() - 1);
      if (k > 0 && a - bp[k - 1] < bp[k] - a) --k;
      cuts.push_back(k);
    };
    const double lo = std::log(bp[0]);
    for (int i = 0; i < 128; ++i) snap(std::exp(lo * (1.0 - i / 127.0)));
    for (int i = 1; i <= 16; ++i) snap(i / 16.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (Eigen::Index k : cuts) out.push_back(StepFunction::indicator(grid, bp[k]).scaled(1.0 / bp[k]).values());
    for (double gamma : {0.1, 0.25, 0.45, 0.7, 0.9})
      out.push_back(StepFunction::sample(grid, [gamma](double t) { return std::pow(t, -gamma); }).values());
    for (double delta : {-1.0, -0.5, 0.5, 1.0, 2.0})
      out.push_back(StepFunction::sample(grid, [delta](double t) { return std::pow(ell(t), delta); }).values());
    return out;
  });
  std::vector<StepFunction> out;
  out.reserve(values->size());
  for (const auto& v : *values) {
    StepFunction f(grid, v);
    out.emplace_back(grid, v, f.values_nonincreasing() ? Monotone::nonincreasing : Monotone::unknown);
  }
  return out;
}

HolderReport holder_check(const StepFunction& f, const StepFunction& g, const SpaceSpec& base) {
  if (base.banach() != Banach::banach)
    throw Error(ErrorCode::invalid_argument, "Holder check needs a Banach base, got " + base.describe());
  const auto closed = base.closed_associate();
  if (!closed) throw Error(ErrorCode::unsupported_associate, "no closed-form associate for " + base.describe());
  HolderReport r;
  r.lhs = integrate_product(f.abs(), g.abs());
  r.rhs = norm(base, f) * norm(*closed, g);
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-300;
  return r;
}

}  // namespace rikit
