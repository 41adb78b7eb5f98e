#include "rikit/kfunc.hpp"

#include "rikit/error.hpp"
#include "rikit/numerics.hpp"
#include "rikit/operators.hpp"
#include "rikit/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rikit {

namespace {

double root(double x, double p) { return p == 1.0 ? x : std::pow(x, 1.0 / p); }

double sv_at(const SlowlyVarying& b, double t) { return b.at_log(ell(t)); }

// Index of the first cell whose representative is >= s.
Eigen::Index first_rep_at_or_after(const Grid& grid, double s) {
  if (s <= grid.representative(0)) return 0;
  Eigen::Index j = grid.locate(s);
  if (grid.representative(j) < s) ++j;
  return j;
}

}  // namespace

const char* to_string(KMethod m) noexcept { return m == KMethod::explicit_formula ? "explicit" : "brute-force"; }

const char* to_string(Couple c) noexcept { return c == Couple::lp_linf ? "(L^p,L^inf)" : "(L^{p,b1},L^{inf,b2})"; }

LpLinfK::LpLinfK(const StepFunction& f, double p) : p_(p), prim_(rearrangement(f), p, Weight::lebesgue()) {
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "p must be positive");
}

KEstimate LpLinfK::operator()(double t) const {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "K-functional needs t > 0");
  const double x = t >= 1.0 ? 1.0 : std::pow(t, p_);
  return {root(prim_.head(x), p_), KMethod::explicit_formula, t, Couple::lp_linf, std::nullopt};
}

ExplicitKaramataK::ExplicitKaramataK(const StepFunction& g, const SigmaMap& m)
    : m_(m), gs_(rearrangement(g)), prim_(gs_, m.p(), Weight(0.0, m.b1(), m.p())) {
  const Grid& grid = gs_.grid();
  const Eigen::Index n = grid.size();
  suffix_max_.resize(n + 1);
  suffix_max_[n] = 0.0;
  for (Eigen::Index j = n - 1; j >= 0; --j)
    suffix_max_[j] = std::max(suffix_max_[j + 1], gs_.value(j) * sv_at(m.b2(), grid.representative(j)));
}

KEstimate ExplicitKaramataK::operator()(double t) const {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::invalid_argument, "explicit K-functional needs t in (0, 1)");
  const double p = m_.p();
  const double s0 = m_.contract(p == 1.0 ? t : std::pow(t, p));
  const Eigen::Index j = first_rep_at_or_after(gs_.grid(), s0);
  double sup = suffix_max_[j];
  if (s0 > 0.0 && s0 < 1.0) sup = std::max(sup, gs_(s0) * sv_at(m_.b2(), s0));
  return {root(prim_.head(s0), p) + t * sup, KMethod::explicit_formula, t, Couple::karamata, std::nullopt};
}

BruteForceK::BruteForceK(const StepFunction& g, Couple couple, double p, const SlowlyVarying& b1,
                         const SlowlyVarying& b2)
    : couple_(couple) {
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "p must be positive");
  const StepFunction gs = rearrangement(g);
  const Grid& grid = gs.grid();
  const Eigen::Index n = grid.size();
  const Eigen::ArrayXd& v = gs.values();

  Eigen::ArrayXd W(n);
  Eigen::ArrayXd b2r(n);
  if (couple == Couple::lp_linf) {
    W = grid.widths();
    b2r.setOnes();
  } else {
    W = *cell_integrals(grid, Weight(0.0, b1, p));
    for (Eigen::Index j = 0; j < n; ++j) b2r[j] = sv_at(b2, grid.representative(j));
  }
  Eigen::ArrayXd prefix_b2(n + 1);
  prefix_b2[0] = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) prefix_b2[j + 1] = std::max(prefix_b2[j], b2r[j]);
  Eigen::ArrayXd suffix_gb2(n + 1);
  suffix_gb2[n] = 0.0;
  for (Eigen::Index j = n - 1; j >= 0; --j) suffix_gb2[j] = std::max(suffix_gb2[j + 1], v[j] * b2r[j]);

  // X1 norm of min(g*, lambda) when the first m cells exceed lambda.
  auto x1 = [&](double lambda, Eigen::Index m) { return std::max(lambda * prefix_b2[m], suffix_gb2[m]); };

  const bool integer_p = p == std::round(p) && p <= 16.0;
  const int P = static_cast<int>(p);
  std::vector<double> moments(integer_p ? static_cast<std::size_t>(P + 1) : 0, 0.0);
  std::vector<double> shifted(moments.size());

  auto direct_a = [&](double lambda, Eigen::Index m) {
    CompensatedSum s;
    for (Eigen::Index j = 0; j < m; ++j) s.add(std::pow(v[j] - lambda, p) * W[j]);
    return root(s.value(), p);
  };

  std::vector<Line> lines;
  Eigen::Index m = 0;
  double lambda = v[0];
  lines.push_back({0.0, x1(lambda, 0), lambda});
  while (true) {
    // Cells equal to the current level join the truncated part.
    Eigen::Index end = m;
    while (end < n && v[end] == lambda) ++end;
    const double next = end < n ? v[end] : 0.0;
    if (end >= n && lambda == 0.0) break;
    const double delta = lambda - next;
    if (integer_p) {
      // (x + delta)^k = sum_i C(k,i) x^i delta^{k-i}; all terms are >= 0.
      for (int k = 0; k <= P; ++k) {
        double binom = 1.0;
        CompensatedSum s;
        for (int i = k; i >= 0; --i) {
          s.add(binom * moments[static_cast<std::size_t>(i)] * std::pow(delta, k - i));
          binom = binom * i / (k - i + 1);
        }
        shifted[static_cast<std::size_t>(k)] = s.value();
      }
      moments.swap(shifted);
      for (Eigen::Index j = m; j < end; ++j)
        for (int k = 0; k <= P; ++k) moments[static_cast<std::size_t>(k)] += std::pow(delta, k) * W[j];
    }
    m = end;
    lambda = next;
    const double a = integer_p ? root(moments[static_cast<std::size_t>(P)], p) : direct_a(lambda, m);
    lines.push_back({a, x1(lambda, m), lambda});
    if (end >= n) break;
  }
  candidates_ = lines.size();

  std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    return x.b != y.b ? x.b > y.b : x.a < y.a;
  });
  for (const Line& l : lines) {
    if (!hull_.empty() && hull_.back().b == l.b) continue;
    while (hull_.size() >= 2) {
      const Line& l1 = hull_[hull_.size() - 2];
      const Line& l2 = hull_.back();
      const long double lhs = static_cast<long double>(l.a - l1.a) * (l1.b - l2.b);
      const long double rhs = static_cast<long double>(l2.a - l1.a) * (l1.b - l.b);
      if (lhs <= rhs) hull_.pop_back();
      else break;
    }
    hull_.push_back(l);
  }
  for (std::size_t i = 0; i + 1 < hull_.size(); ++i)
    cross_.push_back((hull_[i + 1].a - hull_[i].a) / (hull_[i].b - hull_[i + 1].b));
}

KEstimate BruteForceK::operator()(double t) const {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "K-functional needs t > 0");
  const std::size_t i = static_cast<std::size_t>(std::lower_bound(cross_.begin(), cross_.end(), t) - cross_.begin());
  const Line& l = hull_[i];
  return {l.a + t * l.b, KMethod::brute_force, t, couple_, l.lambda};
}

KEstimate k_lp_linf(const StepFunction& f, double t, double p) { return LpLinfK(f, p)(t); }

KEstimate k_explicit_karamata(const StepFunction& g, double t, const SigmaMap& m) {
  return ExplicitKaramataK(g, m)(t);
}

KEstimate k_bruteforce(const StepFunction& g, double t, Couple couple, double p, const SlowlyVarying& b1,
                       const SlowlyVarying& b2) {
  return BruteForceK(g, couple, p, b1, b2)(t);
}

std::vector<KComparisonRow> k_comparison(const StepFunction& g, Couple couple, const SigmaMap& m,
                                         const std::vector<double>& ts) {
  const BruteForceK brute(g, couple, m.p(), m.b1(), m.b2());
  std::optional<ExplicitKaramataK> kar;
  std::optional<LpLinfK> lp;
  if (couple == Couple::karamata) kar.emplace(g, m);
  else lp.emplace(g, m.p());
  std::vector<KComparisonRow> rows;
  for (double t : ts) {
    if (!(t > 0.0 && t < 1.0)) continue;
    KComparisonRow r;
    r.t = t;
    r.k_explicit = kar ? (*kar)(t).value : (*lp)(t).value;
    const KEstimate b = brute(t);
    r.k_bruteforce = b.value;
    r.lambda_witness = b.witness;
    if (r.k_explicit > 0.0) r.ratio = r.k_bruteforce / r.k_explicit;
    else r.ratio = r.k_bruteforce > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    rows.push_back(r);
  }
  return rows;
}

void write_k_csv(std::ostream& out, const std::vector<KComparisonRow>& rows, const std::string& provenance) {
  out << "# " << provenance << "\n";
  out << "t,K_explicit,K_bruteforce,ratio,lambda_witness\n";
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", r.t, r.k_explicit, r.k_bruteforce, r.ratio);
    out << buf;
    if (r.lambda_witness) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.lambda_witness);
      out << buf;
    }
    out << "\n";
  }
}

bool ChainReport::all_finite() const {
  return std::all_of(constants.begin(), constants.end(), [](double c) { return std::isfinite(c); });
}

ChainReport k_inequality_chain_check(const StepFunction& f, const StepFunction& g, const SigmaMap& m,
                                     const std::vector<double>& ts) {
  const double p = m.p();
  const Weight wb1(0.0, m.b1(), p);
  const StepFunction fs = rearrangement(f);
  const StepFunction gs = rearrangement(g);
  const WeightedPrimitive F(fs, p, Weight::lebesgue());
  const WeightedPrimitive G(gs, p, wb1);
  const StepFunction major = gaussible_majorant(f, m);
  const WeightedPrimitive R(major, p, wb1);
  const ExplicitKaramataK explicit_k(g, m);
  const LpLinfK lp_k(f, p);

  // Suffix max of G(s) / (s (b1/b2)^p(s)) over g*'s breakpoints.
  const Grid& gg = gs.grid();
  const Eigen::Index n = gg.size();
  Eigen::ArrayXd q(n + 1);
  q[n] = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const double s = gg.right(k);
    q[k] = std::max(q[k + 1], G.head(s) / (s * m.weight()(s)));
  }

  ChainReport rep;
  auto observe = [&](int i, double lhs, double rhs, double t) {
    double ratio = 0.0;
    if (rhs > 0.0) ratio = lhs / rhs;
    else if (lhs > 0.0) ratio = std::numeric_limits<double>::infinity();
    if (ratio > rep.constants[static_cast<std::size_t>(i)]) {
      rep.constants[static_cast<std::size_t>(i)] = ratio;
      rep.argmax_t[static_cast<std::size_t>(i)] = t;
    }
  };
  for (double t : ts) {
    if (!(t > 0.0 && t <= 1.0)) continue;
    const double tp = p == 1.0 ? t : std::pow(t, p);
    const double s0 = m.contract(tp);
    const double Ft = F.head(tp);
    if (t < 1.0) observe(0, explicit_k(t).value, lp_k(t).value, t);
    observe(1, G.head(t), R.head(t), t);
    observe(2, G.head(s0), Ft, t);
    Eigen::Index k = std::lower_bound(gg.breakpoints().data(), gg.breakpoints().data() + n, s0) -
                     gg.breakpoints().data();
    double sup = q[std::min(k, n)];
    if (s0 > 0.0 && s0 < 1.0) sup = std::max(sup, G.head(s0) / (s0 * m.weight()(s0)));
    observe(3, tp * sup, Ft, t);
  }
  return rep;
}

}  // namespace rikit
