#include "rikit/numerics.hpp"

#include "rikit/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace rikit {

void ExactSum::add(double x) {
  std::size_t used = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[used++] = lo;
    x = hi;
  }
  partials_.resize(used);
  partials_.push_back(x);
}

double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round-half-even correction when the remaining tail shares lo's sign.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

namespace {

GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jacobi(i, i) = diag[i];
    if (i + 1 < n) {
      jacobi(i, i + 1) = off[i];
      jacobi(i + 1, i) = off[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes = solver.eigenvalues().array();
  rule.weights = mu0 * solver.eigenvectors().row(0).array().square().transpose();
  return rule;
}

template <class Build>
const GaussRule& cached_rule(std::map<int, GaussRule>& cache, std::mutex& mutex, int n, Build build) {
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  return cached_rule(cache, mutex, n, [](int m) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd off(std::max(m - 1, 0));
    for (int k = 1; k < m; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(diag, off, 2.0);
  });
}

const GaussRule& gauss_laguerre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  return cached_rule(cache, mutex, n, [](int m) {
    Eigen::VectorXd diag(m);
    Eigen::VectorXd off(std::max(m - 1, 0));
    for (int k = 0; k < m; ++k) diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < m; ++k) off[k - 1] = k;
    return golub_welsch(diag, off, 1.0);
  });
}

namespace {

// Legendre continued fraction, evaluated with the modified Lentz method.
// Converges for every real a once x > 0.
double incomplete_gamma_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 4e-16) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace

double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::domain_error, "upper_incomplete_gamma needs x > 0");
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (x >= 1.0) return incomplete_gamma_cf(a, x);
  // Small x with a <= 0: recur down from a base order in (0, 1].
  // Integer orders start from Gamma(0, x) = E_1(x).
  const bool integer = a == std::floor(a);
  const int steps = static_cast<int>(std::ceil(-a));
  double order = a + steps;
  double value = integer ? boost::math::expint(1, x) : boost::math::tgamma(order, x);
  for (int k = 0; k < steps; ++k) {
    order -= 1.0;
    value = (value - std::exp(order * std::log(x) - x)) / order;
  }
  return value;
}

}  // namespace rikit
