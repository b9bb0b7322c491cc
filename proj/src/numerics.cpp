#include "dnapprox/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "dnapprox/errors.hpp"

namespace dnapprox {

double normal_cdf(double x) noexcept {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_sf(double x) noexcept {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("std_normal_cdf: non-finite argument");
  return normal_cdf(x);
}

double normal_interval(double a, double b) noexcept {
  if (!(a < b)) return 0.0;
  // Both ends in the upper tail: difference of survival functions.
  if (a > 0.0) return std::max(0.0, normal_sf(a) - normal_sf(b));
  return std::max(0.0, normal_cdf(b) - normal_cdf(a));
}

double std_normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("std_normal_quantile: p outside [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double gauss_kernel(double x) noexcept { return std::exp(-0.5 * x * x); }

namespace {

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece apply_rule(const std::function<double(double)>& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0;
  double l1 = 0.0;
  const double v = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
  return {a, b, v, err};
}

constexpr std::size_t kRulePoints = 15;

}  // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              const QuadratureOptions& opts) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_1d: bounds must be finite");
  if (a > b) throw DomainError("integrate_1d: requires a <= b");
  if (!(opts.tol > 0.0)) throw DomainError("integrate_1d: tol must be positive");
  if (a == b) return {0.0, 0.0};

  std::priority_queue<Piece> pieces;
  Piece first = apply_rule(f, a, b);
  double total = first.value;
  double total_err = first.error;
  std::size_t evals = kRulePoints;
  pieces.push(first);

  while (total_err > opts.tol) {
    if (evals + 2 * kRulePoints > opts.max_evaluations) {
      throw AccuracyError("integrate_1d: evaluation budget exhausted", total, total_err);
    }
    Piece worst = pieces.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw AccuracyError("integrate_1d: interval cannot be subdivided further", total, total_err);
    }
    pieces.pop();
    Piece left = apply_rule(f, worst.a, mid);
    Piece right = apply_rule(f, mid, worst.b);
    evals += 2 * kRulePoints;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    pieces.push(left);
    pieces.push(right);
    // Re-sum periodically so the running error does not drift below zero.
    if (total_err <= opts.tol) {
      double v = 0.0;
      double e = 0.0;
      auto copy = pieces;
      while (!copy.empty()) {
        v += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = v;
      total_err = e;
    }
  }
  return {total, std::max(0.0, total_err)};
}

QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              double tol) {
  QuadratureOptions opts;
  opts.tol = tol;
  return integrate_1d(f, a, b, opts);
}

}  // namespace dnapprox
