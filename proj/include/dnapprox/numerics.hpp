#pragma once

#include <cstddef>
#include <functional>

namespace dnapprox {

/// Standard normal CDF. Throws DomainError for non-finite x.
double std_normal_cdf(double x);

/// Φ(x) for extended reals: Φ(-inf) = 0, Φ(inf) = 1.
double normal_cdf(double x) noexcept;
/// 1 - Φ(x), accurate in the upper tail.
double normal_sf(double x) noexcept;
/// Φ(b) - Φ(a) for a <= b, evaluated on the tail side to avoid cancellation.
double normal_interval(double a, double b) noexcept;
/// Φ^{-1}(p) for p in (0, 1); returns ±inf at 0 and 1.
double std_normal_quantile(double p);

/// Unnormalized Gaussian kernel exp(-x^2/2).
double gauss_kernel(double x) noexcept;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

struct QuadratureOptions {
  double tol = 1e-10;
  std::size_t max_evaluations = 1'000'000;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature over a finite interval with
/// global bisection of the worst subinterval. Throws AccuracyError (with the
/// best estimate attached) when the evaluation budget runs out first.
QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              const QuadratureOptions& opts = {});
QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              double tol);

/// Truncation point for integrals of exp(-x^2/2) over [a, inf): the kernel is
/// below 1e-16 beyond it.
inline constexpr double kGaussTruncation = 8.6;

}  // namespace dnapprox
