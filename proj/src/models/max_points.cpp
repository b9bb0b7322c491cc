#include "dnapprox/models/max_points.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dnapprox/errors.hpp"
#include "dnapprox/numerics.hpp"

namespace dnapprox {

MaxPointsModel MaxPointsModel::create(double lambda, std::vector<Strip> strips, bool allow_empty) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("MaxPointsModel: lambda must be positive");
  if (strips.empty()) throw DomainError("MaxPointsModel: no strips");
  double floor = 0.0;
  for (const auto& s : strips) {
    const bool width_ok = allow_empty ? s.b <= s.d : s.b < s.d;
    if (!(s.b >= floor) || !width_ok || !std::isfinite(s.d)) {
      throw DomainError("MaxPointsModel: strips must satisfy 0 <= b1 < d1 <= b2 < d2 ...");
    }
    floor = s.d;
  }
  return MaxPointsModel{lambda, std::move(strips)};
}

bool in_strip(const Point2& a, const Strip& s, double lambda) {
  const double root = std::sqrt(lambda);
  const double lo = std::max(1.0 - s.d / root - a.x, 0.0);
  const double hi = 1.0 - s.b / root - a.x;
  return lo <= a.y && a.y < hi && 0.0 <= a.x && a.x <= 1.0 - s.b / root;
}

std::vector<std::size_t> extract_maximal_points(std::span<const Point2> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].x != points[b].x) return points[a].x > points[b].x;
    return points[a].y > points[b].y;
  });
  std::vector<std::size_t> out;
  double best_y = -std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    if (points[i].y > best_y) {
      out.push_back(i);
      best_y = points[i].y;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point2> mp_points(double lambda, RngStream& rng) {
  const auto count = rng.poisson(0.5 * lambda);
  std::vector<Point2> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) {
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    p = {u, v};
  }
  return pts;
}

std::vector<Point2> mp_band_points(double lambda, double depth, RngStream& rng) {
  if (depth >= 1.0) return mp_points(lambda, rng);
  const double inner = (1.0 - depth) * (1.0 - depth);
  const auto count = rng.poisson(0.5 * lambda * (1.0 - inner));
  std::vector<Point2> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) {
    // a1 + a2 = s has density proportional to s on [1 - depth, 1].
    const double s = std::sqrt(inner + (1.0 - inner) * rng.uniform());
    const double a1 = s * rng.uniform();
    p = {a1, s - a1};
  }
  return pts;
}

ModelSample mp_count(const MaxPointsModel& model, std::span<const Point2> points) {
  ModelSample out;
  out.w.assign(static_cast<std::size_t>(model.dim()), 0);
  for (std::size_t i : extract_maximal_points(points)) {
    for (int k = 0; k < model.dim(); ++k) {
      if (in_strip(points[i], model.strips[static_cast<std::size_t>(k)], model.lambda)) {
        ++out.w[static_cast<std::size_t>(k)];
      }
    }
  }
  return out;
}

ModelSample mp_sample(const MaxPointsModel& model, RngStream& rng) {
  const double depth = model.strips.back().d / std::sqrt(model.lambda);
  const auto pts = mp_band_points(model.lambda, depth, rng);
  return mp_count(model, pts);
}

namespace {

constexpr double kInnerTol = 1e-11;
const double kRootTwoPi = std::sqrt(2.0 * std::numbers::pi);

double phi(double x) { return std::exp(-0.5 * x * x); }

// int_a^b phi
double gauss_mass(double a, double b) { return kRootTwoPi * normal_interval(a, b); }

}  // namespace

MaxPointsAsymptotics mp_moments_asymptotic(const MaxPointsModel& model) {
  const int k = model.dim();
  MaxPointsAsymptotics out;
  out.m_hat.resize(k);
  out.sigma.resize(k, k);
  double err = 0.0;
  auto integrate = [&](const std::function<double(double)>& f, double a, double b, double weight) {
    if (a >= b) return 0.0;
    const auto r = integrate_1d(f, a, b, kInnerTol);
    err += std::abs(weight) * r.error_estimate;
    return r.value;
  };

  for (int i = 0; i < k; ++i) out.m_hat[i] = gauss_mass(model.strips[static_cast<std::size_t>(i)].b,
                                                        model.strips[static_cast<std::size_t>(i)].d);
  for (int i = 0; i < k; ++i) {
    const auto [b, d] = model.strips[static_cast<std::size_t>(i)];
    const double m = out.m_hat[i];
    const double inv = integrate([](double y) { return 1.0 / phi(y); }, 0.0, b, 2.0 * m * m);
    // int_b^d phi(z) int_b^z 1/phi(y) int_y^d phi(x), with the z and y
    // integrations exchanged.
    const double nested = integrate(
        [d](double y) {
          const double g = gauss_mass(y, d);
          return g * g / phi(y);
        },
        b, d, 2.0);
    out.sigma(i, i) = m + 2.0 * m * m * inv + 2.0 * nested - 2.0 * m * (phi(b) - phi(d));
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto [b1, d1] = model.strips[static_cast<std::size_t>(i)];
      const auto [b2, d2] = model.strips[static_cast<std::size_t>(j)];
      const double m1 = out.m_hat[i];
      const double m2 = out.m_hat[j];
      // int_{b1}^{d1} phi(z) int_0^z 1/phi(y), exchanged
      const double nested =
          m1 * integrate([](double y) { return 1.0 / phi(y); }, 0.0, b1, 2.0 * m2 * m1) +
          integrate([d1](double y) { return gauss_mass(y, d1) / phi(y); }, b1, d1, 2.0 * m2);
      const double s = 2.0 * m2 * nested - (m1 * (phi(b2) - phi(d2)) + m2 * (phi(b1) - phi(d1)));
      out.sigma(i, j) = s;
      out.sigma(j, i) = s;
    }
  }
  out.quadrature_error = err;
  if (err > 1e-8) throw AccuracyError("mp_moments_asymptotic: quadrature error above 1e-8", 0.0, err);
  const double root = std::sqrt(model.lambda);
  out.mean = out.m_hat * root;
  out.cov = out.sigma * root;
  return out;
}

}  // namespace dnapprox
