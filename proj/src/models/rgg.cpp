#include "dnapprox/models/rgg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dnapprox/errors.hpp"

namespace dnapprox {

RggModel RggModel::create(int n, double r) {
  if (n < 1) throw DomainError("RggModel: torus side must be positive");
  if (!(r > 0.0 && r < n / 4.0)) throw DomainError("RggModel: need 0 < r < n/4");
  return RggModel{n, r};
}

namespace {

double wrap_delta(double a, double b, double side) {
  const double d = std::abs(a - b);
  return std::min(d, side - d);
}

}  // namespace

double torus_distance(const Point2& a, const Point2& b, double side) {
  return std::hypot(wrap_delta(a.x, b.x, side), wrap_delta(a.y, b.y, side));
}

std::vector<Point2> rgg_points(const RggModel& model, RngStream& rng) {
  std::vector<Point2> pts(static_cast<std::size_t>(model.points()));
  for (auto& p : pts) {
    p.x = model.n * rng.uniform();
    p.y = model.n * rng.uniform();
  }
  return pts;
}

IntVec rgg_count(std::span<const Point2> points, double side, double r) {
  const std::size_t M = points.size();
  std::vector<std::vector<int>> adj(M);
  auto close = [&](std::size_t a, std::size_t b) { return torus_distance(points[a], points[b], side) <= r; };
  const int g = static_cast<int>(std::floor(side / r));
  if (g < 3) {
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t b = a + 1; b < M; ++b) {
        if (close(a, b)) {
          adj[a].push_back(static_cast<int>(b));
          adj[b].push_back(static_cast<int>(a));
        }
      }
    }
  } else {
    const double cell = side / g;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
    auto coord = [&](double v) { return std::clamp(static_cast<int>(v / cell), 0, g - 1); };
    for (std::size_t a = 0; a < M; ++a) {
      bins[static_cast<std::size_t>(coord(points[a].x) * g + coord(points[a].y))].push_back(static_cast<int>(a));
    }
    for (std::size_t a = 0; a < M; ++a) {
      const int cx = coord(points[a].x);
      const int cy = coord(points[a].y);
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          const int bx = (cx + dx + g) % g;
          const int by = (cy + dy + g) % g;
          for (int b : bins[static_cast<std::size_t>(bx * g + by)]) {
            if (static_cast<std::size_t>(b) != a && close(a, static_cast<std::size_t>(b))) {
              adj[a].push_back(b);
            }
          }
        }
      }
    }
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());

  std::int64_t triangles = 0;
  std::int64_t wedges = 0;
  for (std::size_t a = 0; a < M; ++a) {
    const auto deg = static_cast<std::int64_t>(adj[a].size());
    wedges += deg * (deg - 1) / 2;
    for (int b : adj[a]) {
      if (static_cast<std::size_t>(b) <= a) continue;
      // common neighbours c > b
      const auto& la = adj[a];
      const auto& lb = adj[static_cast<std::size_t>(b)];
      auto ia = std::upper_bound(la.begin(), la.end(), b);
      auto ib = std::upper_bound(lb.begin(), lb.end(), b);
      while (ia != la.end() && ib != lb.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++triangles;
          ++ia;
          ++ib;
        }
      }
    }
  }
  return {triangles, wedges - 3 * triangles};
}

ModelSample rgg_sample(const RggModel& model, RngStream& rng) {
  const auto pts = rgg_points(model, rng);
  return {rgg_count(pts, model.n, model.r), {}};
}

PairProbs rgg_pair_probs_mc(double r, double n, std::size_t reps, RngStream& rng) {
  if (!(r > 0.0) || !(n > 0.0)) throw DomainError("rgg_pair_probs_mc: r and n must be positive");
  if (reps < 2) throw DomainError("rgg_pair_probs_mc: need at least two replicates");
  const bool window = 4.0 * r < n;
  const double w = window ? 4.0 * r : n;
  const Point2 origin{0.5 * n, 0.5 * n};
  std::size_t hit1 = 0, hit2 = 0;
  for (std::size_t i = 0; i < reps; ++i) {
    Point2 b, c;
    if (window) {
      b = {origin.x + w * (rng.uniform() - 0.5), origin.y + w * (rng.uniform() - 0.5)};
      c = {origin.x + w * (rng.uniform() - 0.5), origin.y + w * (rng.uniform() - 0.5)};
    } else {
      b = {n * rng.uniform(), n * rng.uniform()};
      c = {n * rng.uniform(), n * rng.uniform()};
    }
    const int links = (torus_distance(origin, b, n) <= r) + (torus_distance(origin, c, n) <= r) +
                      (torus_distance(b, c, n) <= r);
    hit1 += links == 3;
    hit2 += links == 2;
  }
  const double scale = std::pow(w, 4);
  const double N = static_cast<double>(reps);
  const double f1 = static_cast<double>(hit1) / N;
  const double f2 = static_cast<double>(hit2) / N;
  return {scale * f1, scale * f2, scale * std::sqrt(f1 * (1.0 - f1) / N), scale * std::sqrt(f2 * (1.0 - f2) / N)};
}

PairProbs rgg_pair_probs_exact(double r) {
  const double pi = std::numbers::pi;
  const double r4 = std::pow(r, 4);
  const double s3 = std::sqrt(3.0);
  return {(pi * pi - 3.0 * s3 * pi / 4.0) * r4, 9.0 * s3 * pi / 4.0 * r4, 0.0, 0.0};
}

}  // namespace dnapprox
