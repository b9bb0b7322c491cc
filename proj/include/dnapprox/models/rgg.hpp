#pragma once

#include <span>
#include <vector>

#include "dnapprox/models/model_sample.hpp"
#include "dnapprox/rng.hpp"

namespace dnapprox {

/// M = n^2 uniform points on the n x n torus; points within distance r are
/// joined. W = (triangles, induced 2-stars) over all 3-subsets.
struct RggModel {
  int n = 0;
  double r = 0.0;

  /// Throws DomainError unless n >= 1 and 0 < r < n / 4.
  static RggModel create(int n, double r);
  long long points() const { return static_cast<long long>(n) * n; }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Wraparound distance on the side-`side` torus.
double torus_distance(const Point2& a, const Point2& b, double side);

std::vector<Point2> rgg_points(const RggModel& model, RngStream& rng);

/// (W1, W2) for a fixed configuration: W1 counts 3-subsets with all three
/// pairs within r, W2 those with exactly two. Grid binning with cells of
/// side >= r; falls back to all pairs when the torus is under three cells
/// wide.
IntVec rgg_count(std::span<const Point2> points, double side, double r);

ModelSample rgg_sample(const RggModel& model, RngStream& rng);

struct PairProbs {
  double p1 = 0.0;
  double p2 = 0.0;
  double se1 = 0.0;
  double se2 = 0.0;
};

/// n^4 P[three uniform torus points induce a triangle / a 2-star]. The first
/// point is fixed by translation invariance and the other two are drawn
/// in the window of side w = min(4r, n) around it, outside of which no
/// connected triple can reach; n^4 P = w^4 P_window.
PairProbs rgg_pair_probs_mc(double r, double n, std::size_t reps, RngStream& rng);

/// Exact Euclidean-regime values (r < n / 4): p1 = (pi^2 - 3 sqrt(3) pi / 4) r^4,
/// p2 = (9 sqrt(3) pi / 4) r^4.
PairProbs rgg_pair_probs_exact(double r);

}  // namespace dnapprox
