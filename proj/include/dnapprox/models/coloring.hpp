#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dnapprox/dependency.hpp"
#include "dnapprox/models/model_sample.hpp"
#include "dnapprox/stein_bounds.hpp"
#include "dnapprox/tv_distance.hpp"

namespace dnapprox {

/// Vertices of a simple graph coloured i.i.d. from pi; W_i counts the edges
/// with both ends of colour i. With thinning each edge is kept
/// independently with probability p.
class ColoringModel final : public DecomposableModel {
 public:
  using Edge = std::pair<int, int>;

  /// Throws DomainError unless the graph is simple with at least one edge
  /// and pi is a probability vector (sum within 1e-12).
  static ColoringModel create(int vertices, std::vector<Edge> edges, Eigen::VectorXd pi,
                              std::optional<double> thinning_p = std::nullopt);
  static ColoringModel cycle(int vertices, Eigen::VectorXd pi, std::optional<double> thinning_p = std::nullopt);

  int vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Eigen::VectorXd& pi() const { return pi_; }
  std::optional<double> thinning_p() const { return thinning_p_; }
  int max_degree() const;

  /// Edge j has M_j = its two endpoints.
  const IntersectionGraph& dependency_graph() const override { return graph_; }
  int dim() const override { return static_cast<int>(pi_.size()); }
  Eigen::MatrixXd summand_means() const override;
  void sample_summands(RngStream& rng, Eigen::MatrixXd& x) const override;

 private:
  ColoringModel(int vertices, std::vector<Edge> edges, Eigen::VectorXd pi, std::optional<double> p,
                IntersectionGraph graph);

  int vertices_;
  std::vector<Edge> edges_;
  Eigen::VectorXd pi_;
  std::optional<double> thinning_p_;
  IntersectionGraph graph_;
};

/// Mean of |N_j| over edges, i.e. of (deg l + deg l' - 2).
double gc_mean_neighbours(const ColoringModel& model);

Moments gc_moments(const ColoringModel& model);

ModelSample gc_sample(const ColoringModel& model, RngStream& rng, bool with_summands = false);

inline constexpr double kColoringEnumerationBudget = 2e6;

/// Exact law of W by enumerating all d^M colourings (then binomial thinning).
/// Throws BudgetError beyond kColoringEnumerationBudget colourings.
PmfTable gc_exact_pmf(const ColoringModel& model);

/// Smoothness coefficient from the Mineka-coupling recipe for colourings:
/// independent vertex sets of size s = floor(M / (delta* + 1)) - 3 with
/// T = s min(pi_i, pi_i') h_min / 2 and eta = 4 delta*^2 / (s h_min), best i'
/// for each direction i. Returns 1 when the recipe gives nothing (d = 2, or
/// s <= 0).
double gc_mineka_epsilon(const ColoringModel& model);

}  // namespace dnapprox
