#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dnapprox/dependency.hpp"
#include "dnapprox/lattice_gaussian.hpp"
#include "dnapprox/rng.hpp"
#include "dnapprox/tv_distance.hpp"

namespace dnapprox {

/// Normalization of the Stein operator: m = ceil(Tr V / d), c = mu / m,
/// Sigma = V / m.
struct SteinContext {
  Eigen::VectorXd mu;
  Eigen::MatrixXd V;
  long m = 1;
  Eigen::VectorXd c;
  Eigen::MatrixXd Sigma;
  /// lambda_max / lambda_min of Sigma; infinite when V is singular.
  double cond = 1.0;
  double gamma = 1.0;

  int dim() const { return static_cast<int>(mu.size()); }
};

/// Throws DomainError if V is not symmetric PSD with positive trace, or if
/// gamma < 1. Tr V / d is rounded up after removing a relative 1e-12, so a
/// trace that is an integer multiple of d up to rounding keeps its value.
SteinContext context_from_moments(const Eigen::VectorXd& mu, const Eigen::MatrixXd& V, double gamma = 1.0);

using LatticeFunction = std::function<double(const IntVec&)>;

/// m Tr(Sigma Delta^2 h)(z) - (z - mc)^T Delta h(z) with forward differences.
double apply_stein_operator(const SteinContext& ctx, const LatticeFunction& h, const IntVec& z);

/// A sum W = sum_j X^(j) over the summands of an intersection graph.
class DecomposableModel {
 public:
  virtual ~DecomposableModel() = default;
  virtual int dim() const = 0;
  virtual const IntersectionGraph& dependency_graph() const = 0;
  /// E X^(j), one row per summand.
  virtual Eigen::MatrixXd summand_means() const = 0;
  /// One replicate of (X^(1), ..., X^(n)), one row per summand.
  virtual void sample_summands(RngStream& rng, Eigen::MatrixXd& x) const = 0;
};

/// Summands given by a graph and means, sampled through a callback.
class FunctionalModel final : public DecomposableModel {
 public:
  using Sampler = std::function<void(RngStream&, Eigen::MatrixXd&)>;
  FunctionalModel(IntersectionGraph graph, Eigen::MatrixXd means, Sampler sampler);
  int dim() const override { return static_cast<int>(means_.cols()); }
  const IntersectionGraph& dependency_graph() const override { return graph_; }
  Eigen::MatrixXd summand_means() const override { return means_; }
  void sample_summands(RngStream& rng, Eigen::MatrixXd& x) const override { sampler_(rng, x); }

 private:
  IntersectionGraph graph_;
  Eigen::MatrixXd means_;
  Sampler sampler_;
};

struct MomentSums {
  double H0 = 0.0, H1 = 0.0, H21 = 0.0, H22 = 0.0, H23 = 0.0, H24 = 0.0, H2 = 0.0;
  /// Batch-means standard errors, in the same order.
  double se_H0 = 0.0, se_H1 = 0.0, se_H21 = 0.0, se_H22 = 0.0, se_H23 = 0.0, se_H24 = 0.0, se_H2 = 0.0;
  /// Largest E|Z^(j)|^2 / (d m) and E|Z^(j,k)|^2 / (d m) seen.
  double max_zhat_ratio = 0.0;
  /// Pairs (j) or (j, k) whose estimated second moment exceeds d m.
  std::size_t zhat_violations = 0;
  int reps = 0;
};

/// Monte-Carlo estimates of H0, H1, H21..H24 (|.| is the Euclidean norm).
/// Requires reps >= 100; replicate r uses rng.split(r).
MomentSums moment_sums_mc(const DecomposableModel& model, long m, int reps, const RngStream& rng);

/// max_j d^{-3/2} E|X^(j)|^3 by Monte Carlo. Bounds need gamma >= 1, so
/// callers pass max(1, value) on.
double third_moment_gamma_mc(const DecomposableModel& model, int reps, const RngStream& rng);

/// sqrt(2 / (pi T)) + eta, clipped to [0, 1].
double mineka_smoothness_bound(double T, double eta);

/// Plug-in TV between the empirical law of `reps` sampler draws and its
/// translate by e^(direction), with a bootstrap standard error.
TvEstimate empirical_shift_tv(const std::function<IntVec(RngStream&)>& sampler, int direction, std::size_t reps,
                              const RngStream& rng, int bootstrap_resamples = 200);

struct BoundBreakdown {
  int d = 0;
  double m = 0.0;
  double dbar2 = 0.0;
  double gamma = 0.0;
  double eps_w = 0.0;
  /// d^3 log(m) eps_w (d + 3 gamma dbar2)
  double eps_w_term = 0.0;
  /// d^3 log(m) m^{-1/2} (d + 3 gamma dbar2)
  double msqrt_term = 0.0;
  double combined = 0.0;
};

/// d^3 log(m) (m^{-1/2} + eps_w) (d + 3 gamma dbar2), without the universal
/// constant. Throws DomainError if m < 2 or eps_w outside [0, 1].
BoundBreakdown corollary_bound(int d, double m, double dbar2, double gamma, double eps_w);
BoundBreakdown corollary_bound(const SteinContext& ctx, const NeighborhoodStats& stats, double eps_w);

/// Union of M_{j'} over j' in N_j ∪ N_k.
std::vector<int> smoothness_exclusion_set(const IntersectionGraph& graph, int j, int k);

/// Ascending greedy choice of l outside `excluded` whose L_l are pairwise
/// disjoint.
std::vector<int> greedy_disjoint_family(const IntersectionGraph& graph, const std::vector<int>& excluded);

/// rho(Sigma)^{-3/2} / 72, the admissible perturbation size for a given
/// condition number.
double delta0(double cond);

struct TestFunction {
  std::string name;
  LatticeFunction h;
};

inline constexpr int kTestBatteryVersion = 1;

/// Fixed test functions for checking the operator. Each coordinate gets four
/// (linear, square, clipped, indicator); consecutive pairs get a product.
std::vector<TestFunction> stein_test_battery(const SteinContext& ctx);

}  // namespace dnapprox
