#pragma once

#include "dnapprox/models/model_sample.hpp"
#include "dnapprox/rng.hpp"
#include "dnapprox/tv_distance.hpp"

namespace dnapprox {

/// Chain on states {0, ..., d}; W_n counts the visits to states 1..d during
/// steps 1..n from a fixed start.
class MarkovModel {
 public:
  /// Throws DomainError unless P is square, row-stochastic (1e-12), irreducible
  /// and aperiodic, and start, n are in range.
  static MarkovModel create(Eigen::MatrixXd P, int start, long n);

  const Eigen::MatrixXd& P() const { return P_; }
  int start() const { return start_; }
  long n() const { return n_; }
  int dim() const { return static_cast<int>(P_.rows()) - 1; }
  /// P_ii > 0 for every state.
  bool satisfies_a1() const;
  MarkovModel with_horizon(long n) const { return create(P_, start_, n); }

 private:
  MarkovModel(Eigen::MatrixXd P, int start, long n) : P_(std::move(P)), start_(start), n_(n) {}
  Eigen::MatrixXd P_;
  int start_;
  long n_;
};

struct MarkovMoments {
  /// Stationary mass of states 1..d.
  Eigen::VectorXd pi;
  /// Stationary law over all states.
  Eigen::VectorXd pi_full;
  /// Asymptotic covariance of n^{-1/2} W_n.
  Eigen::MatrixXd V;
  /// |P^k_ir - pi_r| <= C rho^k for the computed k.
  double C = 0.0;
  double rho = 0.0;
  /// Geometric bound on the truncated series tail.
  double series_error = 0.0;
  long terms = 0;
};

MarkovMoments mc_stationary_and_cov(const MarkovModel& model, double tol = 1e-13);

inline constexpr double kMarkovDpBudget = 5e7;

/// Exact law of W_n from `start` by dynamic programming over (state,
/// occupation vector). Throws BudgetError when (n+1)^d (d+1) exceeds the
/// budget.
PmfTable mc_occupation_exact_pmf(const MarkovModel& model, long n, int start, double budget = kMarkovDpBudget);

ModelSample mc_sample(const MarkovModel& model, RngStream& rng);

}  // namespace dnapprox
