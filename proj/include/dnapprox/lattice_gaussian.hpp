#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dnapprox/rng.hpp"

namespace dnapprox {

/// A point of Z^d.
using IntVec = std::vector<std::int64_t>;

/// Mean and covariance of a discrete normal DN_d(mu, V) on Z^d: the law that
/// gives each integer vector z the N_d(mu, V) mass of the unit box
/// [z - 1/2, z + 1/2).
class DnParams {
 public:
  /// Validates symmetry (relative 1e-12) and positive definiteness
  /// (lambda_min > 1e-10 * lambda_max). Throws DomainError otherwise; singular
  /// covariances must be reduced by dropping a coordinate, not regularized.
  static DnParams create(Eigen::VectorXd mu, Eigen::MatrixXd sigma);

  int dim() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  /// Lower Cholesky factor of sigma.
  const Eigen::MatrixXd& cholesky() const { return chol_; }
  double min_eigenvalue() const { return lambda_min_; }
  double max_eigenvalue() const { return lambda_max_; }
  double condition_number() const { return lambda_max_ / lambda_min_; }

 private:
  DnParams() = default;

  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

struct LatticeBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Throws DomainError unless lower_i < upper_i for every i.
  static LatticeBox make(Eigen::VectorXd lower, Eigen::VectorXd upper);
  /// The rounding cell [z - 1/2, z + 1/2) of an integer vector.
  static LatticeBox cell(const IntVec& z);
};

struct BoxProbability {
  double value = 0.0;
  /// Zero for the deterministic d = 1, 2 paths.
  double std_error = 0.0;
};

struct QmcOptions {
  int randomizations = 16;
  std::size_t min_points = 512;
  /// Per randomization; the adaptive estimator doubles up to this.
  std::size_t max_points = std::size_t{1} << 18;
};

/// P[X in box] for X ~ N_d(mu, V). Closed form for d = 1, the bivariate
/// rectangle algorithm for d = 2, randomized-lattice Genz QMC for d >= 3.
/// Throws AccuracyError (estimate attached) if QMC cannot reach tol.
BoxProbability box_probability(const DnParams& params, const LatticeBox& box, double tol,
                               RngStream& rng, const QmcOptions& opts = {});
/// Same, with an internal fixed-seed stream for the QMC path.
BoxProbability box_probability(const DnParams& params, const LatticeBox& box, double tol = 1e-10);

/// The Genz separation-of-variables estimator for any d >= 1 (used directly
/// by the d = 2 cross-check).
BoxProbability qmc_box_probability(const DnParams& params, const LatticeBox& box, double tol,
                                   RngStream& rng, const QmcOptions& opts = {});

/// Standard bivariate normal upper orthant P[X > h, Y > k] with correlation
/// r (Drezner-Wesolowsky with Genz's refinements). Accepts infinite h, k.
double bivariate_upper(double h, double k, double r);

/// DN_d(mu, V) mass of the integer vector z.
double dn_pmf(const DnParams& params, const IntVec& z, double tol = 1e-10);

/// Exact DN_d draw: a N_d(mu, V) draw rounded into its containing unit cell.
IntVec dn_sample(const DnParams& params, RngStream& rng);

/// r with P[|X - mu| > r] <= epsilon, from |X - mu|^2 <= lambda_max chi^2_d.
/// Returns 0 when epsilon >= 1.
double support_radius(const DnParams& params, double epsilon);

/// All integer vectors whose rounding cell meets the closed ball of radius r
/// about mu, in lexicographic order.
std::vector<IntVec> lattice_ball(const DnParams& params, double radius);

struct CellMasses {
  std::vector<double> mass;
  /// Largest per-cell QMC standard error (0 for d <= 2).
  double max_std_error = 0.0;
};

struct CellMassOptions {
  int randomizations = 16;
  std::size_t points = 256;
};

/// DN masses for a list of cells. For d >= 3 every cell reuses the same QMC
/// points, so the masses of any complete partition of Z^d sum to one for each
/// randomization; the table is a genuine sub-probability.
CellMasses dn_cell_masses(const DnParams& params, std::span<const IntVec> cells, RngStream& rng,
                          const CellMassOptions& opts = {});

}  // namespace dnapprox
