#pragma once

#include <span>
#include <vector>

#include "dnapprox/models/model_sample.hpp"
#include "dnapprox/models/rgg.hpp"
#include "dnapprox/rng.hpp"

namespace dnapprox {

/// A strip of depth lambda^{-1/2} (b, d] below the hypotenuse of the
/// triangle {a1, a2 >= 0, a1 + a2 <= 1}.
struct Strip {
  double b = 0.0;
  double d = 0.0;
};

/// Poisson(lambda) points on the triangle; Y_i counts the maximal points in
/// strip i.
struct MaxPointsModel {
  double lambda = 0.0;
  std::vector<Strip> strips;

  /// Throws DomainError unless lambda > 0 and 0 <= b_1 < d_1 <= b_2 < d_2 ...
  /// With `allow_empty`, b_i = d_i is accepted (an empty strip).
  static MaxPointsModel create(double lambda, std::vector<Strip> strips, bool allow_empty = false);
  int dim() const { return static_cast<int>(strips.size()); }
};

/// Strip membership by the defining inequalities:
/// max(1 - d/sqrt(l) - a1, 0) <= a2 < 1 - b/sqrt(l) - a1 and 0 <= a1 <= 1 - b/sqrt(l).
bool in_strip(const Point2& a, const Strip& s, double lambda);

/// Indices of the maximal points (no other point is >= in both
/// coordinates), by a descending-x sweep. Output sorted by index.
std::vector<std::size_t> extract_maximal_points(std::span<const Point2> points);

/// The whole process on the triangle: Poisson(lambda / 2) uniform points.
std::vector<Point2> mp_points(double lambda, RngStream& rng);

/// The process restricted to the band a1 + a2 >= 1 - depth. Any point that
/// dominates a band point lies in the band, so maximality inside the band is
/// decided by band points alone.
std::vector<Point2> mp_band_points(double lambda, double depth, RngStream& rng);

ModelSample mp_count(const MaxPointsModel& model, std::span<const Point2> points);

/// Y for one realisation, simulated on the band of depth max d_i / sqrt(lambda).
ModelSample mp_sample(const MaxPointsModel& model, RngStream& rng);

struct MaxPointsAsymptotics {
  /// (m_1, ..., m_k) sqrt(lambda)
  Eigen::VectorXd mean;
  /// [sigma_ik] sqrt(lambda)
  Eigen::MatrixXd cov;
  /// Unscaled constants.
  Eigen::VectorXd m_hat;
  Eigen::MatrixXd sigma;
  double quadrature_error = 0.0;
};

/// Large-lambda mean and covariance. Throws AccuracyError if the quadrature
/// error exceeds 1e-8.
MaxPointsAsymptotics mp_moments_asymptotic(const MaxPointsModel& model);

}  // namespace dnapprox
