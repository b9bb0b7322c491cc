#pragma once

#include <Eigen/Dense>

#include "dnapprox/lattice_gaussian.hpp"

namespace dnapprox {

/// One replicate of a model's count vector W.
struct ModelSample {
  IntVec w;
  /// Per-summand X^(j) (one row each) when requested and available.
  Eigen::MatrixXd summands;
};

/// Mean and covariance of a count vector.
struct Moments {
  Eigen::VectorXd mu;
  Eigen::MatrixXd V;
};

}  // namespace dnapprox
