#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace biaslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A regression/interpolation problem instance: n×d design, n responses,
/// optionally the planted truth that generated them.
struct Dataset {
  Matrix X;
  Vector y;
  std::optional<Vector> beta_star;
  std::uint64_t seed = 0;

  Eigen::Index n_samples() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

}  // namespace biaslab
