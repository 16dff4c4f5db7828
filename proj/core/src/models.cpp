#include "biaslab/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "biaslab/errors.hpp"

namespace biaslab {

Parametrization Parametrization::Linear(Eigen::Index d) {
  return Parametrization(ParametrizationKind::Linear, d);
}

Parametrization Parametrization::DiagSigned(Eigen::Index d, int depth) {
  if (depth < 2) throw std::invalid_argument("DiagSigned: depth must be >= 2");
  Parametrization p(ParametrizationKind::DiagSigned, d);
  p.depth_ = depth;
  return p;
}

Parametrization Parametrization::MatrixFactorized(Eigen::Index d,
                                                  Eigen::Index width) {
  if (width < 1) throw std::invalid_argument("MatrixFactorized: width >= 1");
  Parametrization p(ParametrizationKind::MatrixFactorized, d);
  p.width_ = width;
  p.depth_ = 2;
  return p;
}

Parametrization Parametrization::MatrixSymmetric(Eigen::Index d,
                                                 Eigen::Index width) {
  if (width < 1) throw std::invalid_argument("MatrixSymmetric: width >= 1");
  Parametrization p(ParametrizationKind::MatrixSymmetric, d);
  p.width_ = width;
  p.depth_ = 2;
  return p;
}

Eigen::Index Parametrization::parameter_dim() const {
  switch (kind_) {
    case ParametrizationKind::Linear: return d_;
    case ParametrizationKind::DiagSigned: return 2 * d_;
    case ParametrizationKind::MatrixFactorized: return 2 * d_ * width_;
    case ParametrizationKind::MatrixSymmetric: return d_ * width_;
  }
  throw std::logic_error("unreachable");
}

Eigen::Index Parametrization::predictor_dim() const {
  return is_matrix_kind() ? d_ * d_ : d_;
}

bool Parametrization::is_matrix_kind() const {
  return kind_ == ParametrizationKind::MatrixFactorized ||
         kind_ == ParametrizationKind::MatrixSymmetric;
}

void Parametrization::check_param(const Vector& w) const {
  if (w.size() != parameter_dim()) {
    std::ostringstream msg;
    msg << "Parametrization: expected " << parameter_dim()
        << " parameters, got " << w.size();
    throw std::invalid_argument(msg.str());
  }
  if (kind_ == ParametrizationKind::DiagSigned && depth_ % 2 == 1 &&
      (w.array() < 0.0).any()) {
    throw DomainError(
        "DiagSigned with odd depth requires nonnegative w+/w- components");
  }
}

Vector Parametrization::positive_part(const Vector& w) const {
  return w.head(d_);
}

Vector Parametrization::negative_part(const Vector& w) const {
  return w.tail(d_);
}

Vector Parametrization::forward(const Vector& w) const {
  check_param(w);
  switch (kind_) {
    case ParametrizationKind::Linear:
      return w;
    case ParametrizationKind::DiagSigned: {
      const auto wp = w.head(d_).array();
      const auto wm = w.tail(d_).array();
      return (wp.pow(depth_) - wm.pow(depth_)).matrix();
    }
    case ParametrizationKind::MatrixFactorized:
    case ParametrizationKind::MatrixSymmetric: {
      const Matrix M = forward_matrix(w);
      return Eigen::Map<const Vector>(M.data(), M.size());
    }
  }
  throw std::logic_error("unreachable");
}

Matrix Parametrization::forward_matrix(const Vector& w) const {
  check_param(w);
  if (kind_ == ParametrizationKind::MatrixFactorized) {
    const Eigen::Map<const Matrix> U(w.data(), d_, width_);
    const Eigen::Map<const Matrix> V(w.data() + d_ * width_, d_, width_);
    return U * V.transpose();
  }
  if (kind_ == ParametrizationKind::MatrixSymmetric) {
    const Eigen::Map<const Matrix> W(w.data(), d_, width_);
    return W * W.transpose();
  }
  throw std::invalid_argument("forward_matrix: not a matrix parametrization");
}

Matrix Parametrization::jacobian(const Vector& w) const {
  check_param(w);
  switch (kind_) {
    case ParametrizationKind::Linear:
      return Matrix::Identity(d_, d_);
    case ParametrizationKind::DiagSigned: {
      Matrix J = Matrix::Zero(d_, 2 * d_);
      const double D = static_cast<double>(depth_);
      for (Eigen::Index i = 0; i < d_; ++i) {
        J(i, i) = D * std::pow(w(i), depth_ - 1);
        J(i, d_ + i) = -D * std::pow(w(d_ + i), depth_ - 1);
      }
      return J;
    }
    case ParametrizationKind::MatrixFactorized: {
      const Eigen::Map<const Matrix> U(w.data(), d_, width_);
      const Eigen::Map<const Matrix> V(w.data() + d_ * width_, d_, width_);
      Matrix J = Matrix::Zero(d_ * d_, 2 * d_ * width_);
      // M(i,j) = Σ_l U(i,l)V(j,l); vec is column-major: row index i + j·d.
      for (Eigen::Index j = 0; j < d_; ++j) {
        for (Eigen::Index i = 0; i < d_; ++i) {
          const Eigen::Index row = i + j * d_;
          for (Eigen::Index l = 0; l < width_; ++l) {
            J(row, i + l * d_) = V(j, l);
            J(row, d_ * width_ + j + l * d_) = U(i, l);
          }
        }
      }
      return J;
    }
    case ParametrizationKind::MatrixSymmetric: {
      const Eigen::Map<const Matrix> W(w.data(), d_, width_);
      Matrix J = Matrix::Zero(d_ * d_, d_ * width_);
      for (Eigen::Index j = 0; j < d_; ++j) {
        for (Eigen::Index i = 0; i < d_; ++i) {
          const Eigen::Index row = i + j * d_;
          for (Eigen::Index l = 0; l < width_; ++l) {
            J(row, i + l * d_) += W(j, l);
            J(row, j + l * d_) += W(i, l);
          }
        }
      }
      return J;
    }
  }
  throw std::logic_error("unreachable");
}

Matrix Parametrization::tangent_kernel(const Vector& w, const Matrix& X) const {
  if (is_matrix_kind()) {
    throw std::invalid_argument(
        "tangent_kernel: defined for vector parametrizations only");
  }
  check_param(w);
  if (X.cols() != d_) {
    throw std::invalid_argument("tangent_kernel: X column count mismatch");
  }
  // ∇_w f(w,x) = Jᵀx, so K = X·(JJᵀ)·Xᵀ.
  const Matrix JJt = induced_metric_inverse(w);
  return X * JJt * X.transpose();
}

Matrix Parametrization::induced_metric_inverse(const Vector& w) const {
  check_param(w);
  switch (kind_) {
    case ParametrizationKind::Linear:
      return Matrix::Identity(d_, d_);
    case ParametrizationKind::DiagSigned: {
      const double D = static_cast<double>(depth_);
      Vector diag(d_);
      for (Eigen::Index i = 0; i < d_; ++i) {
        const double gp = std::pow(w(i), depth_ - 1);
        const double gm = std::pow(w(d_ + i), depth_ - 1);
        diag(i) = D * D * (gp * gp + gm * gm);
      }
      return diag.asDiagonal();
    }
    default: {
      const Matrix J = jacobian(w);
      return J * J.transpose();
    }
  }
}

Vector Parametrization::scaled_ones_init(double alpha) const {
  return alpha * Vector::Ones(parameter_dim());
}

}  // namespace biaslab
