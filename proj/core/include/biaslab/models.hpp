#pragma once

#include "biaslab/types.hpp"

namespace biaslab {

enum class ParametrizationKind {
  Linear,           // β = w
  DiagSigned,       // β = w₊^D − w₋^D, parameters stacked [w₊; w₋]
  MatrixFactorized, // M = UVᵀ, parameters [vec(U); vec(V)]
  MatrixSymmetric,  // M = WWᵀ, parameters vec(W)
};

/// A map F from parameter space to predictor space (vector β or matrix M,
/// matrices are exposed flattened column-major). Exact Jacobian constants are
/// kept throughout: for the signed diagonal net the Jacobian rows are
/// ±D·diag(w±^{D−1}), including the factor D.
class Parametrization {
 public:
  static Parametrization Linear(Eigen::Index d);
  static Parametrization DiagSigned(Eigen::Index d, int depth);
  static Parametrization MatrixFactorized(Eigen::Index d, Eigen::Index width);
  static Parametrization MatrixSymmetric(Eigen::Index d, Eigen::Index width);

  ParametrizationKind kind() const { return kind_; }
  Eigen::Index dim() const { return d_; }
  int depth() const { return depth_; }
  Eigen::Index width() const { return width_; }
  Eigen::Index parameter_dim() const;
  Eigen::Index predictor_dim() const;
  bool is_matrix_kind() const;

  /// F(w); matrix kinds return vec(M) column-major.
  Vector forward(const Vector& w) const;
  Matrix forward_matrix(const Vector& w) const;

  /// Analytic Jacobian ∂F/∂w of shape predictor_dim × parameter_dim.
  Matrix jacobian(const Vector& w) const;

  /// Gram matrix K(xᵢ,xⱼ) = ⟨Jᵀxᵢ, Jᵀxⱼ⟩ of the parameter-gradients of
  /// f(w,x) = ⟨F(w), x⟩ at the rows of X. Vector kinds only.
  Matrix tangent_kernel(const Vector& w, const Matrix& X) const;

  /// J·Jᵀ, the inverse metric applied in the function-space dynamics
  /// β̇ = −(JJᵀ)·∇L(β).
  Matrix induced_metric_inverse(const Vector& w) const;

  /// Initial point w₊ = w₋ = α·1 (diag nets); linear kind returns α·1.
  Vector scaled_ones_init(double alpha) const;

  /// Split accessors for DiagSigned parameters.
  Vector positive_part(const Vector& w) const;
  Vector negative_part(const Vector& w) const;

 private:
  Parametrization(ParametrizationKind kind, Eigen::Index d)
      : kind_(kind), d_(d) {}
  void check_param(const Vector& w) const;

  ParametrizationKind kind_;
  Eigen::Index d_;
  int depth_ = 1;
  Eigen::Index width_ = 0;
};

}  // namespace biaslab
