#pragma once

#include <functional>

#include "biaslab/types.hpp"

namespace biaslab {

enum class PotentialKind { Euclidean, Mahalanobis, Entropic, PNorm, Hypentropy };

/// A strictly convex potential with value / gradient / Hessian and the
/// mirror-map pair ∇Ψ, ∇Ψ⁻¹. Immutable after construction.
///
/// Kinds:
///  - Euclidean      Ψ(w) = ½‖w‖₂²
///  - Mahalanobis    Ψ(w) = ½ wᵀQw, Q symmetric positive definite
///  - Entropic       Ψ(w) = Σᵢ wᵢ log(wᵢ·d), domain w > 0
///  - PNorm          Ψ(w) = 1/(2(p−1))·‖w‖_p², p ∈ (1, 2]
///  - Hypentropy     Ψ_α(w) = Σᵢ [wᵢ·asinh(wᵢ/(2α²)) − √(wᵢ²+4α⁴)]
///
/// The hypentropy normalization is the one whose Hessian is exactly
/// diag(1/√(w²+4α⁴)) (integrate that diagonal twice); other displays of this
/// potential differ by overall scale factors and additive constants, which
/// never change a Bregman projection.
class Potential {
 public:
  static Potential Euclidean(Eigen::Index dim);
  static Potential Mahalanobis(Matrix Q);
  static Potential Entropic(Eigen::Index dim);
  static Potential PNorm(Eigen::Index dim, double p);
  static Potential Hypentropy(Eigen::Index dim, double alpha);

  PotentialKind kind() const { return kind_; }
  Eigen::Index dimension() const { return dim_; }
  double alpha() const { return alpha_; }
  double p() const { return p_; }
  const Matrix& Q() const { return Q_; }

  bool in_domain(const Vector& w) const;
  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;
  Matrix hessian(const Vector& w) const;

  /// ∇Ψ : primal -> dual. Errors if w is outside the domain.
  Vector mirror_map(const Vector& w) const;
  /// ∇Ψ⁻¹ : dual -> primal. Closed forms everywhere except PNorm, which uses
  /// a safeguarded Newton solve (tol 1e-10) seeded from the dual-norm map.
  Vector inverse_mirror(const Vector& theta) const;

  /// Convex conjugate Ψ*(θ) = ⟨θ, ∇Ψ⁻¹(θ)⟩ − Ψ(∇Ψ⁻¹(θ)).
  double conjugate_value(const Vector& theta) const;

 private:
  Potential(PotentialKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}
  void check_dim(const Vector& w) const;

  PotentialKind kind_;
  Eigen::Index dim_;
  double alpha_ = 0.0;
  double p_ = 2.0;
  Matrix Q_;
  Matrix Q_llt_;  // cached factor for Mahalanobis inverse map
};

/// D_Ψ(x | y) = Ψ(x) − Ψ(y) − ⟨∇Ψ(y), x−y⟩  (≥ 0, zero iff x = y).
double bregman(const Potential& psi, const Vector& x, const Vector& y);

/// A field of symmetric PSD matrices w ↦ ρ(w).
struct MetricTensor {
  std::function<Matrix(const Vector&)> evaluator;
  Matrix operator()(const Vector& w) const { return evaluator(w); }
};

struct HessianMapReport {
  bool is_hessian_consistent = false;
  double max_asymmetry = 0.0;
};

/// Finite-difference test of the symmetry condition ∂ρᵢⱼ/∂w_k = ∂ρᵢₖ/∂w_j
/// that characterizes metric tensors expressible as ∇²Ψ.
HessianMapReport hessian_map_check(const MetricTensor& rho, const Vector& w,
                                   double tol);

}  // namespace biaslab
