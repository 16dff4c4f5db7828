#pragma once

#include "biaslab/types.hpp"

namespace biaslab {

/// q(z) = ∫₀ᶻ asinh(t/2) dt = 2 − √(4+z²) + z·asinh(z/2).
/// Even, convex, quadratic (z²/4) near zero and ~|z|·log|z| for large |z|.
double q(double z);

/// Q_α(β) = Σᵢ α²·q(βᵢ/α²); interpolates scaled ℓ2 (α→∞) and ℓ1 (α→0).
double Q_alpha(const Vector& beta, double alpha);

/// ∇Q_α(β) = asinh(β/(2α²)) coordinate-wise.
Vector Q_alpha_gradient(const Vector& beta, double alpha);

/// Largest |c| admissible for the depth-D dual variable: α^{2−D}/(D(D−2)).
double h_depth_domain_bound(int depth, double alpha);

/// Closed-form endpoint map of the depth-D diagonal flow,
///   h(c) = α^D·[(1+γc)^{−D/(D−2)} − (1−γc)^{−D/(D−2)}],  γ = D(D−2)α^{D−2},
/// strictly decreasing with h(0)=0 on |c| < α^{2−D}/γ·... = bound above.
/// Depth 2 routes to the sinh form 2α²·sinh(−4c). Errors outside the domain.
double h_depth(double c, int depth, double alpha);

/// Scale-free dual potential of the depth-D net: q_D(z) = ∫₀ᶻ −h̃⁻¹(u)du on
/// z = β/α^D, computed by bisection inversion (tol 1e-10) plus adaptive
/// quadrature. Even, convex, q_D(0) = 0, slope → 1 for large |z|.
double q_depth(double z, int depth);

/// Per-coordinate explicit regularizer of the squared parametrization:
/// the root of p_z(u) = u⁴ − 6u³ + (12−2z²)u² − (8+10z²)u + z² + z⁴ that is
/// continuous with r(0) = 0 (bracketed in [0, 2+|z|]). Even in z.
double r_explicit(double z);

struct RegimeGaps {
  double l1_gap;  // ‖β∞‖₁ / ‖β*_ℓ1‖₁ − 1
  double l2_gap;  // ‖β∞‖₂² / ‖β*_ℓ2‖₂² − 1
};

/// Locates the endpoint of the scale-α depth-D diagonal flow via the dual
/// interpolation oracle and reports both regime gaps.
RegimeGaps regime_check(const Matrix& X, const Vector& y, double alpha,
                        int depth = 2);

enum class RegularizerFamily { QAlpha, QDepth, RExplicit, HypentropyFamily };

/// A named closed-form implicit-bias penalty, mostly for experiment tables.
struct RegularizerSpec {
  RegularizerFamily family = RegularizerFamily::QAlpha;
  double alpha = 1.0;
  int depth = 2;

  double value(const Vector& beta) const;
  double scalar_value(double z) const;  // the per-coordinate scale-free shape
};

}  // namespace biaslab
