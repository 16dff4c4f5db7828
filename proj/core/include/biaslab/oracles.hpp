#pragma once

#include <limits>
#include <string>

#include "biaslab/geometry.hpp"
#include "biaslab/types.hpp"

namespace biaslab {

struct Certificate {
  double stationarity_resid = 0.0;
  double feasibility_resid = 0.0;
  double comp_slack_resid = 0.0;
  double duality_gap = 0.0;
};

/// Minimizer plus the KKT evidence that it is one. `point` carries vector
/// solutions; matrix oracles fill `point_matrix` as well (point = vec).
struct OracleSolution {
  Vector point;
  Matrix point_matrix;
  bool is_matrix = false;
  Vector dual;
  Certificate certificate;
  long iterations = 0;
  std::string method_tag;
  double margin = std::numeric_limits<double>::quiet_NaN();  // margin oracles
};

/// argmin ½‖β‖₂² s.t. Xβ = y, via β = Xᵀ(XXᵀ)⁺y. Stationarity β = Xᵀν holds
/// by construction; an inconsistent system is an error carrying the
/// least-squares residual.
OracleSolution min_l2_interpolator(const Matrix& X, const Vector& y);

/// Basis pursuit argmin ‖β‖₁ s.t. Xβ = y by ADMM with a basic-solution
/// polish; returns a dual-feasible ν for max ⟨y,ν⟩ s.t. ‖Xᵀν‖∞ ≤ 1 and a
/// duality gap ≤ tol.
OracleSolution min_l1_interpolator(const Matrix& X, const Vector& y,
                                   double tol);

/// argmin D_Ψ(w ‖ w0) s.t. Xw = y by damped Newton on the n-dimensional dual
/// ν of X·∇Ψ⁻¹(∇Ψ(w0) + Xᵀν) = y. Stationarity is exact by construction.
OracleSolution min_bregman_interpolator(const Potential& psi, const Vector& w0,
                                        const Matrix& X, const Vector& y,
                                        double tol);

/// Interpolator on the sinh manifold β = 2α²·sinh(−4Xᵀs): Newton in s on
/// X·β(s) = y. Returns β(s), dual ν = −4s.
OracleSolution min_Q_alpha_interpolator(const Matrix& X, const Vector& y,
                                        double alpha, double tol);

/// Depth-D analogue on β = α^D·h̃(D(D−2)α^{D−2}·Xᵀs), depth ≥ 3.
OracleSolution min_Q_depth_interpolator(const Matrix& X, const Vector& y,
                                        double alpha, int depth, double tol);

/// Hard-margin separator argmin ½‖w‖₂² s.t. yᵢ⟨w,xᵢ⟩ ≥ 1 by dual coordinate
/// ascent (ν ≥ 0, w = Σνᵢyᵢxᵢ). Reports the geometric margin; errors if the
/// data is not strictly separable.
OracleSolution max_margin(const Matrix& X, const Vector& y, double tol);

/// argmin Q_α(β) s.t. yᵢ⟨β,xᵢ⟩ ≥ 1 by a log-barrier Newton path.
OracleSolution min_Q_margin(const Matrix& X, const Vector& y, double alpha,
                            double tol);

/// Scalar explicit regularizer min (w₊−α)² + (w₋−α)² s.t. w₊^D − w₋^D = β,
/// w± ≥ 0, by grid bracketing plus golden-section refinement (tol 1e-10).
double explicit_reg_oracle(int depth, double alpha, double beta_target,
                           double tol);

}  // namespace biaslab
