#pragma once

#include <vector>

#include "biaslab/descent.hpp"
#include "biaslab/types.hpp"

namespace biaslab {

struct SeparableDataset {
  Matrix X;
  Vector y;  // ±1
  double planted_margin = 0.0;
  std::uint64_t seed = 0;
  Vector planted_w;  // unit vector achieving the planted margin

  Dataset as_dataset() const { return Dataset{X, y, planted_w, seed}; }
};

/// Plants a unit separator, samples Gaussian points and resamples any point
/// within `margin` of the hyperplane; labels are sign(⟨w*,x⟩). Errors if the
/// rejection cap is exceeded (margin too large for the dimension).
SeparableDataset gen_separable(Eigen::Index d, Eigen::Index n, double margin,
                               std::uint64_t seed);

struct MarginKkt {
  double feasibility = 0.0;   // max(0, 1 − minᵢ yᵢ⟨w̃,xᵢ⟩) of w̃ = ŵ/γ
  double stationarity = 0.0;  // ‖w̃ − Σν̂ᵢyᵢxᵢ‖∞ with ν̂ ≥ 0 fitted by NNLS
  double comp_slack = 0.0;    // maxᵢ |ν̂ᵢ·(yᵢ⟨w̃,xᵢ⟩ − 1)|
};

struct DirectionReport {
  double eps = 0.0;        // loss level of this snapshot
  Vector w_hat;            // unit direction
  double loss = 0.0;
  long iterations = 0;
  double cosine_to_oracle = 0.0;
  MarginKkt margin_kkt;
  double growth_fit = 0.0;  // slope of ‖w_k‖ against log k on the tail
  double growth_r2 = 0.0;
};

/// Runs logistic-loss gradient descent (monotone: the trial step doubles and
/// backtracks on any loss increase), snapshotting the first time the loss
/// drops below each ε. Each report compares the direction with the
/// hard-margin oracle and tracks the KKT residuals of the margin-rescaled
/// direction.
std::vector<DirectionReport> logistic_gd_direction(
    const SeparableDataset& data, double step,
    const std::vector<double>& eps_list, long cap);

struct LogisticFlowSnapshot {
  double eps = 0.0;
  double time = 0.0;
  Vector beta;
  Vector beta_normalized;  // β scaled to margin 1
  double margin = 0.0;     // minᵢ yᵢ⟨β,xᵢ⟩ before normalization
};

/// Diagonal-net logistic gradient flow, snapshotted at the loss levels of
/// eps_list, each snapshot normalized to margin one. Errors if the
/// integrator gives out before the first ε is reached.
std::vector<LogisticFlowSnapshot> diag_logistic_flow(
    const SeparableDataset& data, double alpha, int depth,
    const std::vector<double>& eps_list, const FlowOptions& options = {});

/// min_{ν≥0} ‖target − Σνᵢyᵢxᵢ‖₂ by projected coordinate descent; used to
/// fit dual certificates to observed directions.
Vector nnls_dual_fit(const Matrix& X, const Vector& y, const Vector& target,
                     int sweeps = 2000);

}  // namespace biaslab
