#pragma once

#include <string>
#include <vector>

#include "biaslab/descent.hpp"
#include "biaslab/oracles.hpp"
#include "biaslab/rng.hpp"
#include "biaslab/trajectory.hpp"
#include "biaslab/types.hpp"

namespace biaslab {

enum class CommutingState { Verified, Violated, Unchecked };

/// Matrix sensing instance: measurements Xₙ (d×d), responses y, loss
/// L(M) = ½Σₙ(⟨Xₙ,M⟩ − yₙ)².
struct SensingProblem {
  std::vector<Matrix> measurements;
  Vector y;
  CommutingState commuting = CommutingState::Unchecked;

  Eigen::Index dim() const;
  Eigen::Index n_measurements() const { return y.size(); }
  Vector residual(const Matrix& M) const;  // ⟨Xₙ,M⟩ − yₙ
  double loss(const Matrix& M) const;
  Matrix loss_gradient(const Matrix& M) const;  // Σₙ rₙXₙ

  /// Doubled problem on 2d×2d symmetric states: X̄ₙ = ½[[0,Xₙ],[Xₙᵀ,0]],
  /// same responses; ⟨X̄ₙ, lift(U,V)⟩ = ⟨Xₙ, UVᵀ⟩.
  SensingProblem lifted() const;
};

/// PSD block matrix [[UUᵀ, UVᵀ],[VUᵀ, VVᵀ]].
struct LiftedState {
  Matrix M_tilde;
  Eigen::Index half() const { return M_tilde.rows() / 2; }
  Matrix predictor_block() const;  // the off-diagonal block UVᵀ
};

LiftedState lift(const Matrix& U, const Matrix& V);

/// Gradient flow U̇ = −G·V, V̇ = −Gᵀ·U with G = Σₙrₙ(UVᵀ)Xₙ. Records pack
/// w = [vec U; vec V], beta = vec(UVᵀ); extras["balance"] tracks the
/// conserved tr(UUᵀ − VVᵀ).
Trajectory factored_flow(const SensingProblem& problem, const Matrix& U0,
                         const Matrix& V0, const StopRule& stop,
                         const FlowOptions& options = {});

/// Symmetric descent flow Ṁ = −(gM + Mg) on PSD matrices, g being the
/// gradient of Σₙ(⟨Xₙ,M⟩−yₙ)² — exactly the WWᵀ chain-rule dynamics of the
/// halved loss. M is re-symmetrized as it evolves; a PSD violation beyond
/// tolerance is an error (step control too loose).
Trajectory symmetric_flow(const SensingProblem& problem, const Matrix& M0,
                          const StopRule& stop, const FlowOptions& options = {},
                          double psd_tol = 1e-8);

struct CommutingReduction {
  Matrix basis;           // orthogonal P, columns are joint eigenvectors
  Dataset vector_problem; // rows = per-measurement eigenvalues, same y
};

/// Simultaneous diagonalization of commuting symmetric measurements via the
/// eigenbasis of a seeded random linear combination. Errors (naming the worst
/// pair) when the commutator test max‖XᵢXⱼ−XⱼXᵢ‖_F ≤ 1e-8·maxᵢ‖Xᵢ‖_F² fails.
CommutingReduction commuting_reduction(const SensingProblem& problem,
                                       std::uint64_t seed = 0x5eed);

/// argmin Q_μ(spectrum(M)) s.t. ⟨Xₙ,M⟩ = yₙ on commuting instances: reduce,
/// solve the sinh-manifold interpolator on eigenvalue coordinates, rebuild M.
OracleSolution spectral_Q_oracle(const SensingProblem& problem, double mu,
                                 double tol = 1e-10);

enum class SigmaRuleKind { Const, EffectiveConst, Mu2Const };

/// σ(k) law for the width sweep: Const keeps σ fixed; EffectiveConst fixes
/// σ²√k (the measured init scale of diag(UVᵀ)); Mu2Const fixes kσ² (the
/// manifold scale the lifted dynamics actually collapse on).
struct SigmaRule {
  SigmaRuleKind kind = SigmaRuleKind::Const;
  double value = 0.1;
  double sigma(Eigen::Index k) const;
  std::string name() const;
};

struct WidthSweepRow {
  Eigen::Index k = 0;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  double effective_scale = 0.0;  // empirical std of diag(UVᵀ) at t = 0
  double l1_gap = 0.0;
  double l2_gap = 0.0;
  std::string status;  // "ok", "degenerate", or an error note
};

struct WidthSweepResult {
  SensingProblem problem;
  CommutingReduction reduction;
  std::vector<WidthSweepRow> rows;
};

/// Seeded commuting instance generator used by the sweep.
SensingProblem make_commuting_instance(Eigen::Index d, Eigen::Index n,
                                       std::uint64_t seed,
                                       Eigen::Index planted_nnz = 2);

/// For each (k, seed): init U,V with i.i.d. N(0,σ(k)²), run the factored
/// flow on a fixed commuting instance, and report the regime gaps of the
/// endpoint spectrum. Per-cell failures are recorded and the sweep continues.
WidthSweepResult width_sweep(Eigen::Index d, const std::vector<Eigen::Index>& k_list,
                             const SigmaRule& sigma_rule, Eigen::Index n,
                             const std::vector<std::uint64_t>& seeds,
                             std::uint64_t instance_seed = 0x5eed,
                             const FlowOptions& options = {});

}  // namespace biaslab
