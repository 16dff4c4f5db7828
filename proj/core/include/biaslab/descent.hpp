#pragma once

#include <functional>

#include "biaslab/geometry.hpp"
#include "biaslab/models.hpp"
#include "biaslab/rng.hpp"
#include "biaslab/trajectory.hpp"
#include "biaslab/types.hpp"

namespace biaslab {

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;
using StepSchedule = std::function<double(long iteration)>;

StepSchedule constant_step(double eta);
StepSchedule inv_sqrt_step(double eta0);  // eta0 / sqrt(k+1)

/// Fixed-step (or scheduled) gradient descent. Reports Diverged if the loss
/// grows 10⁶× above its initial value or turns non-finite.
Trajectory gd(const Objective& objective, const Gradient& gradient,
              const Vector& w0, const StepSchedule& step,
              const StopRule& stop);

/// Pointwise loss of a linear predictor: value and derivative in ŷ.
struct SampleLoss {
  std::function<double(double yhat, double y)> value;
  std::function<double(double yhat, double y)> derivative;
};
SampleLoss square_sample_loss();
SampleLoss logistic_sample_loss();

/// Pulls the next fresh sample; returns false when the stream is exhausted.
using SampleStream = std::function<bool(Vector& x, double& y)>;

struct SgdResult {
  Vector averaged;  // uniform average of the T post-update iterates
  Trajectory trajectory;
};

/// One-pass SGD on a stream of fresh samples (stochastic approximation).
SgdResult sgd_one_pass(const SampleStream& sampler, const SampleLoss& loss,
                       const Vector& w0, const StepSchedule& schedule, long T);

/// SGD on the empirical risk with uniform with-replacement sampling and a
/// Euclidean ball projection after every step.
SgdResult sgd_erm(const Dataset& data, const SampleLoss& loss,
                  const Vector& w0, const StepSchedule& schedule,
                  double ball_radius, long T, RngStream& rng);

/// Optional Bregman projection applied after each mirror step.
enum class ProjectionSet { None, Simplex, L2Ball };
struct MirrorProjection {
  ProjectionSet set = ProjectionSet::None;
  double radius = 0.0;  // L2Ball only
};

/// Mirror descent implemented literally as dual-space accumulation:
/// θ_{k+1} = θ_k − η_k·g_k, w_{k+1} = ∇Ψ⁻¹(θ_{k+1}), then the optional
/// projection. With the Euclidean potential this reproduces gd bit for bit.
Trajectory mirror_descent(const Potential& psi, const Objective& objective,
                          const Gradient& gradient, const Vector& w0,
                          const StepSchedule& schedule, const StopRule& stop,
                          const MirrorProjection& projection = {});

/// Natural gradient descent: w ← w − η·ρ(w)⁻¹∇f, one linear solve per step.
Trajectory natural_gd(const MetricTensor& rho, const Objective& objective,
                      const Gradient& gradient, const Vector& w0, double step,
                      const StopRule& stop);

enum class SteepestNorm { L1, Linf };

/// Normalized steepest descent: L1 updates the single largest-|gradient|
/// coordinate (lowest index wins ties); Linf steps against sign(∇).
Trajectory steepest_descent(SteepestNorm norm_kind, const Objective& objective,
                            const Gradient& gradient, const Vector& w0,
                            double step, const StopRule& stop);

enum class LossKind { Square, Logistic };

struct FlowOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_time = 1e6;
  std::size_t max_steps = 4'000'000;
  /// Geometric spacing of kept records; <= 1 keeps every accepted step.
  double record_growth = 1.2;
};

/// Gradient flow ẇ = −∇_w L(F(w)) over a parametrization, integrated with
/// the adaptive RK scheme. The state is augmented with S(t) = ∫₀ᵗ r(τ)dτ
/// (r is the loss-gradient vector in sample space), recorded per record in
/// extras["S"], alongside extras["c"] = XᵀS and, for DiagSigned,
/// extras["conservation"] = w₊⊙w₋ for depth 2 and w₊^{2−D}+w₋^{2−D} deeper.
///
/// Loss conventions: Square is L(β) = ½‖Xβ−y‖²; Logistic is the mean
/// log(1+exp(−yᵢŷᵢ)) with labels ±1.
Trajectory param_flow(const Parametrization& P, const Dataset& data,
                      LossKind loss_kind, const Vector& w0,
                      const StopRule& stop, const FlowOptions& options = {});

/// Default square-loss step 0.5/λmax(XᵀX).
double default_square_loss_step(const Matrix& X);

}  // namespace biaslab
