#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "biaslab/types.hpp"

namespace biaslab {

enum class RunStatus { Converged, MaxTime, MaxSteps, MaxIterations, Diverged };

const char* to_string(RunStatus status);

using VectorField = std::function<Vector(double t, const Vector& x)>;
using StopPredicate = std::function<bool(double t, const Vector& x)>;

struct OdeSolution {
  std::vector<double> times;   // strictly increasing
  std::vector<Vector> states;  // same length as times
  RunStatus status = RunStatus::MaxTime;
  std::size_t steps_taken = 0;

  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }
};

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t max_steps = 4'000'000;
  /// State-norm ceiling; crossing it reports Diverged instead of aborting.
  double overflow_guard = 1e12;
  /// 0 keeps every accepted step; g > 1 keeps a record each time the
  /// integration time grows by the factor g (the final state always kept).
  double record_growth = 0.0;
  double initial_step = 0.0;  // 0 = automatic
};

/// Adaptive embedded Runge–Kutta (Dormand–Prince 5(4)) with PI step control.
/// Integrates dx/dt = field(t, x) from x0 until `stop` fires, `max_time` is
/// reached, the step budget is exhausted, or the state norm crosses the
/// overflow guard. Accepted local error per step is at most
/// max(rel_tol·|x|, abs_tol) componentwise.
OdeSolution integrate_flow(const VectorField& field, const Vector& x0,
                           double max_time, const StopPredicate& stop,
                           const OdeOptions& options);

OdeSolution integrate_flow(const VectorField& field, const Vector& x0,
                           double max_time, const StopPredicate& stop,
                           double rel_tol, double abs_tol);

}  // namespace biaslab
