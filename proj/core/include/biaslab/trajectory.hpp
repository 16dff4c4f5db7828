#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "biaslab/ode.hpp"
#include "biaslab/types.hpp"

namespace biaslab {

/// Termination rule for iterative optimizers and flows. Criteria left at NaN
/// are disabled; at least one of them (or the iteration cap) must be active.
struct StopRule {
  long max_iters = 1'000'000;
  double loss_tol = std::numeric_limits<double>::quiet_NaN();
  double grad_tol = std::numeric_limits<double>::quiet_NaN();
  double residual_inf_tol = std::numeric_limits<double>::quiet_NaN();

  bool satisfied(double loss, double grad_norm, double residual_inf) const;
};

struct TrajectoryRecord {
  double time = 0.0;  // flow time, or iteration index for discrete methods
  Vector w;
  Vector beta;
  double loss = 0.0;
  Vector residual;  // Xβ − y where a dataset is in play
  std::map<std::string, Vector> extras;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  RunStatus status = RunStatus::MaxIterations;

  bool empty() const { return records.empty(); }
  const TrajectoryRecord& endpoint() const { return records.back(); }
};

/// Geometric record thinning: keep iterations/times 0, 1, then each time the
/// counter grows by `growth`, plus (handled by callers) the final state.
class RecordThinner {
 public:
  explicit RecordThinner(double growth = 1.2) : growth_(growth) {}
  bool should_record(double t) {
    if (t >= next_) {
      next_ = std::max(next_ + 1.0, t * growth_);
      return true;
    }
    return false;
  }

 private:
  double growth_;
  double next_ = 0.0;
};

}  // namespace biaslab
