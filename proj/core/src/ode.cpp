#include "biaslab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biaslab {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxTime: return "max-time";
    case RunStatus::MaxSteps: return "max-steps";
    case RunStatus::MaxIterations: return "max-iterations";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-minus-4th order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vector& err, const Vector& x_old, const Vector& x_new,
                  double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(x_old(i)), std::abs(x_new(i)));
    const double q = err(i) / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

OdeSolution integrate_flow(const VectorField& field, const Vector& x0,
                           double max_time, const StopPredicate& stop,
                           const OdeOptions& options) {
  if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) {
    throw std::invalid_argument("integrate_flow: tolerances must be > 0");
  }
  if (!x0.allFinite()) {
    throw std::invalid_argument("integrate_flow: x0 must be finite");
  }
  if (!(max_time > 0.0)) {
    throw std::invalid_argument("integrate_flow: max_time must be > 0");
  }

  OdeSolution sol;
  double t = 0.0;
  Vector x = x0;
  sol.times.push_back(t);
  sol.states.push_back(x);
  double next_record_time = 0.0;

  if (stop && stop(t, x)) {
    sol.status = RunStatus::Converged;
    return sol;
  }

  Vector k1 = field(t, x);
  const Eigen::Index n = x.size();

  // Initial step from the local derivative scale.
  double h = options.initial_step;
  if (h <= 0.0) {
    const double d0 = x.norm() + options.abs_tol;
    const double d1 = k1.norm() + options.abs_tol / options.rel_tol * 1e-3;
    h = 0.01 * d0 / std::max(d1, 1e-300);
    h = std::min(std::max(h, 1e-12), max_time);
  }

  // PI controller state.
  double err_prev = 1.0;
  constexpr double kSafety = 0.9;
  constexpr double kAlpha = 0.7 / 5.0;
  constexpr double kBeta = 0.4 / 5.0;

  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), x_new(n), err(n);

  while (t < max_time) {
    if (sol.steps_taken >= options.max_steps) {
      sol.status = RunStatus::MaxSteps;
      return sol;
    }
    h = std::min(h, max_time - t);

    k2 = field(t + c2 * h, x + h * (a21 * k1));
    k3 = field(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    k4 = field(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = field(t + c5 * h,
               x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = field(t + h,
               x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = field(t + h, x_new);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    ++sol.steps_taken;

    double err_ratio;
    if (!x_new.allFinite() || !err.allFinite()) {
      err_ratio = 10.0;  // treat as a failed step, shrink hard
    } else {
      err_ratio = error_norm(err, x, x_new, options.rel_tol, options.abs_tol);
    }

    if (err_ratio <= 1.0) {
      t += h;
      x.swap(x_new);
      k1.swap(k7);  // FSAL

      if (x.norm() > options.overflow_guard) {
        sol.times.push_back(t);
        sol.states.push_back(x);
        sol.status = RunStatus::Diverged;
        return sol;
      }

      const bool record = options.record_growth <= 1.0 ||
                          t >= next_record_time || t >= max_time;
      if (record) {
        sol.times.push_back(t);
        sol.states.push_back(x);
        if (options.record_growth > 1.0) {
          next_record_time =
              (t <= 0.0) ? 1e-12 : t * options.record_growth;
        }
      }

      if (stop && stop(t, x)) {
        if (!record) {
          sol.times.push_back(t);
          sol.states.push_back(x);
        }
        sol.status = RunStatus::Converged;
        return sol;
      }

      const double e = std::max(err_ratio, 1e-10);
      double fac = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = e;
    } else {
      const double fac =
          std::max(0.1, kSafety * std::pow(err_ratio, -1.0 / 5.0));
      h *= fac;
      if (h < 1e-15 * std::max(1.0, std::abs(t))) {
        sol.status = RunStatus::Diverged;  // step control collapsed
        return sol;
      }
    }
  }

  if (sol.times.back() < t) {
    sol.times.push_back(t);
    sol.states.push_back(x);
  }
  sol.status = RunStatus::MaxTime;
  return sol;
}

OdeSolution integrate_flow(const VectorField& field, const Vector& x0,
                           double max_time, const StopPredicate& stop,
                           double rel_tol, double abs_tol) {
  OdeOptions options;
  options.rel_tol = rel_tol;
  options.abs_tol = abs_tol;
  return integrate_flow(field, x0, max_time, stop, options);
}

}  // namespace biaslab
