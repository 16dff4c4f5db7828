#include "biaslab/descent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "biaslab/errors.hpp"
#include "biaslab/numerics.hpp"

namespace biaslab {
namespace {

constexpr double kDivergenceFactor = 1e6;

bool diverged(double loss, double loss0) {
  if (!std::isfinite(loss)) return true;
  return loss > kDivergenceFactor * std::max(std::abs(loss0), 1e-12);
}

void record_iterate(Trajectory& traj, long k, const Vector& w, double loss) {
  TrajectoryRecord rec;
  rec.time = static_cast<double>(k);
  rec.w = w;
  rec.beta = w;
  rec.loss = loss;
  traj.records.push_back(std::move(rec));
}

double stable_logistic_loss(double margin) {
  // log(1 + exp(-margin)) without overflow.
  return margin >= 0.0 ? std::log1p(std::exp(-margin))
                       : -margin + std::log1p(std::exp(margin));
}

}  // namespace

bool StopRule::satisfied(double loss, double grad_norm,
                         double residual_inf) const {
  if (std::isfinite(loss_tol) && loss <= loss_tol) return true;
  if (std::isfinite(grad_tol) && grad_norm <= grad_tol) return true;
  if (std::isfinite(residual_inf_tol) && residual_inf <= residual_inf_tol) {
    return true;
  }
  return false;
}

StepSchedule constant_step(double eta) {
  return [eta](long) { return eta; };
}

StepSchedule inv_sqrt_step(double eta0) {
  return [eta0](long k) { return eta0 / std::sqrt(static_cast<double>(k + 1)); };
}

Trajectory gd(const Objective& objective, const Gradient& gradient,
              const Vector& w0, const StepSchedule& step,
              const StopRule& stop) {
  Trajectory traj;
  Vector w = w0;
  double loss = objective(w);
  const double loss0 = loss;
  RecordThinner thinner;
  record_iterate(traj, 0, w, loss);

  for (long k = 0; k < stop.max_iters; ++k) {
    const Vector g = gradient(w);
    const double gnorm = g.norm();
    if (stop.satisfied(loss, gnorm, gnorm)) {
      traj.status = RunStatus::Converged;
      record_iterate(traj, k, w, loss);
      return traj;
    }
    const double eta = step(k);
    if (!(eta > 0.0)) throw std::invalid_argument("gd: step must be > 0");
    w -= eta * g;
    loss = objective(w);
    if (diverged(loss, loss0)) {
      traj.status = RunStatus::Diverged;
      record_iterate(traj, k + 1, w, loss);
      return traj;
    }
    if (thinner.should_record(static_cast<double>(k + 1))) {
      record_iterate(traj, k + 1, w, loss);
    }
  }
  traj.status = RunStatus::MaxIterations;
  if (traj.records.back().time != static_cast<double>(stop.max_iters)) {
    record_iterate(traj, stop.max_iters, w, loss);
  }
  return traj;
}

SampleLoss square_sample_loss() {
  SampleLoss loss;
  loss.value = [](double yhat, double y) {
    const double e = yhat - y;
    return 0.5 * e * e;
  };
  loss.derivative = [](double yhat, double y) { return yhat - y; };
  return loss;
}

SampleLoss logistic_sample_loss() {
  SampleLoss loss;
  loss.value = [](double yhat, double y) {
    return stable_logistic_loss(y * yhat);
  };
  loss.derivative = [](double yhat, double y) {
    return -y / (1.0 + std::exp(y * yhat));
  };
  return loss;
}

SgdResult sgd_one_pass(const SampleStream& sampler, const SampleLoss& loss,
                       const Vector& w0, const StepSchedule& schedule, long T) {
  if (T < 1) throw std::invalid_argument("sgd_one_pass: T must be >= 1");
  SgdResult result;
  Vector w = w0;
  Vector avg = Vector::Zero(w0.size());
  Vector x(w0.size());
  double y = 0.0;
  RecordThinner thinner;
  record_iterate(result.trajectory, 0, w, 0.0);

  for (long t = 0; t < T; ++t) {
    if (!sampler(x, y)) {
      std::ostringstream msg;
      msg << "sgd_one_pass: sample stream exhausted at t = " << t
          << " (needed " << T << ")";
      throw NumericalError(msg.str());
    }
    const double yhat = w.dot(x);
    w -= schedule(t) * loss.derivative(yhat, y) * x;
    avg += (w - avg) / static_cast<double>(t + 1);
    if (thinner.should_record(static_cast<double>(t + 1))) {
      record_iterate(result.trajectory, t + 1, w, loss.value(w.dot(x), y));
    }
  }
  result.trajectory.status = RunStatus::Converged;
  result.averaged = avg;
  return result;
}

SgdResult sgd_erm(const Dataset& data, const SampleLoss& loss,
                  const Vector& w0, const StepSchedule& schedule,
                  double ball_radius, long T, RngStream& rng) {
  if (!(ball_radius > 0.0)) {
    throw std::invalid_argument("sgd_erm: ball radius must be > 0");
  }
  const Eigen::Index m = data.n_samples();
  SgdResult result;
  Vector w = w0;
  Vector avg = Vector::Zero(w0.size());
  RecordThinner thinner;
  record_iterate(result.trajectory, 0, w, 0.0);

  for (long t = 0; t < T; ++t) {
    auto i = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(m));
    if (i >= m) i = m - 1;
    const Vector x = data.X.row(i).transpose();
    const double yhat = w.dot(x);
    w -= schedule(t) * loss.derivative(yhat, data.y(i)) * x;
    const double norm = w.norm();
    if (norm > ball_radius) w *= ball_radius / norm;
    avg += (w - avg) / static_cast<double>(t + 1);
    if (thinner.should_record(static_cast<double>(t + 1))) {
      record_iterate(result.trajectory, t + 1, w, 0.0);
    }
  }
  result.trajectory.status = RunStatus::Converged;
  result.averaged = avg;
  return result;
}

namespace {

Vector project_mirror(const Potential& psi, const Vector& w,
                      const MirrorProjection& proj) {
  switch (proj.set) {
    case ProjectionSet::None:
      return w;
    case ProjectionSet::Simplex: {
      if (psi.kind() != PotentialKind::Entropic) {
        throw std::invalid_argument(
            "simplex projection implemented for the entropic potential");
      }
      const double total = w.sum();
      if (!(total > 0.0)) throw DomainError("simplex projection: sum <= 0");
      return w / total;
    }
    case ProjectionSet::L2Ball: {
      if (psi.kind() != PotentialKind::Euclidean) {
        throw std::invalid_argument(
            "L2 ball projection implemented for the euclidean potential");
      }
      const double norm = w.norm();
      return norm > proj.radius ? Vector(w * (proj.radius / norm)) : w;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Trajectory mirror_descent(const Potential& psi, const Objective& objective,
                          const Gradient& gradient, const Vector& w0,
                          const StepSchedule& schedule, const StopRule& stop,
                          const MirrorProjection& projection) {
  if (!psi.in_domain(w0)) {
    throw DomainError("mirror_descent: w0 outside the potential's domain");
  }
  Trajectory traj;
  Vector w = w0;
  Vector theta = psi.mirror_map(w);
  double loss = objective(w);
  const double loss0 = loss;
  RecordThinner thinner;
  record_iterate(traj, 0, w, loss);

  for (long k = 0; k < stop.max_iters; ++k) {
    const Vector g = gradient(w);
    const double gnorm = g.norm();
    if (stop.satisfied(loss, gnorm, gnorm)) {
      traj.status = RunStatus::Converged;
      record_iterate(traj, k, w, loss);
      return traj;
    }
    theta -= schedule(k) * g;
    try {
      w = psi.inverse_mirror(theta);
      w = project_mirror(psi, w, projection);
      if (projection.set != ProjectionSet::None) theta = psi.mirror_map(w);
      if (!psi.in_domain(w)) throw DomainError("iterate left the domain");
    } catch (const DomainError& err) {
      std::ostringstream msg;
      msg << "mirror_descent: domain exit at iteration " << k + 1 << ": "
          << err.what();
      throw DomainError(msg.str());
    }
    loss = objective(w);
    if (diverged(loss, loss0)) {
      traj.status = RunStatus::Diverged;
      record_iterate(traj, k + 1, w, loss);
      return traj;
    }
    if (thinner.should_record(static_cast<double>(k + 1))) {
      record_iterate(traj, k + 1, w, loss);
    }
  }
  traj.status = RunStatus::MaxIterations;
  record_iterate(traj, stop.max_iters, w, loss);
  return traj;
}

Trajectory natural_gd(const MetricTensor& rho, const Objective& objective,
                      const Gradient& gradient, const Vector& w0, double step,
                      const StopRule& stop) {
  if (!(step > 0.0)) throw std::invalid_argument("natural_gd: step must be > 0");
  Trajectory traj;
  Vector w = w0;
  double loss = objective(w);
  const double loss0 = loss;
  RecordThinner thinner;
  record_iterate(traj, 0, w, loss);

  for (long k = 0; k < stop.max_iters; ++k) {
    const Vector g = gradient(w);
    const double gnorm = g.norm();
    if (stop.satisfied(loss, gnorm, gnorm)) {
      traj.status = RunStatus::Converged;
      record_iterate(traj, k, w, loss);
      return traj;
    }
    const Matrix metric = rho(w);
    Eigen::LDLT<Matrix> ldlt(metric);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw NumericalError("natural_gd: metric tensor singular along the path");
    }
    const Vector direction = ldlt.solve(g);
    if (!direction.allFinite()) {
      throw NumericalError("natural_gd: metric tensor singular along the path");
    }
    w -= step * direction;
    loss = objective(w);
    if (diverged(loss, loss0)) {
      traj.status = RunStatus::Diverged;
      record_iterate(traj, k + 1, w, loss);
      return traj;
    }
    if (thinner.should_record(static_cast<double>(k + 1))) {
      record_iterate(traj, k + 1, w, loss);
    }
  }
  traj.status = RunStatus::MaxIterations;
  record_iterate(traj, stop.max_iters, w, loss);
  return traj;
}

Trajectory steepest_descent(SteepestNorm norm_kind, const Objective& objective,
                            const Gradient& gradient, const Vector& w0,
                            double step, const StopRule& stop) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("steepest_descent: step must be > 0");
  }
  Trajectory traj;
  Vector w = w0;
  double loss = objective(w);
  RecordThinner thinner;
  record_iterate(traj, 0, w, loss);

  for (long k = 0; k < stop.max_iters; ++k) {
    const Vector g = gradient(w);
    const double gnorm = g.norm();
    if (stop.satisfied(loss, gnorm, gnorm)) {
      traj.status = RunStatus::Converged;
      record_iterate(traj, k, w, loss);
      return traj;
    }
    if (norm_kind == SteepestNorm::L1) {
      Eigen::Index best = 0;  // lowest index wins ties
      for (Eigen::Index i = 1; i < g.size(); ++i) {
        if (std::abs(g(i)) > std::abs(g(best))) best = i;
      }
      w(best) -= step * (g(best) > 0.0 ? 1.0 : (g(best) < 0.0 ? -1.0 : 0.0));
    } else {
      w -= step * g.array().sign().matrix();
    }
    loss = objective(w);
    if (thinner.should_record(static_cast<double>(k + 1))) {
      record_iterate(traj, k + 1, w, loss);
    }
  }
  traj.status = RunStatus::MaxIterations;
  record_iterate(traj, stop.max_iters, w, loss);
  return traj;
}

namespace {

struct SampleSpaceLoss {
  // loss value and the vector r with ∇_β L = Xᵀ·r.
  double value;
  Vector r;
};

SampleSpaceLoss eval_loss(LossKind kind, const Matrix& X, const Vector& y,
                          const Vector& beta) {
  SampleSpaceLoss out;
  const Vector yhat = X * beta;
  const Eigen::Index n = y.size();
  if (kind == LossKind::Square) {
    out.r = yhat - y;
    out.value = 0.5 * out.r.squaredNorm();
  } else {
    out.r.resize(n);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin = y(i) * yhat(i);
      acc += stable_logistic_loss(margin);
      out.r(i) = -y(i) / ((1.0 + std::exp(margin)) * static_cast<double>(n));
    }
    out.value = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace

Trajectory param_flow(const Parametrization& P, const Dataset& data,
                      LossKind loss_kind, const Vector& w0,
                      const StopRule& stop, const FlowOptions& options) {
  const Eigen::Index p = P.parameter_dim();
  const Eigen::Index n = data.n_samples();
  if (w0.size() != p) {
    throw std::invalid_argument("param_flow: w0 has wrong dimension");
  }
  const bool diag = P.kind() == ParametrizationKind::DiagSigned;

  // Augmented state [w; S], Ṡ = r (the sample-space loss gradient).
  const auto field = [&](double, const Vector& state) {
    const Vector w = state.head(p);
    const Vector beta = P.forward(w);
    const auto loss = eval_loss(loss_kind, data.X, data.y, beta);
    Vector out(p + n);
    out.head(p) = -P.jacobian(w).transpose() * (data.X.transpose() * loss.r);
    out.tail(n) = loss.r;
    return out;
  };

  const auto stop_pred = [&](double, const Vector& state) {
    const Vector w = state.head(p);
    const Vector beta = P.forward(w);
    const auto loss = eval_loss(loss_kind, data.X, data.y, beta);
    const Vector grad =
        P.jacobian(w).transpose() * (data.X.transpose() * loss.r);
    const double resid_inf = (data.X * beta - data.y).lpNorm<Eigen::Infinity>();
    return stop.satisfied(loss.value, grad.norm(), resid_inf);
  };

  Vector state0 = Vector::Zero(p + n);
  state0.head(p) = w0;

  OdeOptions ode;
  ode.rel_tol = options.rel_tol;
  ode.abs_tol = options.abs_tol;
  ode.max_steps = options.max_steps;
  ode.record_growth = options.record_growth;
  const OdeSolution sol =
      integrate_flow(field, state0, options.max_time, stop_pred, ode);

  Trajectory traj;
  traj.status = sol.status;
  traj.records.reserve(sol.times.size());
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const Vector w = sol.states[k].head(p);
    const Vector S = sol.states[k].tail(n);
    TrajectoryRecord rec;
    rec.time = sol.times[k];
    rec.w = w;
    rec.beta = P.forward(w);
    rec.residual = data.X * rec.beta - data.y;
    rec.loss = eval_loss(loss_kind, data.X, data.y, rec.beta).value;
    rec.extras["S"] = S;
    if (diag) {
      rec.extras["c"] = data.X.transpose() * S;
      const auto wp = w.head(P.dim()).array();
      const auto wm = w.tail(P.dim()).array();
      if (P.depth() == 2) {
        rec.extras["conservation"] = (wp * wm).matrix();
      } else {
        const double e = 2.0 - static_cast<double>(P.depth());
        rec.extras["conservation"] = (wp.pow(e) + wm.pow(e)).matrix();
      }
    }
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

double default_square_loss_step(const Matrix& X) {
  const double L = largest_eigenvalue_sym(X.transpose() * X);
  if (!(L > 0.0)) return 1.0;
  return 0.5 / L;
}

}  // namespace biaslab
