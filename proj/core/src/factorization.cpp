#include "biaslab/factorization.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "biaslab/errors.hpp"

namespace biaslab {

Eigen::Index SensingProblem::dim() const {
  if (measurements.empty()) throw std::invalid_argument("empty sensing problem");
  return measurements.front().rows();
}

Vector SensingProblem::residual(const Matrix& M) const {
  Vector r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    r(i) = (measurements[static_cast<std::size_t>(i)].array() * M.array()).sum() -
           y(i);
  }
  return r;
}

double SensingProblem::loss(const Matrix& M) const {
  return 0.5 * residual(M).squaredNorm();
}

Matrix SensingProblem::loss_gradient(const Matrix& M) const {
  const Vector r = residual(M);
  Matrix G = Matrix::Zero(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    G += r(i) * measurements[static_cast<std::size_t>(i)];
  }
  return G;
}

SensingProblem SensingProblem::lifted() const {
  const Eigen::Index d = dim();
  SensingProblem out;
  out.y = y;
  out.commuting = CommutingState::Unchecked;
  out.measurements.reserve(measurements.size());
  for (const Matrix& X : measurements) {
    Matrix bar = Matrix::Zero(2 * d, 2 * d);
    bar.topRightCorner(d, d) = 0.5 * X;
    bar.bottomLeftCorner(d, d) = 0.5 * X.transpose();
    out.measurements.push_back(std::move(bar));
  }
  return out;
}

LiftedState lift(const Matrix& U, const Matrix& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols()) {
    throw std::invalid_argument("lift: U and V must share a shape");
  }
  const Eigen::Index d = U.rows();
  LiftedState state;
  state.M_tilde.resize(2 * d, 2 * d);
  state.M_tilde.topLeftCorner(d, d) = U * U.transpose();
  state.M_tilde.topRightCorner(d, d) = U * V.transpose();
  state.M_tilde.bottomLeftCorner(d, d) = V * U.transpose();
  state.M_tilde.bottomRightCorner(d, d) = V * V.transpose();
  return state;
}

Matrix LiftedState::predictor_block() const {
  const Eigen::Index d = half();
  return M_tilde.topRightCorner(d, d);
}

Trajectory factored_flow(const SensingProblem& problem, const Matrix& U0,
                         const Matrix& V0, const StopRule& stop,
                         const FlowOptions& options) {
  if (U0.rows() != V0.rows() || U0.cols() != V0.cols()) {
    throw std::invalid_argument("factored_flow: U0/V0 shape mismatch");
  }
  const Eigen::Index d = U0.rows();
  const Eigen::Index k = U0.cols();
  if (d != problem.dim()) {
    throw std::invalid_argument("factored_flow: dimension mismatch");
  }
  const Eigen::Index per = d * k;

  const auto unpackU = [&](const Vector& s) {
    return Matrix(Eigen::Map<const Matrix>(s.data(), d, k));
  };
  const auto unpackV = [&](const Vector& s) {
    return Matrix(Eigen::Map<const Matrix>(s.data() + per, d, k));
  };

  const auto field = [&](double, const Vector& s) -> Vector {
    const Matrix U = unpackU(s);
    const Matrix V = unpackV(s);
    const Matrix G = problem.loss_gradient(U * V.transpose());
    Vector out(2 * per);
    Eigen::Map<Matrix>(out.data(), d, k) = -G * V;
    Eigen::Map<Matrix>(out.data() + per, d, k) = -G.transpose() * U;
    return out;
  };

  const auto stop_pred = [&](double, const Vector& s) -> bool {
    const Matrix M = unpackU(s) * unpackV(s).transpose();
    const Vector r = problem.residual(M);
    return stop.satisfied(0.5 * r.squaredNorm(), r.norm(),
                          r.lpNorm<Eigen::Infinity>());
  };

  Vector s0(2 * per);
  Eigen::Map<Matrix>(s0.data(), d, k) = U0;
  Eigen::Map<Matrix>(s0.data() + per, d, k) = V0;

  OdeOptions ode;
  ode.rel_tol = options.rel_tol;
  ode.abs_tol = options.abs_tol;
  ode.max_steps = options.max_steps;
  ode.record_growth = options.record_growth;
  const OdeSolution sol =
      integrate_flow(field, s0, options.max_time, stop_pred, ode);

  Trajectory traj;
  traj.status = sol.status;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const Matrix U = unpackU(sol.states[i]);
    const Matrix V = unpackV(sol.states[i]);
    const Matrix M = U * V.transpose();
    TrajectoryRecord rec;
    rec.time = sol.times[i];
    rec.w = sol.states[i];
    rec.beta = Eigen::Map<const Vector>(M.data(), M.size());
    rec.residual = problem.residual(M);
    rec.loss = 0.5 * rec.residual.squaredNorm();
    Vector balance(1);
    balance(0) = (U * U.transpose() - V * V.transpose()).trace();
    rec.extras["balance"] = balance;
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

Trajectory symmetric_flow(const SensingProblem& problem, const Matrix& M0,
                          const StopRule& stop, const FlowOptions& options,
                          double psd_tol) {
  const Eigen::Index d = problem.dim();
  if (M0.rows() != d || M0.cols() != d) {
    throw std::invalid_argument("symmetric_flow: M0 dimension mismatch");
  }
  if (!M0.isApprox(M0.transpose(), 1e-12)) {
    throw std::invalid_argument("symmetric_flow: M0 must be symmetric");
  }

  const auto field = [&](double, const Vector& s) -> Vector {
    Matrix M = Eigen::Map<const Matrix>(s.data(), d, d);
    M = 0.5 * (M + M.transpose());
    // g = ∇ of Σ(⟨Xₙ,M⟩−yₙ)² = 2·Σ rₙXₙ.
    const Matrix g = 2.0 * problem.loss_gradient(M);
    const Matrix dM = -(g * M + M * g);
    Vector out(d * d);
    Eigen::Map<Matrix>(out.data(), d, d) = dM;
    return out;
  };

  const auto stop_pred = [&](double, const Vector& s) -> bool {
    const Matrix M = Eigen::Map<const Matrix>(s.data(), d, d);
    const Vector r = problem.residual(M);
    return stop.satisfied(0.5 * r.squaredNorm(), r.norm(),
                          r.lpNorm<Eigen::Infinity>());
  };

  Vector s0(d * d);
  Eigen::Map<Matrix>(s0.data(), d, d) = M0;

  OdeOptions ode;
  ode.rel_tol = options.rel_tol;
  ode.abs_tol = options.abs_tol;
  ode.max_steps = options.max_steps;
  ode.record_growth = options.record_growth;
  const OdeSolution sol =
      integrate_flow(field, s0, options.max_time, stop_pred, ode);

  Trajectory traj;
  traj.status = sol.status;
  const double scale = std::max(1.0, M0.norm());
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    Matrix M = Eigen::Map<const Matrix>(sol.states[i].data(), d, d);
    const double drift = (M - M.transpose()).norm();
    M = 0.5 * (M + M.transpose());
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues().minCoeff();
    if (min_eig < -psd_tol * std::max(scale, M.norm())) {
      std::ostringstream msg;
      msg << "symmetric_flow: PSD violated at t = " << sol.times[i]
          << " (min eigenvalue " << min_eig << "); step control too loose";
      throw NumericalError(msg.str());
    }
    TrajectoryRecord rec;
    rec.time = sol.times[i];
    rec.w = sol.states[i];
    rec.beta = Eigen::Map<const Vector>(M.data(), M.size());
    rec.residual = problem.residual(M);
    rec.loss = 0.5 * rec.residual.squaredNorm();
    Vector extras(2);
    extras(0) = drift;
    extras(1) = min_eig;
    rec.extras["sym_drift_min_eig"] = extras;
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

CommutingReduction commuting_reduction(const SensingProblem& problem,
                                       std::uint64_t seed) {
  const Eigen::Index d = problem.dim();
  const auto n = static_cast<Eigen::Index>(problem.measurements.size());
  double max_norm2 = 0.0;
  for (const Matrix& X : problem.measurements) {
    if (X.rows() != d || X.cols() != d) {
      throw std::invalid_argument("commuting_reduction: ragged measurements");
    }
    if ((X - X.transpose()).norm() > 1e-10 * std::max(1.0, X.norm())) {
      throw std::invalid_argument(
          "commuting_reduction: measurements must be symmetric");
    }
    max_norm2 = std::max(max_norm2, X.norm() * X.norm());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Matrix& A = problem.measurements[static_cast<std::size_t>(i)];
      const Matrix& B = problem.measurements[static_cast<std::size_t>(j)];
      const double comm = (A * B - B * A).norm();
      if (comm > 1e-8 * max_norm2) {
        std::ostringstream msg;
        msg << "commuting_reduction: measurements " << i << " and " << j
            << " do not commute (||[Xi,Xj]||_F = " << comm
            << "); non-commuting sensing is rejected";
        throw DomainError(msg.str());
      }
    }
  }

  RngStream rng(seed);
  Matrix P;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix Y = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      Y += rng.normal() * problem.measurements[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Y);
    P = eig.eigenvectors();
    double worst = 0.0;
    for (const Matrix& X : problem.measurements) {
      Matrix Dn = P.transpose() * X * P;
      Dn.diagonal().setZero();
      worst = std::max(worst, Dn.norm() / std::max(1.0, X.norm()));
    }
    if (worst <= 1e-8) break;
    if (attempt == 7) {
      throw NumericalError(
          "commuting_reduction: failed to find a joint eigenbasis");
    }
  }

  CommutingReduction red;
  red.basis = P;
  red.vector_problem.X.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    red.vector_problem.X.row(i) =
        (P.transpose() * problem.measurements[static_cast<std::size_t>(i)] * P)
            .diagonal();
  }
  red.vector_problem.y = problem.y;
  red.vector_problem.seed = seed;
  return red;
}

OracleSolution spectral_Q_oracle(const SensingProblem& problem, double mu,
                                 double tol) {
  const CommutingReduction red = commuting_reduction(problem);
  OracleSolution vec_sol = min_Q_alpha_interpolator(red.vector_problem.X,
                                                    red.vector_problem.y, mu,
                                                    tol);
  OracleSolution sol = vec_sol;
  sol.is_matrix = true;
  sol.point_matrix =
      red.basis * vec_sol.point.asDiagonal() * red.basis.transpose();
  sol.point = Eigen::Map<const Vector>(sol.point_matrix.data(),
                                       sol.point_matrix.size());
  sol.method_tag = "commuting-reduction+" + vec_sol.method_tag;
  sol.certificate.feasibility_resid =
      problem.residual(sol.point_matrix).lpNorm<Eigen::Infinity>();
  return sol;
}

double SigmaRule::sigma(Eigen::Index k) const {
  if (k < 1) throw std::invalid_argument("SigmaRule: k must be >= 1");
  const double kd = static_cast<double>(k);
  switch (kind) {
    case SigmaRuleKind::Const:
      return value;
    case SigmaRuleKind::EffectiveConst:
      return std::sqrt(value / std::sqrt(kd));
    case SigmaRuleKind::Mu2Const:
      return std::sqrt(value / kd);
  }
  throw std::logic_error("unreachable");
}

std::string SigmaRule::name() const {
  switch (kind) {
    case SigmaRuleKind::Const: return "sigma_const";
    case SigmaRuleKind::EffectiveConst: return "effective_const";
    case SigmaRuleKind::Mu2Const: return "mu2_const";
  }
  return "?";
}

SensingProblem make_commuting_instance(Eigen::Index d, Eigen::Index n,
                                       std::uint64_t seed,
                                       Eigen::Index planted_nnz) {
  RngStream rng(seed);
  const Matrix raw = gaussian_matrix(d, d, 0.0, 1.0, rng);
  const Matrix P = Eigen::HouseholderQR<Matrix>(raw).householderQ();

  SensingProblem problem;
  Matrix eigrows = gaussian_matrix(n, d, 0.0, 1.0, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    problem.measurements.push_back(
        P * eigrows.row(i).asDiagonal() * P.transpose());
  }
  Vector lambda_star = Vector::Zero(d);
  for (Eigen::Index j = 0; j < std::min(planted_nnz, d); ++j) {
    lambda_star(j) = rng.normal(0.0, 1.0) + (rng.uniform() < 0.5 ? -1.0 : 1.0);
  }
  problem.y = eigrows * lambda_star;
  problem.commuting = CommutingState::Verified;
  return problem;
}

WidthSweepResult width_sweep(Eigen::Index d,
                             const std::vector<Eigen::Index>& k_list,
                             const SigmaRule& sigma_rule, Eigen::Index n,
                             const std::vector<std::uint64_t>& seeds,
                             std::uint64_t instance_seed,
                             const FlowOptions& options) {
  WidthSweepResult result;
  result.problem = make_commuting_instance(d, n, instance_seed);
  result.reduction = commuting_reduction(result.problem);
  const Matrix& Xv = result.reduction.vector_problem.X;
  const Vector& yv = result.reduction.vector_problem.y;
  const OracleSolution l1 = min_l1_interpolator(Xv, yv, 1e-8);
  const OracleSolution l2 = min_l2_interpolator(Xv, yv);
  const double l1_ref = l1.point.lpNorm<1>();
  const double l2_ref = l2.point.squaredNorm();

  StopRule stop;
  stop.residual_inf_tol = 1e-8;

  for (const Eigen::Index k : k_list) {
    for (const std::uint64_t seed : seeds) {
      WidthSweepRow row;
      row.k = k;
      row.seed = seed;
      row.sigma = sigma_rule.sigma(k);
      if (row.sigma == 0.0) {
        row.status = "degenerate";
        row.effective_scale = 0.0;
        row.l1_gap = row.l2_gap = std::numeric_limits<double>::quiet_NaN();
        result.rows.push_back(row);
        continue;
      }
      RngStream rng =
          RngStream(instance_seed).derive(static_cast<std::uint64_t>(k), seed);
      const Matrix U0 = gaussian_matrix(d, k, 0.0, row.sigma, rng);
      const Matrix V0 = gaussian_matrix(d, k, 0.0, row.sigma, rng);
      const Vector diag0 = (U0 * V0.transpose()).diagonal();
      const double mean = diag0.mean();
      row.effective_scale = std::sqrt(
          std::max(0.0, diag0.squaredNorm() / static_cast<double>(d) -
                            mean * mean));
      try {
        const Trajectory traj =
            factored_flow(result.problem, U0, V0, stop, options);
        if (traj.status != RunStatus::Converged) {
          row.status = std::string("flow:") + to_string(traj.status);
        } else {
          const Matrix M = Eigen::Map<const Matrix>(
              traj.endpoint().beta.data(), d, d);
          const Vector spectrum =
              (result.reduction.basis.transpose() * M * result.reduction.basis)
                  .diagonal();
          row.l1_gap = spectrum.lpNorm<1>() / l1_ref - 1.0;
          row.l2_gap = spectrum.squaredNorm() / l2_ref - 1.0;
          row.status = "ok";
        }
      } catch (const std::exception& err) {
        row.status = std::string("error:") + err.what();
        row.l1_gap = row.l2_gap = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace biaslab
