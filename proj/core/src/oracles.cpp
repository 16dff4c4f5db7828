#include "biaslab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "biaslab/errors.hpp"
#include "biaslab/regularizers.hpp"

namespace biaslab {
namespace {

void check_problem(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument("oracle: X rows and y length differ");
  }
  if (X.rows() == 0 || X.cols() == 0) {
    throw std::invalid_argument("oracle: empty problem");
  }
}

Vector soft_threshold(const Vector& v, double kappa) {
  return v.array().sign() * (v.array().abs() - kappa).max(0.0);
}

}  // namespace

OracleSolution min_l2_interpolator(const Matrix& X, const Vector& y) {
  check_problem(X, y);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(X * X.transpose());
  const Vector nu = cod.solve(y);
  const Vector beta = X.transpose() * nu;
  const Vector resid = X * beta - y;
  const double feas = resid.lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + y.lpNorm<Eigen::Infinity>();
  if (feas > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "min_l2_interpolator: Xb = y infeasible, least-squares residual "
        << feas;
    throw NumericalError(msg.str());
  }
  OracleSolution sol;
  sol.point = beta;
  sol.dual = nu;
  sol.method_tag = "pinv";
  sol.iterations = 1;
  sol.certificate.stationarity_resid =
      (beta - X.transpose() * nu).lpNorm<Eigen::Infinity>();
  sol.certificate.feasibility_resid = feas;
  sol.certificate.comp_slack_resid = 0.0;
  sol.certificate.duality_gap = std::abs(nu.dot(resid));
  return sol;
}

namespace {

// Basic-solution polish for basis pursuit: fix the support, solve the square
// system, and certify with the exact dual of that support.
bool try_polish_l1(const Matrix& X, const Vector& y,
                   const std::vector<Eigen::Index>& support, double tol,
                   OracleSolution* out) {
  const Eigen::Index n = X.rows();
  const auto s = static_cast<Eigen::Index>(support.size());
  if (s == 0 || s > n) return false;
  Matrix Xs(n, s);
  for (Eigen::Index j = 0; j < s; ++j) Xs.col(j) = X.col(support[j]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Xs);
  if (cod.rank() < s) return false;
  const Vector beta_s = cod.solve(y);
  if ((Xs * beta_s - y).lpNorm<Eigen::Infinity>() >
      1e-10 * (1.0 + y.lpNorm<Eigen::Infinity>())) {
    return false;
  }
  // Dual from Xsᵀ ν = sign(β_s), then global dual feasibility check.
  Vector sgn(s);
  for (Eigen::Index j = 0; j < s; ++j) sgn(j) = beta_s(j) >= 0.0 ? 1.0 : -1.0;
  Eigen::CompleteOrthogonalDecomposition<Matrix> codt(Xs.transpose());
  const Vector nu = codt.solve(sgn);
  if ((Xs.transpose() * nu - sgn).lpNorm<Eigen::Infinity>() > 1e-9) {
    return false;
  }
  const double dual_inf = (X.transpose() * nu).lpNorm<Eigen::Infinity>();
  if (dual_inf > 1.0 + 1e-9) return false;

  Vector beta = Vector::Zero(X.cols());
  for (Eigen::Index j = 0; j < s; ++j) beta(support[j]) = beta_s(j);
  const double gap = std::abs(beta.lpNorm<1>() - y.dot(nu));
  if (gap > tol) return false;

  out->point = beta;
  out->dual = nu;
  out->method_tag = "admm+basic-polish";
  out->certificate.feasibility_resid = (X * beta - y).lpNorm<Eigen::Infinity>();
  out->certificate.stationarity_resid =
      (Xs.transpose() * nu - sgn).lpNorm<Eigen::Infinity>();
  double comp = 0.0;
  for (Eigen::Index j = 0; j < s; ++j) {
    comp = std::max(comp, std::abs(beta_s(j)) *
                              std::abs((Xs.transpose() * nu)(j) - sgn(j)));
  }
  out->certificate.comp_slack_resid = comp;
  out->certificate.duality_gap = gap;
  return true;
}

}  // namespace

OracleSolution min_l1_interpolator(const Matrix& X, const Vector& y,
                                   double tol) {
  check_problem(X, y);
  if (!(tol > 0.0)) throw std::invalid_argument("min_l1: tol must be > 0");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();

  Eigen::CompleteOrthogonalDecomposition<Matrix> gram(X * X.transpose());
  const auto project = [&](const Vector& v) -> Vector {
    return v - X.transpose() * gram.solve(X * v - y);
  };
  {
    // Feasibility sanity before iterating.
    const Vector beta0 = project(Vector::Zero(d));
    const double feas = (X * beta0 - y).lpNorm<Eigen::Infinity>();
    if (feas > 1e-8 * (1.0 + y.lpNorm<Eigen::Infinity>())) {
      std::ostringstream msg;
      msg << "min_l1_interpolator: Xb = y infeasible, residual " << feas;
      throw NumericalError(msg.str());
    }
  }

  const double rho = 1.0;
  const double relax = 1.6;
  Vector beta = project(Vector::Zero(d));
  Vector z = beta;
  Vector u = Vector::Zero(d);
  OracleSolution sol;
  const long max_iters = 400000;
  double gap = std::numeric_limits<double>::infinity();

  for (long k = 1; k <= max_iters; ++k) {
    beta = project(z - u);
    const Vector beta_hat = relax * beta + (1.0 - relax) * z;
    z = soft_threshold(beta_hat + u, 1.0 / rho);
    u += beta_hat - z;

    if (k % 25 == 0 || k == max_iters) {
      // Candidate support from the sparse iterate.
      std::vector<Eigen::Index> support;
      const double zmax = z.lpNorm<Eigen::Infinity>();
      for (Eigen::Index i = 0; i < d; ++i) {
        if (std::abs(z(i)) > 1e-9 * std::max(1.0, zmax)) support.push_back(i);
      }
      sol.iterations = k;
      if (try_polish_l1(X, y, support, tol, &sol)) return sol;

      // Certified stop without polish: scaled dual from the ADMM multiplier.
      const Vector shat = rho * u;
      Vector nu = gram.solve(X * shat);
      const double dual_inf = (X.transpose() * nu).lpNorm<Eigen::Infinity>();
      if (dual_inf > 1.0) nu /= dual_inf;
      gap = beta.lpNorm<1>() - y.dot(nu);
      if (std::abs(gap) <= tol && (beta - z).lpNorm<Eigen::Infinity>() <= tol) {
        sol.point = project(z);
        sol.dual = nu;
        sol.method_tag = "admm";
        sol.certificate.feasibility_resid =
            (X * sol.point - y).lpNorm<Eigen::Infinity>();
        const Vector xtnu = X.transpose() * nu;
        double stat = 0.0, comp = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
          if (std::abs(sol.point(i)) > 1e-8 * std::max(1.0, zmax)) {
            const double sgn = sol.point(i) > 0.0 ? 1.0 : -1.0;
            stat = std::max(stat, std::abs(xtnu(i) - sgn));
          }
          comp = std::max(comp,
                          std::abs(sol.point(i)) * (1.0 - std::abs(xtnu(i))));
        }
        sol.certificate.stationarity_resid = stat;
        sol.certificate.comp_slack_resid = comp;
        sol.certificate.duality_gap = std::abs(gap);
        return sol;
      }
    }
  }
  std::ostringstream msg;
  msg << "min_l1_interpolator: no convergence in " << max_iters
      << " iterations, duality gap " << gap;
  throw NumericalError(msg.str());
}

OracleSolution min_bregman_interpolator(const Potential& psi, const Vector& w0,
                                        const Matrix& X, const Vector& y,
                                        double tol) {
  check_problem(X, y);
  if (!psi.in_domain(w0)) {
    throw DomainError("min_bregman_interpolator: w0 outside domain");
  }
  const Eigen::Index n = X.rows();
  const Vector theta0 = psi.mirror_map(w0);

  // Dual objective D(ν) = Ψ*(θ0 + Xᵀν) − ⟨y, ν⟩, ∇D = X·w(ν) − y.
  const auto dual_value = [&](const Vector& nu) -> double {
    const Vector theta = theta0 + X.transpose() * nu;
    try {
      return psi.conjugate_value(theta) - y.dot(nu);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Vector nu = Vector::Zero(n);
  double value = dual_value(nu);
  std::vector<double> history;
  const long max_iters = 500;

  for (long k = 0; k < max_iters; ++k) {
    const Vector theta = theta0 + X.transpose() * nu;
    const Vector w = psi.inverse_mirror(theta);
    const Vector grad = X * w - y;
    const double resid = grad.lpNorm<Eigen::Infinity>();
    history.push_back(resid);
    if (resid <= tol) {
      OracleSolution sol;
      sol.point = w;
      sol.dual = nu;
      sol.iterations = k;
      sol.method_tag = "dual-newton";
      sol.certificate.feasibility_resid = resid;
      sol.certificate.stationarity_resid =
          (psi.mirror_map(w) - theta0 - X.transpose() * nu)
              .lpNorm<Eigen::Infinity>();
      sol.certificate.comp_slack_resid = 0.0;
      sol.certificate.duality_gap =
          std::abs(bregman(psi, w, w0) - (y.dot(nu) -
                                          psi.conjugate_value(theta) +
                                          psi.conjugate_value(theta0)));
      return sol;
    }

    const Matrix hess_psi = psi.hessian(w);
    Eigen::LDLT<Matrix> hthe(hess_psi);
    const Matrix HinvXt = hthe.solve(X.transpose());
    const Matrix H = X * HinvXt;  // ∇²D
    Vector step = Eigen::LDLT<Matrix>(H).solve(-grad);
    if (!step.allFinite()) {
      step = -grad;  // damped fallback
    }

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector cand = nu + t * step;
      const double cand_value = dual_value(cand);
      if (cand_value < value - 1e-14 * std::abs(value)) {
        nu = cand;
        value = cand_value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Gradient fallback before declaring stagnation.
      double tg = 1.0 / (1.0 + grad.norm());
      for (int ls = 0; ls < 60 && !accepted; ++ls) {
        const Vector cand = nu - tg * grad;
        const double cand_value = dual_value(cand);
        if (cand_value < value) {
          nu = cand;
          value = cand_value;
          accepted = true;
        }
        tg *= 0.5;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "min_bregman_interpolator: Newton stagnation; residual history:";
      const std::size_t from = history.size() > 6 ? history.size() - 6 : 0;
      for (std::size_t i = from; i < history.size(); ++i) {
        msg << " " << history[i];
      }
      throw NumericalError(msg.str());
    }
  }
  throw NumericalError("min_bregman_interpolator: iteration cap reached");
}

namespace {

// Damped Newton on a smooth convex dual with merit function `value`,
// gradient `grad` and Hessian `hess`; shared by the sinh and depth oracles.
struct DualNewtonResult {
  Vector s;
  long iterations = 0;
};

DualNewtonResult dual_newton(
    const std::function<double(const Vector&)>& value,
    const std::function<Vector(const Vector&)>& grad,
    const std::function<Matrix(const Vector&)>& hess, Eigen::Index n,
    double tol, const char* who) {
  Vector s = Vector::Zero(n);
  double val = value(s);
  long iters = 0;
  bool newton_healthy = true;

  for (long k = 0; k < 500; ++k) {
    iters = k;
    const Vector g = grad(s);
    if (g.lpNorm<Eigen::Infinity>() <= tol) return {s, iters};

    Vector step;
    if (newton_healthy) {
      step = Eigen::LDLT<Matrix>(hess(s)).solve(-g);
      if (!step.allFinite()) step = -g;
    } else {
      step = -g;
    }
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const Vector cand = s + t * step;
      const double cand_val = value(cand);
      if (std::isfinite(cand_val) && cand_val < val) {
        s = cand;
        val = cand_val;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (newton_healthy) {
        newton_healthy = false;  // damped gradient fallback
        continue;
      }
      std::ostringstream msg;
      msg << who << ": stalled with gradient norm "
          << g.lpNorm<Eigen::Infinity>();
      throw NumericalError(msg.str());
    }
  }
  const Vector g = grad(s);
  if (g.lpNorm<Eigen::Infinity>() <= tol) return {s, iters};
  std::ostringstream msg;
  msg << who << ": iteration cap reached, residual "
      << g.lpNorm<Eigen::Infinity>();
  throw NumericalError(msg.str());
}

}  // namespace

OracleSolution min_Q_alpha_interpolator(const Matrix& X, const Vector& y,
                                        double alpha, double tol) {
  check_problem(X, y);
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("min_Q_alpha: alpha must be > 0");
  }
  const double a2 = alpha * alpha;
  const auto beta_of = [&](const Vector& s) -> Vector {
    return (2.0 * a2 * (-4.0 * (X.transpose() * s).array()).sinh()).matrix();
  };
  // Convex merit Φ(s) = Σ (α²/2)·cosh(−4(Xᵀs)ᵢ) + ⟨y, s⟩; ∇Φ = y − Xβ(s).
  const auto value = [&](const Vector& s) -> double {
    const Eigen::ArrayXd t = -4.0 * (X.transpose() * s).array();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      acc += 0.5 * a2 * std::cosh(t(i));
      if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
    }
    return acc + y.dot(s);
  };
  const auto grad = [&](const Vector& s) -> Vector {
    return y - X * beta_of(s);
  };
  const auto hess = [&](const Vector& s) -> Matrix {
    const Eigen::ArrayXd c = (-4.0 * (X.transpose() * s).array()).cosh();
    return 8.0 * a2 *
           (X * c.matrix().asDiagonal() * X.transpose());
  };

  const auto res = dual_newton(value, grad, hess, X.rows(), tol,
                               "min_Q_alpha_interpolator");
  OracleSolution sol;
  sol.point = beta_of(res.s);
  sol.dual = -4.0 * res.s;
  sol.iterations = res.iterations;
  sol.method_tag = "sinh-dual-newton";
  sol.certificate.feasibility_resid =
      (X * sol.point - y).lpNorm<Eigen::Infinity>();
  sol.certificate.stationarity_resid =
      (Q_alpha_gradient(sol.point, alpha) - X.transpose() * sol.dual)
          .lpNorm<Eigen::Infinity>();
  sol.certificate.comp_slack_resid = 0.0;
  // Fenchel gap with Q*(θ) = Σ α²(2cosh(θᵢ) − 2).
  const Eigen::ArrayXd theta = (X.transpose() * sol.dual).array();
  const double dual_val =
      y.dot(sol.dual) - (a2 * (2.0 * theta.cosh() - 2.0)).sum();
  sol.certificate.duality_gap = std::abs(Q_alpha(sol.point, alpha) - dual_val);
  return sol;
}

OracleSolution min_Q_depth_interpolator(const Matrix& X, const Vector& y,
                                        double alpha, int depth, double tol) {
  check_problem(X, y);
  if (depth == 2) return min_Q_alpha_interpolator(X, y, alpha, tol);
  if (depth < 3) throw std::invalid_argument("min_Q_depth: depth must be >= 2");
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("min_Q_depth: alpha must be > 0");
  }
  const double D = static_cast<double>(depth);
  const double aD = std::pow(alpha, D);
  const double gamma = D * (D - 2.0) * std::pow(alpha, D - 2.0);
  const double e = -D / (D - 2.0);

  const auto beta_of = [&](const Vector& s) -> Vector {
    const Eigen::ArrayXd v = gamma * (X.transpose() * s).array();
    return (aD * ((1.0 + v).pow(e) - (1.0 - v).pow(e))).matrix();
  };
  // Φ(s) = (α^D(D−2)/(2γ))·Σ[(1+vᵢ)^{−2/(D−2)} + (1−vᵢ)^{−2/(D−2)}] + ⟨y,s⟩
  // blows up at the domain edge |v| → 1, so the line search never leaves it.
  const double e2 = -2.0 / (D - 2.0);
  const auto value = [&](const Vector& s) -> double {
    const Eigen::ArrayXd v = gamma * (X.transpose() * s).array();
    if ((v.abs() >= 1.0).any()) {
      return std::numeric_limits<double>::infinity();
    }
    const double phi =
        (aD * (D - 2.0) / (2.0 * gamma)) *
        ((1.0 + v).pow(e2) + (1.0 - v).pow(e2)).sum();
    return phi + y.dot(s);
  };
  const auto grad = [&](const Vector& s) -> Vector {
    return y - X * beta_of(s);
  };
  const auto hess = [&](const Vector& s) -> Matrix {
    const Eigen::ArrayXd v = gamma * (X.transpose() * s).array();
    const Eigen::ArrayXd hprime =
        e * ((1.0 + v).pow(e - 1.0) + (1.0 - v).pow(e - 1.0));
    return -gamma * aD *
           (X * hprime.matrix().asDiagonal() * X.transpose());
  };

  const auto res = dual_newton(value, grad, hess, X.rows(), tol,
                               "min_Q_depth_interpolator");
  OracleSolution sol;
  sol.point = beta_of(res.s);
  sol.dual = -(gamma / aD) * res.s;
  sol.iterations = res.iterations;
  sol.method_tag = "depth-dual-newton";
  sol.certificate.feasibility_resid =
      (X * sol.point - y).lpNorm<Eigen::Infinity>();
  // ∇Q_D(β)ᵢ = −h̃⁻¹(βᵢ/α^D)/α^D must equal (Xᵀν)ᵢ; recompute through the
  // closed-form manifold coordinates.
  const Eigen::ArrayXd v = gamma * (X.transpose() * res.s).array();
  sol.certificate.stationarity_resid =
      ((-v / aD).matrix() - X.transpose() * sol.dual).lpNorm<Eigen::Infinity>();
  sol.certificate.comp_slack_resid = 0.0;
  sol.certificate.duality_gap = 0.0;
  return sol;
}

OracleSolution max_margin(const Matrix& X, const Vector& y, double tol) {
  check_problem(X, y);
  if (!(tol > 0.0)) throw std::invalid_argument("max_margin: tol must be > 0");
  const Eigen::Index n = X.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      throw std::invalid_argument("max_margin: labels must be ±1");
    }
  }
  Vector norms2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms2(i) = X.row(i).squaredNorm();
    if (norms2(i) == 0.0) {
      throw std::invalid_argument("max_margin: zero data vector");
    }
  }

  Vector nu = Vector::Zero(n);
  Vector w = Vector::Zero(X.cols());
  const long max_sweeps = 2'000'000;
  const double dual_bound = 1e14;

  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin = y(i) * w.dot(X.row(i).transpose());
      const double target = std::max(0.0, nu(i) + (1.0 - margin) / norms2(i));
      const double delta = target - nu(i);
      if (delta != 0.0) {
        w += delta * y(i) * X.row(i).transpose();
        nu(i) = target;
      }
    }
    if (sweep % 16 == 0 || sweep == 1) {
      double min_margin = std::numeric_limits<double>::infinity();
      double comp = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double margin = y(i) * w.dot(X.row(i).transpose());
        min_margin = std::min(min_margin, margin);
        comp = std::max(comp, std::abs(nu(i) * (margin - 1.0)));
      }
      if (min_margin >= 1.0 - tol && comp <= tol) {
        OracleSolution sol;
        sol.point = w;
        sol.dual = nu;
        sol.iterations = sweep;
        sol.method_tag = "dual-coordinate-ascent";
        sol.margin = min_margin / w.norm();
        sol.certificate.feasibility_resid = std::max(0.0, 1.0 - min_margin);
        Vector recon = Vector::Zero(X.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
          recon += nu(i) * y(i) * X.row(i).transpose();
        }
        sol.certificate.stationarity_resid =
            (w - recon).lpNorm<Eigen::Infinity>();
        sol.certificate.comp_slack_resid = comp;
        const double primal =
            0.5 * (w / std::max(min_margin, 1e-300)).squaredNorm();
        const double dual_val = nu.sum() - 0.5 * w.squaredNorm();
        sol.certificate.duality_gap = std::abs(primal - dual_val);
        return sol;
      }
      if (nu.sum() > dual_bound) break;
    }
  }
  throw NumericalError(
      "max_margin: dual ascent made no progress (data not strictly linearly "
      "separable?)");
}

OracleSolution min_Q_margin(const Matrix& X, const Vector& y, double alpha,
                            double tol) {
  check_problem(X, y);
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("min_Q_margin: alpha must be > 0");
  }
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  // Signed data rows a_i = yᵢxᵢ so the constraints read ⟨aᵢ, β⟩ ≥ 1.
  Matrix A(n, d);
  for (Eigen::Index i = 0; i < n; ++i) A.row(i) = y(i) * X.row(i);

  // Strictly feasible start from the hard-margin separator.
  const OracleSolution mm = max_margin(X, y, std::min(1e-8, tol));
  Vector beta = 1.5 * mm.point / std::max((A * mm.point).minCoeff(), 1e-300);

  const double a2 = alpha * alpha;
  const double a4 = a2 * a2;
  double t = 1.0;
  long newton_iters = 0;
  const double t_max = std::max(4.0 * static_cast<double>(n) / tol, 1e4);

  while (true) {
    for (int it = 0; it < 200; ++it) {
      ++newton_iters;
      const Vector m = A * beta;
      if (m.minCoeff() <= 0.0) {
        throw NumericalError("min_Q_margin: barrier iterate left feasibility");
      }
      const Vector grad_q = Q_alpha_gradient(beta, alpha);
      const Vector grad =
          t * grad_q - A.transpose() * m.array().inverse().matrix();
      Matrix H = A.transpose() * m.array().square().inverse().matrix().asDiagonal() * A;
      for (Eigen::Index i = 0; i < d; ++i) {
        H(i, i) += t / std::sqrt(beta(i) * beta(i) + 4.0 * a4);
      }
      const Vector step = Eigen::LDLT<Matrix>(H).solve(-grad);
      const double decrement = -grad.dot(step);
      if (!step.allFinite()) {
        throw NumericalError("min_Q_margin: Newton step failed");
      }
      // Backtrack to stay strictly feasible and decrease the barrier value.
      const auto barrier_value = [&](const Vector& b) -> double {
        const Vector mb = A * b;
        if (mb.minCoeff() <= 0.0) {
          return std::numeric_limits<double>::infinity();
        }
        return t * Q_alpha(b, alpha) - mb.array().log().sum();
      };
      const double base = barrier_value(beta);
      double ls = 1.0;
      for (int bt = 0; bt < 80; ++bt) {
        const Vector cand = beta + ls * step;
        if (barrier_value(cand) <= base - 0.25 * ls * std::abs(decrement)) {
          beta = cand;
          break;
        }
        ls *= 0.5;
      }
      if (std::abs(decrement) < 1e-14 * (1.0 + std::abs(base))) break;
    }
    if (static_cast<double>(n) / t <= 0.25 * tol || t >= t_max) break;
    t *= 8.0;
  }

  const Vector m = A * beta;
  Vector nu = (m.array() * t).inverse().matrix();
  OracleSolution sol;
  sol.point = beta;
  sol.dual = nu;
  sol.iterations = newton_iters;
  sol.method_tag = "log-barrier-newton";
  sol.margin = m.minCoeff() / beta.norm();
  sol.certificate.feasibility_resid = std::max(0.0, 1.0 - m.minCoeff());
  sol.certificate.stationarity_resid =
      (Q_alpha_gradient(beta, alpha) - A.transpose() * nu)
          .lpNorm<Eigen::Infinity>();
  sol.certificate.comp_slack_resid =
      (nu.array() * (m.array() - 1.0)).abs().maxCoeff();
  sol.certificate.duality_gap = static_cast<double>(n) / t;
  return sol;
}

double explicit_reg_oracle(int depth, double alpha, double beta_target,
                           double tol) {
  if (depth < 2) throw std::invalid_argument("explicit_reg_oracle: depth >= 2");
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("explicit_reg_oracle: alpha must be > 0");
  }
  if (!(tol > 0.0)) tol = 1e-10;
  const double beta = std::abs(beta_target);  // w₊ ↔ w₋ symmetry
  const double D = static_cast<double>(depth);

  // Parametrize the constraint curve by t = w₋ ≥ 0, w₊ = (β + t^D)^{1/D}.
  const auto objective = [&](double tpar) -> double {
    const double a = std::pow(beta + std::pow(tpar, D), 1.0 / D);
    const double da = a - alpha;
    const double db = tpar - alpha;
    return da * da + db * db;
  };

  const double hi0 = 3.0 * (alpha + std::pow(beta, 1.0 / D)) + 2.0;
  // Coarse scan localizes the global minimum, golden section refines it.
  const int grid = 400;
  double best_t = 0.0;
  double best_val = objective(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double tpar = hi0 * static_cast<double>(i) / grid;
    const double val = objective(tpar);
    if (val < best_val) {
      best_val = val;
      best_t = tpar;
    }
  }
  double lo = std::max(0.0, best_t - hi0 / grid);
  double hi = std::min(hi0, best_t + hi0 / grid);

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(x2);
    }
  }
  return objective(0.5 * (lo + hi));
}

}  // namespace biaslab
