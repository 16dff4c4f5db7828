#include "biaslab/classification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biaslab/errors.hpp"
#include "biaslab/models.hpp"
#include "biaslab/oracles.hpp"
#include "biaslab/rng.hpp"

namespace biaslab {
namespace {

double logistic_loss(const Matrix& X, const Vector& y, const Vector& w) {
  const Vector yhat = X * w;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double m = y(i) * yhat(i);
    acc += m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return acc / static_cast<double>(y.size());
}

Vector logistic_grad(const Matrix& X, const Vector& y, const Vector& w) {
  const Vector yhat = X * w;
  Vector r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    r(i) = -y(i) / ((1.0 + std::exp(y(i) * yhat(i))) *
                    static_cast<double>(y.size()));
  }
  return X.transpose() * r;
}

struct GrowthFit {
  double slope = 0.0;
  double r2 = 0.0;
};

// Least-squares fit of ‖w‖ = a·log k + b over the recorded tail.
GrowthFit fit_growth(const std::vector<double>& log_k,
                     const std::vector<double>& norms) {
  const std::size_t m = log_k.size();
  if (m < 3) return {};
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += log_k[i];
    sy += norms[i];
    sxx += log_k[i] * log_k[i];
    sxy += log_k[i] * norms[i];
    syy += norms[i] * norms[i];
  }
  const double n = static_cast<double>(m);
  const double cov = sxy - sx * sy / n;
  const double varx = sxx - sx * sx / n;
  const double vary = syy - sy * sy / n;
  GrowthFit fit;
  fit.slope = varx > 0 ? cov / varx : 0.0;
  fit.r2 = (varx > 0 && vary > 0) ? (cov * cov) / (varx * vary) : 0.0;
  return fit;
}

}  // namespace

SeparableDataset gen_separable(Eigen::Index d, Eigen::Index n, double margin,
                               std::uint64_t seed) {
  if (!(margin > 0.0)) {
    throw std::invalid_argument("gen_separable: margin must be > 0");
  }
  RngStream rng(seed);
  Vector w_star = gaussian_vector(d, 0.0, 1.0, rng);
  w_star.normalize();

  SeparableDataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  data.planted_margin = margin;
  data.seed = seed;
  data.planted_w = w_star;

  const long cap_per_point = 100000;
  for (Eigen::Index i = 0; i < n; ++i) {
    long tries = 0;
    while (true) {
      if (++tries > cap_per_point) {
        std::ostringstream msg;
        msg << "gen_separable: rejection cap exceeded at point " << i
            << "; margin " << margin << " too large for d = " << d;
        throw NumericalError(msg.str());
      }
      const Vector x = gaussian_vector(d, 0.0, 1.0, rng);
      const double proj = w_star.dot(x);
      if (std::abs(proj) >= margin) {
        data.X.row(i) = x.transpose();
        data.y(i) = proj >= 0.0 ? 1.0 : -1.0;
        break;
      }
    }
  }
  return data;
}

Vector nnls_dual_fit(const Matrix& X, const Vector& y, const Vector& target,
                     int sweeps) {
  const Eigen::Index n = X.rows();
  Matrix A(n, X.cols());
  for (Eigen::Index i = 0; i < n; ++i) A.row(i) = y(i) * X.row(i);
  Vector nu = Vector::Zero(n);
  Vector resid = -target;  // Aᵀν − target
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double aii = A.row(i).squaredNorm();
      if (aii == 0.0) continue;
      const double gi = A.row(i).dot(resid);
      const double cand = std::max(0.0, nu(i) - gi / aii);
      const double delta = cand - nu(i);
      if (delta != 0.0) {
        resid += delta * A.row(i).transpose();
        nu(i) = cand;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change < 1e-14) break;
  }
  return nu;
}

std::vector<DirectionReport> logistic_gd_direction(
    const SeparableDataset& data, double step,
    const std::vector<double>& eps_list, long cap) {
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("eps_list must be strictly decreasing");
    }
  }
  if (eps_list.empty() || eps_list.back() <= 0.0) {
    throw std::invalid_argument("eps_list must be nonempty and positive");
  }

  const OracleSolution oracle = max_margin(data.X, data.y, 1e-10);
  const Vector oracle_dir = oracle.point.normalized();

  Vector w = Vector::Zero(data.X.cols());
  double loss = logistic_loss(data.X, data.y, w);
  double eta = step;
  std::vector<double> tail_logk, tail_norm;
  std::vector<DirectionReport> reports;
  std::size_t next_eps = 0;

  for (long k = 1; k <= cap && next_eps < eps_list.size(); ++k) {
    const Vector g = logistic_grad(data.X, data.y, w);
    // Doubling trial step with backtracking keeps the loss monotone while
    // letting the step grow as the iterates escape to infinity.
    eta *= 2.0;
    Vector w_next = w - eta * g;
    double loss_next = logistic_loss(data.X, data.y, w_next);
    int bt = 0;
    while (loss_next >= loss && bt < 60) {
      eta *= 0.5;
      w_next = w - eta * g;
      loss_next = logistic_loss(data.X, data.y, w_next);
      ++bt;
    }
    if (bt >= 60) break;  // no descent direction progress left
    w = w_next;
    loss = loss_next;

    if (k > 8) {
      tail_logk.push_back(std::log(static_cast<double>(k)));
      tail_norm.push_back(w.norm());
      if (tail_logk.size() > 4096) {
        tail_logk.erase(tail_logk.begin(), tail_logk.begin() + 2048);
        tail_norm.erase(tail_norm.begin(), tail_norm.begin() + 2048);
      }
    }

    while (next_eps < eps_list.size() && loss <= eps_list[next_eps]) {
      DirectionReport rep;
      rep.eps = eps_list[next_eps];
      rep.w_hat = w.normalized();
      rep.loss = loss;
      rep.iterations = k;
      rep.cosine_to_oracle = rep.w_hat.dot(oracle_dir);
      const Vector margins =
          (data.X * rep.w_hat).cwiseProduct(data.y);
      const double gamma = margins.minCoeff();
      if (gamma > 0.0) {
        const Vector w_tilde = rep.w_hat / gamma;
        const Vector m = (data.X * w_tilde).cwiseProduct(data.y);
        const Vector nu = nnls_dual_fit(data.X, data.y, w_tilde);
        Vector recon = Vector::Zero(w_tilde.size());
        for (Eigen::Index i = 0; i < data.y.size(); ++i) {
          recon += nu(i) * data.y(i) * data.X.row(i).transpose();
        }
        rep.margin_kkt.feasibility = std::max(0.0, 1.0 - m.minCoeff());
        rep.margin_kkt.stationarity =
            (w_tilde - recon).lpNorm<Eigen::Infinity>();
        rep.margin_kkt.comp_slack =
            (nu.array() * (m.array() - 1.0)).abs().maxCoeff();
      }
      const GrowthFit fit = fit_growth(tail_logk, tail_norm);
      rep.growth_fit = fit.slope;
      rep.growth_r2 = fit.r2;
      reports.push_back(std::move(rep));
      ++next_eps;
    }
  }
  return reports;
}

std::vector<LogisticFlowSnapshot> diag_logistic_flow(
    const SeparableDataset& data, double alpha, int depth,
    const std::vector<double>& eps_list, const FlowOptions& options) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("eps_list must be strictly decreasing");
    }
  }
  const Parametrization net = Parametrization::DiagSigned(data.X.cols(), depth);
  StopRule stop;
  stop.loss_tol = eps_list.back();
  FlowOptions opts = options;
  opts.record_growth = 1.05;  // dense records so every ε level is bracketed

  const Trajectory traj = param_flow(net, data.as_dataset(), LossKind::Logistic,
                                     net.scaled_ones_init(alpha), stop, opts);
  std::vector<LogisticFlowSnapshot> snaps;
  std::size_t next = 0;
  for (const TrajectoryRecord& rec : traj.records) {
    while (next < eps_list.size() && rec.loss <= eps_list[next]) {
      LogisticFlowSnapshot snap;
      snap.eps = eps_list[next];
      snap.time = rec.time;
      snap.beta = rec.beta;
      snap.margin = (data.X * rec.beta).cwiseProduct(data.y).minCoeff();
      if (snap.margin > 0.0) snap.beta_normalized = rec.beta / snap.margin;
      snaps.push_back(std::move(snap));
      ++next;
    }
  }
  if (snaps.empty()) {
    std::ostringstream msg;
    msg << "diag_logistic_flow: integrator " << to_string(traj.status)
        << " before the first loss level " << eps_list.front()
        << "; try a smaller alpha or a larger time/step cap";
    throw NumericalError(msg.str());
  }
  return snaps;
}

}  // namespace biaslab
