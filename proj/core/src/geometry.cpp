#include "biaslab/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "biaslab/errors.hpp"

namespace biaslab {

Potential Potential::Euclidean(Eigen::Index dim) {
  return Potential(PotentialKind::Euclidean, dim);
}

Potential Potential::Mahalanobis(Matrix Q) {
  if (Q.rows() != Q.cols()) {
    throw std::invalid_argument("Mahalanobis: Q must be square");
  }
  if (!Q.isApprox(Q.transpose(), 1e-12)) {
    throw std::invalid_argument("Mahalanobis: Q must be symmetric");
  }
  Eigen::LLT<Matrix> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("Mahalanobis: Q must be positive definite");
  }
  Potential psi(PotentialKind::Mahalanobis, Q.rows());
  psi.Q_ = std::move(Q);
  psi.Q_llt_ = llt.matrixL();
  return psi;
}

Potential Potential::Entropic(Eigen::Index dim) {
  return Potential(PotentialKind::Entropic, dim);
}

Potential Potential::PNorm(Eigen::Index dim, double p) {
  if (!(p > 1.0 && p <= 2.0)) {
    throw std::invalid_argument("PNorm: p must lie in (1, 2]");
  }
  Potential psi(PotentialKind::PNorm, dim);
  psi.p_ = p;
  return psi;
}

Potential Potential::Hypentropy(Eigen::Index dim, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("Hypentropy: alpha must be > 0");
  }
  Potential psi(PotentialKind::Hypentropy, dim);
  psi.alpha_ = alpha;
  return psi;
}

void Potential::check_dim(const Vector& w) const {
  if (w.size() != dim_) {
    std::ostringstream msg;
    msg << "Potential: expected dimension " << dim_ << ", got " << w.size();
    throw std::invalid_argument(msg.str());
  }
}

bool Potential::in_domain(const Vector& w) const {
  if (w.size() != dim_ || !w.allFinite()) return false;
  if (kind_ == PotentialKind::Entropic) return (w.array() > 0.0).all();
  return true;
}

double Potential::value(const Vector& w) const {
  check_dim(w);
  switch (kind_) {
    case PotentialKind::Euclidean:
      return 0.5 * w.squaredNorm();
    case PotentialKind::Mahalanobis:
      return 0.5 * w.dot(Q_ * w);
    case PotentialKind::Entropic: {
      if (!in_domain(w)) {
        throw DomainError("entropic potential requires strictly positive w");
      }
      const double d = static_cast<double>(dim_);
      return (w.array() * (w.array() * d).log()).sum();
    }
    case PotentialKind::PNorm: {
      const double np = w.array().abs().pow(p_).sum();
      return std::pow(np, 2.0 / p_) / (2.0 * (p_ - 1.0));
    }
    case PotentialKind::Hypentropy: {
      const double a2 = alpha_ * alpha_;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double b = w(i);
        acc += b * std::asinh(b / (2.0 * a2)) - std::sqrt(b * b + 4.0 * a2 * a2);
      }
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

Vector Potential::gradient(const Vector& w) const {
  check_dim(w);
  switch (kind_) {
    case PotentialKind::Euclidean:
      return w;
    case PotentialKind::Mahalanobis:
      return Q_ * w;
    case PotentialKind::Entropic: {
      if (!in_domain(w)) {
        throw DomainError("entropic potential requires strictly positive w");
      }
      const double d = static_cast<double>(dim_);
      return ((w.array() * d).log() + 1.0).matrix();
    }
    case PotentialKind::PNorm: {
      const double norm_p = std::pow(w.array().abs().pow(p_).sum(), 1.0 / p_);
      if (norm_p == 0.0) return Vector::Zero(dim_);
      Vector g(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double s = w(i) >= 0.0 ? 1.0 : -1.0;
        g(i) = std::pow(norm_p, 2.0 - p_) *
               std::pow(std::abs(w(i)), p_ - 1.0) * s / (p_ - 1.0);
      }
      return g;
    }
    case PotentialKind::Hypentropy: {
      const double a2 = alpha_ * alpha_;
      return (w.array() / (2.0 * a2)).asinh().matrix();
    }
  }
  throw std::logic_error("unreachable");
}

Matrix Potential::hessian(const Vector& w) const {
  check_dim(w);
  switch (kind_) {
    case PotentialKind::Euclidean:
      return Matrix::Identity(dim_, dim_);
    case PotentialKind::Mahalanobis:
      return Q_;
    case PotentialKind::Entropic: {
      if (!in_domain(w)) {
        throw DomainError("entropic potential requires strictly positive w");
      }
      return w.array().inverse().matrix().asDiagonal();
    }
    case PotentialKind::PNorm: {
      const double norm_p = std::pow(w.array().abs().pow(p_).sum(), 1.0 / p_);
      if (norm_p == 0.0 || (w.array() == 0.0).any()) {
        throw DomainError("pnorm Hessian undefined at zero coordinates");
      }
      Vector u(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double s = w(i) >= 0.0 ? 1.0 : -1.0;
        u(i) = std::pow(std::abs(w(i)), p_ - 1.0) * s;
      }
      Matrix H = (2.0 - p_) * std::pow(norm_p, 2.0 - 2.0 * p_) /
                 (p_ - 1.0) * (u * u.transpose());
      for (Eigen::Index i = 0; i < dim_; ++i) {
        H(i, i) += std::pow(norm_p, 2.0 - p_) *
                   std::pow(std::abs(w(i)), p_ - 2.0);
      }
      return H;
    }
    case PotentialKind::Hypentropy: {
      const double a4 = std::pow(alpha_, 4);
      return (w.array().square() + 4.0 * a4)
          .rsqrt()
          .matrix()
          .asDiagonal();
    }
  }
  throw std::logic_error("unreachable");
}

Vector Potential::mirror_map(const Vector& w) const { return gradient(w); }

Vector Potential::inverse_mirror(const Vector& theta) const {
  check_dim(theta);
  if (!theta.allFinite()) {
    throw DomainError("inverse_mirror: theta must be finite");
  }
  switch (kind_) {
    case PotentialKind::Euclidean:
      return theta;
    case PotentialKind::Mahalanobis:
      return Eigen::LLT<Matrix>(Q_).solve(theta);
    case PotentialKind::Entropic: {
      const double d = static_cast<double>(dim_);
      Vector w = ((theta.array() - 1.0).exp() / d).matrix();
      if (!in_domain(w)) {
        throw DomainError(
            "entropic inverse_mirror underflowed out of the domain");
      }
      return w;
    }
    case PotentialKind::PNorm: {
      // Dual-norm closed form as the seed, then safeguarded Newton on
      // ∇Ψ(w) = θ, which in this geometry reduces to a single scale factor.
      const double q = p_ / (p_ - 1.0);
      if (theta.isZero(0.0)) return Vector::Zero(dim_);
      Vector v(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double s = theta(i) >= 0.0 ? 1.0 : -1.0;
        v(i) = std::pow(std::abs(theta(i)), q - 1.0) * s;
      }
      const double norm_vp = std::pow(v.array().abs().pow(p_).sum(), 1.0 / p_);
      double c = (p_ - 1.0) * std::pow(norm_vp, p_ - 2.0);
      for (int iter = 0; iter < 60; ++iter) {
        const Vector g = gradient(c * v);
        // g(c·v) = c·‖v‖^{2−p}·u/(p−1) is linear in c along the ray.
        const double gc = g.norm();
        const double target = theta.norm();
        if (std::abs(gc - target) <= 1e-10 * std::max(1.0, target)) break;
        c *= target / std::max(gc, 1e-300);
      }
      return c * v;
    }
    case PotentialKind::Hypentropy: {
      const double a2 = alpha_ * alpha_;
      return (2.0 * a2 * theta.array().sinh()).matrix();
    }
  }
  throw std::logic_error("unreachable");
}

double Potential::conjugate_value(const Vector& theta) const {
  const Vector w = inverse_mirror(theta);
  return theta.dot(w) - value(w);
}

double bregman(const Potential& psi, const Vector& x, const Vector& y) {
  if (!psi.in_domain(x) || !psi.in_domain(y)) {
    throw DomainError("bregman: argument outside the potential's domain");
  }
  return psi.value(x) - psi.value(y) - psi.gradient(y).dot(x - y);
}

HessianMapReport hessian_map_check(const MetricTensor& rho, const Vector& w,
                                   double tol) {
  const Eigen::Index d = w.size();
  const double h = 1e-5 * std::max(1.0, w.norm());
  std::vector<Matrix> drho(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector wp = w, wm = w;
    wp(k) += h;
    wm(k) -= h;
    drho[static_cast<std::size_t>(k)] = (rho(wp) - rho(wm)) / (2.0 * h);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const double lhs = drho[static_cast<std::size_t>(k)](i, j);
        const double rhs = drho[static_cast<std::size_t>(j)](i, k);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return HessianMapReport{worst <= tol, worst};
}

}  // namespace biaslab
