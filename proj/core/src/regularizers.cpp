#include "biaslab/regularizers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "biaslab/errors.hpp"
#include "biaslab/geometry.hpp"
#include "biaslab/numerics.hpp"
#include "biaslab/oracles.hpp"

namespace biaslab {

double q(double z) {
  return 2.0 - std::sqrt(4.0 + z * z) + z * std::asinh(0.5 * z);
}

double Q_alpha(const Vector& beta, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Q_alpha: alpha must be > 0");
  const double a2 = alpha * alpha;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) acc += a2 * q(beta(i) / a2);
  return acc;
}

Vector Q_alpha_gradient(const Vector& beta, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Q_alpha: alpha must be > 0");
  const double a2 = alpha * alpha;
  return (beta.array() / (2.0 * a2)).asinh().matrix();
}

double h_depth_domain_bound(int depth, double alpha) {
  if (depth < 3) throw std::invalid_argument("h_depth_domain_bound: depth >= 3");
  const double D = static_cast<double>(depth);
  return std::pow(alpha, 2.0 - D) / (D * (D - 2.0));
}

namespace {

// Scale-free core h̃(v) = (1+v)^{−D/(D−2)} − (1−v)^{−D/(D−2)} on (−1, 1);
// odd, strictly decreasing, onto ℝ.
double h_core(double v, int depth) {
  const double D = static_cast<double>(depth);
  const double e = -D / (D - 2.0);
  return std::pow(1.0 + v, e) - std::pow(1.0 - v, e);
}

// h̃⁻¹ by bisection (tol well below the 1e-10 quadrature request so the
// integrand looks smooth to the adaptive rule).
double h_core_inverse(double z, int depth) {
  if (z == 0.0) return 0.0;
  // h̃ is decreasing: positive z maps to v in (−1, 0).
  double lo = z > 0.0 ? -1.0 : 0.0;
  double hi = z > 0.0 ? 0.0 : 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (h_core(mid, depth) > z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double h_depth(double c, int depth, double alpha) {
  if (depth < 2) throw std::invalid_argument("h_depth: depth must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("h_depth: alpha must be > 0");
  if (depth == 2) return 2.0 * alpha * alpha * std::sinh(-4.0 * c);
  const double bound = h_depth_domain_bound(depth, alpha);
  if (!(std::abs(c) < bound)) {
    std::ostringstream msg;
    msg << "h_depth: |c| = " << std::abs(c)
        << " outside the open domain (-" << bound << ", " << bound
        << ") = alpha^(2-D)/(D(D-2))";
    throw DomainError(msg.str());
  }
  const double D = static_cast<double>(depth);
  const double gamma = D * (D - 2.0) * std::pow(alpha, D - 2.0);
  return std::pow(alpha, D) * h_core(gamma * c, depth);
}

double q_depth(double z, int depth) {
  if (depth < 2) throw std::invalid_argument("q_depth: depth must be >= 2");
  if (depth == 2) return q(z);
  if (z == 0.0) return 0.0;
  if (z < 0.0) return q_depth(-z, depth);  // even by the odd symmetry of h̃
  const auto integrand = [depth](double u) {
    return -h_core_inverse(u, depth);
  };
  return quad(integrand, 0.0, z, 1e-10);
}

double r_explicit(double z) {
  z = std::abs(z);  // p_z depends on z through z² only
  if (z == 0.0) return 0.0;
  const double z2 = z * z;
  const auto poly = [z2](double u) {
    return (((u - 6.0) * u + (12.0 - 2.0 * z2)) * u - (8.0 + 10.0 * z2)) * u +
           z2 + z2 * z2;
  };
  // p_z(0) = z²+z⁴ > 0 and the first (continuous-with-zero) root is the only
  // one below 2+|z|; the remaining real root sits beyond the bracket.
  return find_root(poly, 0.0, 2.0 + z, 1e-12);
}

RegimeGaps regime_check(const Matrix& X, const Vector& y, double alpha,
                        int depth) {
  const OracleSolution l1 = min_l1_interpolator(X, y, 1e-9);
  const OracleSolution l2 = min_l2_interpolator(X, y);
  const OracleSolution qsol =
      depth == 2 ? min_Q_alpha_interpolator(X, y, alpha, 1e-10)
                 : min_Q_depth_interpolator(X, y, alpha, depth, 1e-10);
  RegimeGaps gaps;
  gaps.l1_gap = qsol.point.lpNorm<1>() / l1.point.lpNorm<1>() - 1.0;
  gaps.l2_gap = qsol.point.squaredNorm() / l2.point.squaredNorm() - 1.0;
  return gaps;
}

double RegularizerSpec::value(const Vector& beta) const {
  switch (family) {
    case RegularizerFamily::QAlpha:
      return Q_alpha(beta, alpha);
    case RegularizerFamily::QDepth: {
      const double aD = std::pow(alpha, depth);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < beta.size(); ++i) {
        acc += q_depth(beta(i) / aD, depth);
      }
      return acc;
    }
    case RegularizerFamily::RExplicit: {
      const double a2 = alpha * alpha;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < beta.size(); ++i) {
        acc += r_explicit(beta(i) / a2);
      }
      return acc;
    }
    case RegularizerFamily::HypentropyFamily:
      return Potential::Hypentropy(beta.size(), alpha).value(beta);
  }
  throw std::logic_error("unreachable");
}

double RegularizerSpec::scalar_value(double z) const {
  switch (family) {
    case RegularizerFamily::QAlpha:
      return q(z);
    case RegularizerFamily::QDepth:
      return q_depth(z, depth);
    case RegularizerFamily::RExplicit:
      return r_explicit(z);
    case RegularizerFamily::HypentropyFamily: {
      Vector one(1);
      one(0) = z;
      return Potential::Hypentropy(1, alpha).value(one);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace biaslab
