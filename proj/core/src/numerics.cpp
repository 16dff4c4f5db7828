#include "biaslab/numerics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "biaslab/errors.hpp"

namespace biaslab {
namespace {

double eval_checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "quad: integrand non-finite at x = " << x;
    throw NumericalError(msg.str());
  }
  return v;
}

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = eval_checked(f, lm);
  const double frm = eval_checked(f, rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double quad(const std::function<double(double)>& f, double a, double b,
            double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quad: tol must be > 0");
  if (a == b) return 0.0;
  if (a > b) return -quad(f, b, a, tol);
  const double fa = eval_checked(f, a);
  const double fb = eval_checked(f, b);
  const double m = 0.5 * (a + b);
  const double fm = eval_checked(f, m);
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be > 0");
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  double fhi = f(hi);
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f(lo)="
        << flo << ", f(hi)=" << fhi << ")";
    throw std::invalid_argument(msg.str());
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    // Secant proposal, bisection fallback when it leaves the bracket.
    double cand = hi - fhi * (hi - lo) / (fhi - flo);
    if (!std::isfinite(cand) || cand <= lo || cand >= hi) {
      cand = 0.5 * (lo + hi);
    }
    x = cand;
    const double fx = f(x);
    if (!std::isfinite(fx)) throw NumericalError("find_root: f non-finite");
    if (std::abs(fx) <= tol) return x;
    if (flo * fx <= 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
      return std::abs(flo) < std::abs(fhi) ? lo : hi;
    }
  }
  return x;
}

Vector least_squares_solve(const Matrix& A, const Vector& b, double ridge) {
  if (A.rows() != b.size()) {
    throw std::invalid_argument("least_squares_solve: dimension mismatch");
  }
  if (ridge < 0.0) {
    throw std::invalid_argument("least_squares_solve: ridge must be >= 0");
  }
  if (ridge > 0.0) {
    const Matrix lhs =
        A.transpose() * A + ridge * Matrix::Identity(A.cols(), A.cols());
    return Eigen::LDLT<Matrix>(lhs).solve(A.transpose() * b);
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  if (A.rows() == A.cols() && cod.rank() < A.cols()) {
    throw NumericalError(
        "least_squares_solve: square system numerically singular; "
        "pass ridge > 0");
  }
  return cod.solve(b);
}

double largest_eigenvalue_sym(const Matrix& S, int iters) {
  if (S.rows() != S.cols()) {
    throw std::invalid_argument("largest_eigenvalue_sym: matrix not square");
  }
  Vector v = Vector::Ones(S.rows());
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = S * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = v.dot(S * v);
  }
  return lambda;
}

}  // namespace biaslab
