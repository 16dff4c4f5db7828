#pragma once

#include <functional>

#include "biaslab/types.hpp"

namespace biaslab {

/// Adaptive Simpson quadrature of f over [a, b]; absolute error <= tol.
/// Throws NumericalError naming the abscissa if f returns a non-finite value.
double quad(const std::function<double(double)>& f, double a, double b,
            double tol);

/// Safeguarded secant/bisection root finder on a bracket with
/// f(lo)·f(hi) <= 0. Stops when |f(root)| <= tol.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

/// Minimizes ||Ax-b||² + ridge·||x||². With ridge = 0 a rank-revealing
/// complete orthogonal decomposition is used, so under/over-determined
/// systems return the minimum-norm least-squares solution; a numerically
/// singular square system with ridge = 0 is an error (pass ridge > 0).
Vector least_squares_solve(const Matrix& A, const Vector& b, double ridge = 0.0);

/// Largest eigenvalue of the PSD matrix AᵀA by power iteration.
double largest_eigenvalue_sym(const Matrix& S, int iters = 200);

}  // namespace biaslab
