#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "starweyl/errors.hpp"

namespace starweyl {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Roots of a polynomial with complex coefficients, ascending degree
/// (coeffs[i] multiplies x^i). Companion-matrix eigenvalues plus a guarded
/// Newton polish; result sorted by (Re, Im). Each root r satisfies
/// |p(r)| <= tol * sum_i |c_i| |r|^i.
std::vector<Cplx> poly_roots(const std::vector<Cplx>& coeffs, double tol = 1e-9);

struct DenseSolve {
  CVector x;
  double condition;  // 1-norm condition estimate
};

/// Pivoted dense solve A x = b. Throws SingularSystem when a pivot falls
/// below 1e-14 of the largest pivot.
DenseSolve solve_dense(const CMatrix& A, const CVector& b);

/// First-order linear system y' = A(x) y.
struct OdeSystem {
  int dimension;
  std::function<CMatrix(double)> coefficients;
};

/// Adaptive Dormand-Prince 5(4) propagation of y from x0 to x1 (0 < x0 <= x1).
/// Throws MagnitudeOverflow when the running solution exceeds 1e250 and
/// StepUnderflow when the accepted step collapses to rounding level.
CVector integrate_linear_ode(const OdeSystem& sys, const CVector& y0, double x0,
                             double x1, double rel_tol);

/// Same integrator applied to a matrix initial value (columns propagate
/// together under one step-size control).
CMatrix integrate_linear_ode(const OdeSystem& sys, const CMatrix& Y0, double x0,
                             double x1, double rel_tol);

}  // namespace starweyl
