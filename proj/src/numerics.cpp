#include "starweyl/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace starweyl {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::MagnitudeOverflow: return "MagnitudeOverflow";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::UnsortedOrders: return "UnsortedOrders";
    case Errc::ZeroGammaDiagonal: return "ZeroGammaDiagonal";
    case Errc::JetAtWrongPoint: return "JetAtWrongPoint";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ResonantExponents: return "ResonantExponents";
    case Errc::EqualRealParts: return "EqualRealParts";
    case Errc::IntegerCollision: return "IntegerCollision";
    case Errc::SectorBoundary: return "SectorBoundary";
    case Errc::SeriesCapExceeded: return "SeriesCapExceeded";
    case Errc::CutPointTooLarge: return "CutPointTooLarge";
    case Errc::PotentialNotIntegrable: return "PotentialNotIntegrable";
    case Errc::NearEigenvalue: return "NearEigenvalue";
    case Errc::SingularMinor: return "SingularMinor";
    case Errc::BoundaryZero: return "BoundaryZero";
    case Errc::CountOverflow: return "CountOverflow";
    case Errc::MatrixEvaluatorFailure: return "MatrixEvaluatorFailure";
    case Errc::SingularSigma: return "SingularSigma";
    case Errc::VanishingDenominator: return "VanishingDenominator";
    case Errc::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

namespace {

Cplx poly_eval(const std::vector<Cplx>& c, Cplx z) {
  Cplx v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

Cplx poly_eval_deriv(const std::vector<Cplx>& c, Cplx z) {
  Cplx v = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 1; --i)
    v = v * z + static_cast<double>(i) * c[i];
  return v;
}

double poly_scale_at(const std::vector<Cplx>& c, Cplx z) {
  double s = 0.0, zp = 1.0, az = std::abs(z);
  for (const Cplx& ci : c) {
    s += std::abs(ci) * zp;
    zp *= az;
  }
  return s;
}

}  // namespace

std::vector<Cplx> poly_roots(const std::vector<Cplx>& coeffs, double tol) {
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 1)
    throw Error(Errc::DegenerateLeadingCoefficient, "polynomial degree must be >= 1");
  if (std::abs(coeffs.back()) == 0.0)
    throw Error(Errc::DegenerateLeadingCoefficient, "leading coefficient is zero");

  CMatrix companion = CMatrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i)
    companion(i, degree - 1) = -coeffs[i] / coeffs[degree];

  Eigen::ComplexEigenSolver<CMatrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::NonConvergence, "companion eigenvalue iteration failed");

  std::vector<Cplx> roots(degree);
  for (int i = 0; i < degree; ++i) {
    Cplx r = solver.eigenvalues()(i);
    for (int it = 0; it < 6; ++it) {
      Cplx p = poly_eval(coeffs, r);
      Cplx dp = poly_eval_deriv(coeffs, r);
      if (std::abs(dp) == 0.0) break;
      Cplx next = r - p / dp;
      if (std::abs(poly_eval(coeffs, next)) < std::abs(p))
        r = next;
      else
        break;
    }
    roots[i] = r;
  }

  for (const Cplx& r : roots) {
    if (std::abs(poly_eval(coeffs, r)) > tol * poly_scale_at(coeffs, r))
      throw Error(Errc::NonConvergence, "root residual above tolerance");
  }

  std::sort(roots.begin(), roots.end(), [](const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

DenseSolve solve_dense(const CMatrix& A, const CVector& b) {
  if (A.rows() != A.cols())
    throw Error(Errc::InvalidConfig, "solve_dense requires a square matrix");
  if (A.rows() != b.size())
    throw Error(Errc::InvalidConfig, "solve_dense dimension mismatch");

  Eigen::PartialPivLU<CMatrix> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  double max_pivot = 0.0, min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double p = std::abs(diag(i));
    max_pivot = std::max(max_pivot, p);
    min_pivot = std::min(min_pivot, p);
  }
  if (max_pivot == 0.0 || min_pivot <= 1e-14 * max_pivot)
    throw Error(Errc::SingularSystem, "pivot below threshold");

  DenseSolve out;
  out.x = lu.solve(b);
  const double rc = lu.rcond();
  out.condition = (rc > 0.0) ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kErr[7] = {71.0 / 57600,     0.0,         -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr double kOverflowCap = 1e250;

template <class State>
State rk_dopri(const OdeSystem& sys, State y, double x0, double x1, double rel_tol) {
  if (!(x0 > 0.0) || !(x0 <= x1))
    throw Error(Errc::InvalidConfig, "integration interval must satisfy 0 < x0 <= x1");
  if (!y.allFinite())
    throw Error(Errc::InvalidConfig, "initial value must be finite");
  if (x0 == x1) return y;

  rel_tol = std::max(rel_tol, 1e-15);
  const double span = x1 - x0;
  double x = x0;
  double h = std::min(span, 1e-2 * x0);
  State k[7];
  bool have_k0 = false;

  while (x < x1) {
    if (x + h > x1) h = x1 - x;
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), span))
      throw Error(Errc::StepUnderflow, "step size collapsed during integration");

    if (!have_k0) {
      k[0] = sys.coefficients(x) * y;
      have_k0 = true;
    }
    for (int i = 1; i < 7; ++i) {
      State yi = y;
      for (int j = 0; j < i; ++j)
        if (kA[i][j] != 0.0) yi += (h * kA[i][j]) * k[j];
      k[i] = sys.coefficients(x + kC[i] * h) * yi;
    }
    // stage 7 evaluates at x+h with the 5th-order solution (FSAL)
    State y_new = y;
    for (int j = 0; j < 6; ++j)
      if (kA[6][j] != 0.0) y_new += (h * kA[6][j]) * k[j];

    State err_vec = (h * kErr[0]) * k[0];
    for (int j = 1; j < 7; ++j)
      if (kErr[j] != 0.0) err_vec += (h * kErr[j]) * k[j];

    const double y_norm = std::max(y.cwiseAbs().maxCoeff(), y_new.cwiseAbs().maxCoeff());
    const double sc = rel_tol * std::max(y_norm, 1e-290);
    const double err = err_vec.cwiseAbs().maxCoeff() / sc;

    if (err <= 1.0 || h <= 32.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      x += h;
      y = y_new;
      k[0] = k[6];  // FSAL
      if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kOverflowCap)
        throw Error(Errc::MagnitudeOverflow, "solution norm exceeded 1e250");
    } else {
      have_k0 = true;  // k[0] still valid at unchanged x
    }
    const double factor =
        (err > 0.0) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
  }
  return y;
}

}  // namespace

CVector integrate_linear_ode(const OdeSystem& sys, const CVector& y0, double x0,
                             double x1, double rel_tol) {
  return rk_dopri<CVector>(sys, y0, x0, x1, rel_tol);
}

CMatrix integrate_linear_ode(const OdeSystem& sys, const CMatrix& Y0, double x0,
                             double x1, double rel_tol) {
  return rk_dopri<CMatrix>(sys, Y0, x0, x1, rel_tol);
}

}  // namespace starweyl
