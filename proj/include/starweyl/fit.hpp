#pragma once

#include <vector>

#include "starweyl/edge_basis.hpp"
#include "starweyl/graph.hpp"
#include "starweyl/weyl.hpp"

namespace starweyl {

struct FitOptions {
  double fd_step_rel = 1e-6;
  double tol_abs = 1e-10;
  double tol_step = 1e-10;
  int max_iterations = 100;
};

/// Least-squares recovery of real polynomial potential coefficients on one
/// edge from sampled internal Weyl matrices. Parameter layout: for
/// mu = 0..n-2, degrees 0..degree_cap, concatenated.
struct FitProblem {
  EdgeSpec edge;  // potential entries are replaced by the parameter vector
  int degree_cap = 0;
  std::vector<Cplx> grid;
  std::vector<CMatrix> targets;   // m_w samples, strictly-upper entries compared
  std::vector<double> weights;    // empty = all ones
  EdgeBasisOptions basis_opts;
  FitOptions opts;

  int parameter_count() const { return (edge.order - 1) * (degree_cap + 1); }
};

EdgeSpec apply_parameters(const FitProblem& problem, const Eigen::VectorXd& theta);

struct ResidualEval {
  Eigen::VectorXd r;               // stacked Re/Im over grid x strictly-upper entries
  std::vector<int> dropped;        // grid indices that hit a near-eigenvalue
};

ResidualEval fit_residual(const FitProblem& problem, const Eigen::VectorXd& theta);

struct FitReport {
  Eigen::VectorXd theta;
  double residual_norm = 0.0;
  int iterations = 0;
  double jacobian_condition = 0.0;
  bool converged = false;
  std::vector<int> dropped_samples;
};

/// Levenberg-Marquardt with a forward-difference Jacobian; on iteration-cap
/// exhaustion returns the best parameters found with converged = false.
FitReport fit(const FitProblem& problem, const Eigen::VectorXd& theta0);

}  // namespace starweyl
