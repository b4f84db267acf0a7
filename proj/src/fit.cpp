#include "starweyl/fit.hpp"

#include <algorithm>
#include <cmath>

namespace starweyl {

EdgeSpec apply_parameters(const FitProblem& problem, const Eigen::VectorXd& theta) {
  if (theta.size() != problem.parameter_count())
    throw Error(Errc::InvalidConfig, "parameter vector length mismatch");
  EdgeSpec edge = problem.edge;
  edge.q.assign(static_cast<size_t>(edge.order - 1), Polynomial{});
  int at = 0;
  for (int mu = 0; mu <= edge.order - 2; ++mu) {
    Polynomial poly;
    poly.coeffs.resize(static_cast<size_t>(problem.degree_cap + 1));
    for (int d = 0; d <= problem.degree_cap; ++d)
      poly.coeffs[static_cast<size_t>(d)] = theta(at++);
    edge.q[static_cast<size_t>(mu)] = std::move(poly);
  }
  return edge;
}

ResidualEval fit_residual(const FitProblem& problem, const Eigen::VectorXd& theta) {
  if (!theta.allFinite()) throw Error(Errc::InvalidConfig, "parameters must be finite");
  const int n = problem.edge.order;
  const int upper = n * (n - 1) / 2;
  const size_t samples = problem.grid.size();
  if (problem.targets.size() != samples)
    throw Error(Errc::InvalidConfig, "one target matrix per grid point required");

  const EdgeSpec edge = apply_parameters(problem, theta);
  const EdgeBasisEvaluator eval(edge, 0, problem.basis_opts);

  ResidualEval out;
  out.r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * upper * samples));
  for (size_t i = 0; i < samples; ++i) {
    double weight = problem.weights.empty() ? 1.0 : problem.weights[i];
    CMatrix model;
    try {
      model = internal_weyl_matrix(eval, problem.grid[i]).entries;
    } catch (const Error& e) {
      if (e.code() == Errc::SingularMinor || e.code() == Errc::NearEigenvalue) {
        out.dropped.push_back(static_cast<int>(i));
        weight = 0.0;
        model = CMatrix::Zero(n, n);
      } else {
        throw;
      }
    }
    int at = static_cast<int>(2 * upper * i);
    for (int k = 1; k <= n - 1; ++k) {
      for (int nu = k + 1; nu <= n; ++nu) {
        const Cplx diff =
            (weight == 0.0) ? Cplx(0.0)
                            : model(k - 1, nu - 1) - problem.targets[i](k - 1, nu - 1);
        out.r(at++) = weight * diff.real();
        out.r(at++) = weight * diff.imag();
      }
    }
  }
  return out;
}

FitReport fit(const FitProblem& problem, const Eigen::VectorXd& theta0) {
  const FitOptions& o = problem.opts;
  Eigen::VectorXd theta = theta0;
  ResidualEval re = fit_residual(problem, theta);
  double cost = re.r.norm();

  FitReport report;
  report.theta = theta;
  report.residual_norm = cost;
  report.dropped_samples = re.dropped;

  const int m = static_cast<int>(re.r.size());
  const int pdim = problem.parameter_count();
  Eigen::MatrixXd jac(m, pdim);
  double mu_lm = -1.0;

  for (int iter = 1; iter <= o.max_iterations; ++iter) {
    report.iterations = iter;
    if (cost <= o.tol_abs) {
      report.converged = true;
      break;
    }

    for (int c = 0; c < pdim; ++c) {
      const double h = o.fd_step_rel * std::max(std::abs(theta(c)), 1.0);
      Eigen::VectorXd probe = theta;
      probe(c) += h;
      jac.col(c) = (fit_residual(problem, probe).r - re.r) / h;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * re.r;
    if (mu_lm < 0.0) mu_lm = 1e-3 * jtj.diagonal().maxCoeff();

    bool stepped = false;
    for (int tries = 0; tries < 50; ++tries) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += mu_lm * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
      const Eigen::VectorXd candidate = theta + delta;
      const ResidualEval re_new = fit_residual(problem, candidate);
      const double cost_new = re_new.r.norm();
      if (cost_new < cost) {
        theta = candidate;
        re = re_new;
        cost = cost_new;
        report.theta = theta;
        report.residual_norm = cost;
        report.dropped_samples = re.dropped;
        mu_lm = std::max(mu_lm / 3.0, 1e-16);
        stepped = true;
        if (delta.norm() <= o.tol_step * (theta.norm() + o.tol_step)) {
          report.converged = true;
        }
        break;
      }
      mu_lm *= 2.0;
      if (mu_lm > 1e14) break;
    }
    if (report.converged) break;
    if (!stepped) {
      report.converged = cost <= o.tol_abs;
      break;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& sv = svd.singularValues();
  report.jacobian_condition =
      (sv.size() > 0 && sv(sv.size() - 1) > 0.0) ? sv(0) / sv(sv.size() - 1) : 0.0;
  return report;
}

}  // namespace starweyl
