#include "starweyl/edge_basis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace starweyl {

namespace {

// Gauss-Kronrod 15(7) abscissae and weights on [-1, 1] (positive half).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
  int depth;
};

// Adaptive G7/K15 with a componentwise absolute tolerance matrix. A
// rounding-level floor relative to the panel magnitudes stops refinement that
// double precision cannot honor; the panel budget bounds the total work.
template <class F>
CMatrix adaptive_gk(const F& f, const Eigen::MatrixXd& tol, int rows, int cols) {
  CMatrix total = CMatrix::Zero(rows, cols);
  std::vector<Panel> stack{{0.0, 1.0, 0}};
  int budget = 2000;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double h = 0.5 * (p.b - p.a);
    const double c = 0.5 * (p.a + p.b);

    CMatrix k15 = CMatrix::Zero(rows, cols);
    CMatrix g7 = CMatrix::Zero(rows, cols);
    Eigen::MatrixXd mag = Eigen::MatrixXd::Zero(rows, cols);
    for (int i = 0; i < 8; ++i) {
      CMatrix lo;
      const CMatrix hi = f(c + h * kXgk[i]);
      if (i < 7) lo = f(c - h * kXgk[i]);
      const CMatrix sum = (i < 7) ? CMatrix(hi + lo) : hi;
      k15 += kWgk[i] * sum;
      if (i % 2 == 1) g7 += kWg[i / 2] * sum;
      mag = mag.cwiseMax(sum.cwiseAbs());
    }
    k15 *= h;
    g7 *= h;

    bool ok = true;
    const CMatrix err = k15 - g7;
    for (int r = 0; r < rows && ok; ++r)
      for (int cc = 0; cc < cols && ok; ++cc) {
        const double allowed =
            std::max(tol(r, cc) * (p.b - p.a), 1e-15 * h * mag(r, cc));
        if (std::abs(err(r, cc)) > allowed) ok = false;
      }

    if (ok || p.depth >= 24 || --budget <= 0) {
      total += k15;
    } else {
      stack.push_back({p.a, c, p.depth + 1});
      stack.push_back({c, p.b, p.depth + 1});
    }
  }
  return total;
}

}  // namespace

Cplx wronskian(const EdgeBasisSample& sample) { return sample.jets.determinant(); }

EdgeBasisEvaluator::EdgeBasisEvaluator(EdgeSpec edge, int edge_index, EdgeBasisOptions opts)
    : edge_(std::move(edge)),
      index_(edge_index),
      opts_(opts),
      basis_(FrobeniusBasis::build(edge_, edge_index)) {
  if (!(opts_.cut_rel > 0.0 && opts_.cut_rel < 1.0))
    throw Error(Errc::InvalidConfig, "cut point must satisfy 0 < x0 < l");

  const int n = edge_.order;
  double sigma_min = std::numeric_limits<double>::infinity();
  for (int mu = 0; mu <= n - 2; ++mu) {
    const Polynomial& q = edge_.q[static_cast<size_t>(mu)];
    if (q.is_zero()) continue;
    max_potential_mu_ = mu;
    int vanish = 0;
    while (vanish < static_cast<int>(q.coeffs.size()) &&
           q.coeffs[static_cast<size_t>(vanish)] == Cplx(0.0))
      ++vanish;
    const double sigma = (n - 1 - basis_.exponents().back().real()) +
                         basis_.exponents().front().real() - mu + vanish;
    sigma_min = std::min(sigma_min, sigma);
  }
  if (max_potential_mu_ >= 0) {
    if (sigma_min <= -1.0 + 1e-9)
      throw Error(Errc::PotentialNotIntegrable,
                  "cut integral diverges for this exponent spread / potential combination");
    quad_power_ = std::clamp(static_cast<int>(std::ceil(3.0 / (sigma_min + 1.0))), 1, 16);
  }
}

CMatrix EdgeBasisEvaluator::companion_matrix(double x, Cplx lambda) const {
  const int n = edge_.order;
  CMatrix a = CMatrix::Zero(n, n);
  for (int nu = 0; nu + 1 < n; ++nu) a(nu, nu + 1) = 1.0;
  for (int mu = 0; mu <= n - 2; ++mu) {
    const Cplx coeff = edge_.nu[static_cast<size_t>(mu)] * std::pow(x, mu - n) +
                       edge_.q[static_cast<size_t>(mu)].eval(x);
    a(n - 1, mu) = -coeff;
  }
  a(n - 1, 0) += lambda;
  return a;
}

CMatrix EdgeBasisEvaluator::picard_integral(double y, Cplx lambda, int inner_depth) const {
  const int n = edge_.order;
  const int gamma = quad_power_;

  // componentwise tolerance derived from the scales of Phi_C(y)
  const CMatrix phi_y = basis_.c_jets(y, lambda, n - 1, opts_.series_tol);
  Eigen::MatrixXd tol(n, n);
  for (int i = 0; i < n; ++i) {
    const double phi_col = phi_y.col(i).cwiseAbs().maxCoeff();
    for (int k = 0; k < n; ++k) {
      const double target = opts_.quad_tol * phi_y.col(k).cwiseAbs().maxCoeff();
      tol(i, k) = std::max(target / (n * std::max(phi_col, 1e-290)), 1e-290);
    }
  }

  auto integrand = [&](double u) -> CMatrix {
    if (u <= 0.0) return CMatrix::Zero(n, n);
    const double t = y * std::pow(u, gamma);
    const double jac = gamma * y * std::pow(u, gamma - 1);

    const CMatrix inner = seeded_jets(t, lambda, inner_depth);
    const CMatrix phi_t = (inner_depth == 0)
                              ? inner
                              : basis_.c_jets(t, lambda, n - 1, opts_.series_tol);

    Eigen::PartialPivLU<CMatrix> lu(phi_t);
    CVector en = CVector::Zero(n);
    en(n - 1) = 1.0;
    const CVector w = lu.solve(en);

    Eigen::RowVectorXcd g = Eigen::RowVectorXcd::Zero(n);
    for (int mu = 0; mu <= max_potential_mu_; ++mu) {
      const Polynomial& q = edge_.q[static_cast<size_t>(mu)];
      if (q.is_zero()) continue;
      g += q.eval(t) * inner.row(mu);
    }
    return jac * (w * g);
  };

  return adaptive_gk(integrand, tol, n, n);
}

CMatrix EdgeBasisEvaluator::seeded_jets(double x, Cplx lambda, int corrections) const {
  const int n = edge_.order;
  const CMatrix phi = basis_.c_jets(x, lambda, n - 1, opts_.series_tol);
  if (corrections <= 0 || !has_potential()) return phi;
  const CMatrix integral = picard_integral(x, lambda, corrections - 1);
  return phi - phi * integral;
}

EdgeBasisSample EdgeBasisEvaluator::at(double x, Cplx lambda) const {
  const double l = edge_.length;
  if (!(x > 0.0) || x > l * (1.0 + 1e-12))
    throw Error(Errc::InvalidConfig, "evaluation point must lie in (0, l]");

  const double x0 = opts_.cut_rel * l;
  auto propagate = [&](double cut) -> CMatrix {
    const CMatrix seed = seeded_jets(std::min(cut, x), lambda, opts_.picard_corrections);
    if (x <= cut) return seed;
    OdeSystem sys{edge_.order, [&](double t) { return companion_matrix(t, lambda); }};
    return integrate_linear_ode(sys, seed, cut, x, opts_.ode_rel_tol);
  };

  CMatrix jets = propagate(x0);
  if (opts_.richardson_check && x > x0) {
    const CMatrix jets_half = propagate(0.5 * x0);
    const double diff = (jets - jets_half).cwiseAbs().maxCoeff();
    const double scale = std::max(jets.cwiseAbs().maxCoeff(), 1e-290);
    if (diff > 10.0 * opts_.ode_rel_tol * scale)
      throw Error(Errc::CutPointTooLarge,
                  "halving the cut point moved the result by more than 10x the target tolerance");
  }

  EdgeBasisSample sample;
  sample.edge = index_;
  sample.lambda = lambda;
  sample.x = x;
  sample.jets = std::move(jets);
  sample.wronskian = sample.jets.determinant();
  return sample;
}

SolutionJet EdgeBasisEvaluator::eval_S(int k, double x, Cplx lambda) const {
  const EdgeBasisSample sample = at(x, lambda);
  SolutionJet jet;
  jet.edge = index_;
  jet.x = x;
  jet.lambda = lambda;
  jet.d.resize(static_cast<size_t>(edge_.order));
  for (int nu = 0; nu < edge_.order; ++nu) jet.d[static_cast<size_t>(nu)] = sample.jets(nu, k - 1);
  return jet;
}

const EdgeBasisSample& EdgeBasisEvaluator::at_vertex(Cplx lambda) const {
  const std::pair<double, double> key{lambda.real(), lambda.imag()};
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  auto computed = std::make_shared<const EdgeBasisSample>(at(edge_.length, lambda));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(computed));
  return *it->second;
}

}  // namespace starweyl
