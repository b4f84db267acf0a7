#include "starweyl/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace starweyl {

int psi_expansion_start(int order, int k) {
  return static_cast<int>(bracket(order - k - 1)) + 2;
}

std::vector<PsiUnknown> psi_unknowns(const std::vector<int>& orders, int s, int k) {
  const int p = static_cast<int>(orders.size());
  const int ns = orders[static_cast<size_t>(s - 1)];
  std::vector<PsiUnknown> out;
  for (int mu = k + 1; mu <= ns; ++mu) out.push_back({s, mu});
  for (int j = 1; j <= p; ++j) {
    if (j == s) continue;
    const int nj = orders[static_cast<size_t>(j - 1)];
    for (int mu = psi_expansion_start(nj, k); mu <= nj; ++mu) out.push_back({j, mu});
  }
  return out;
}

std::vector<PsiRow> psi_rows(const std::vector<int>& orders, int s, int k) {
  const int p = static_cast<int>(orders.size());
  const int ns = orders[static_cast<size_t>(s - 1)];
  std::vector<PsiRow> out;
  for (int j = 2; j <= p; ++j) {
    const int nj = orders[static_cast<size_t>(j - 1)];
    for (int nu = 0; nu <= k - 1; ++nu)
      if (nj > nu + 1) out.push_back({PsiRowKind::Continuity, j, nu});
  }
  for (int nu = k; nu <= ns - 1; ++nu) out.push_back({PsiRowKind::Kirchhoff, 0, nu});
  return out;
}

Cplx PsiCoefficients::coeff(int j, int mu) const {
  if (j == s && mu == k) return 1.0;
  for (size_t i = 0; i < index.size(); ++i)
    if (index[i].edge == j && index[i].mu == mu) return values(static_cast<Eigen::Index>(i));
  return 0.0;
}

ForwardSolver::ForwardSolver(ValidatedGraph graph, EdgeBasisOptions opts)
    : graph_(std::move(graph)), opts_(opts) {
  for (int j = 1; j <= graph_.edge_count(); ++j)
    evals_.push_back(std::make_unique<EdgeBasisEvaluator>(graph_.edge(j), j, opts_));
}

Cplx ForwardSolver::form_on_jets(int j, int nu, const CMatrix& jets, int col) const {
  Cplx sum = 0.0;
  for (int mu = 0; mu <= nu; ++mu)
    sum += graph_.matching().coeff(j, nu, mu) * jets(mu, col);
  return sum;
}

PsiSystem ForwardSolver::assemble_psi_system(int s, int k, Cplx lambda) const {
  const int p = graph_.edge_count();
  if (s < 1 || s > p) throw Error(Errc::InvalidConfig, "boundary vertex index out of range");
  const int ns = graph_.edge(s).order;
  if (k < 1 || k > ns - 1) throw Error(Errc::InvalidConfig, "solution order k out of range");

  std::vector<int> orders(static_cast<size_t>(p));
  for (int j = 1; j <= p; ++j) orders[static_cast<size_t>(j - 1)] = graph_.edge(j).order;

  PsiSystem sys;
  sys.unknowns = psi_unknowns(orders, s, k);
  sys.rows = psi_rows(orders, s, k);
  const int dim = static_cast<int>(sys.unknowns.size());
  sys.matrix = CMatrix::Zero(dim, dim);
  sys.rhs = CVector::Zero(dim);

  std::vector<const CMatrix*> jets(static_cast<size_t>(p));
  for (int j = 1; j <= p; ++j)
    jets[static_cast<size_t>(j - 1)] = &edge_evaluator(j).at_vertex(lambda).jets;

  auto column_of = [&](int j, int mu) -> int {
    for (size_t i = 0; i < sys.unknowns.size(); ++i)
      if (sys.unknowns[i].edge == j && sys.unknowns[i].mu == mu) return static_cast<int>(i);
    return -1;
  };

  // contribution of edge e with the given sign to row r
  auto add_edge_terms = [&](int r, int e, int nu, double sign) {
    const CMatrix& je = *jets[static_cast<size_t>(e - 1)];
    const int ne = graph_.edge(e).order;
    const int lo = (e == s) ? k + 1 : psi_expansion_start(ne, k);
    for (int mu = lo; mu <= ne; ++mu)
      sys.matrix(r, column_of(e, mu)) += sign * form_on_jets(e, nu, je, mu - 1);
    if (e == s) sys.rhs(r) -= sign * form_on_jets(e, nu, je, k - 1);
  };

  for (int r = 0; r < dim; ++r) {
    const PsiRow& row = sys.rows[static_cast<size_t>(r)];
    if (row.kind == PsiRowKind::Continuity) {
      add_edge_terms(r, 1, row.nu, +1.0);
      add_edge_terms(r, row.j, row.nu, -1.0);
    } else {
      for (int j = 1; j <= p; ++j)
        if (graph_.edge(j).order > row.nu) add_edge_terms(r, j, row.nu, +1.0);
    }
  }
  return sys;
}

PsiCoefficients ForwardSolver::solve_psi(int s, int k, Cplx lambda) const {
  PsiSystem sys = assemble_psi_system(s, k, lambda);
  DenseSolve solved;
  try {
    solved = solve_dense(sys.matrix, sys.rhs);
  } catch (const Error& e) {
    if (e.code() == Errc::SingularSystem)
      throw Error(Errc::NearEigenvalue,
                  "lambda at an eigenvalue of L_{" + std::to_string(s) + "," + std::to_string(k) + "}");
    throw;
  }
  if (solved.condition > 1e12)
    throw Error(Errc::NearEigenvalue,
                "matching system condition " + std::to_string(solved.condition) + " for (s,k)=(" +
                    std::to_string(s) + "," + std::to_string(k) + ")");

  PsiCoefficients out;
  out.s = s;
  out.k = k;
  out.lambda = lambda;
  out.index = std::move(sys.unknowns);
  out.values = std::move(solved.x);
  out.condition = solved.condition;
  return out;
}

WeylMatrixSample ForwardSolver::weyl_matrix_Ms(int s, Cplx lambda) const {
  const int ns = graph_.edge(s).order;
  WeylMatrixSample sample;
  sample.index = s;
  sample.lambda = lambda;
  sample.entries = CMatrix::Identity(ns, ns);
  for (int k = 1; k <= ns - 1; ++k) {
    const PsiCoefficients coeffs = solve_psi(s, k, lambda);
    for (int mu = k + 1; mu <= ns; ++mu)
      sample.entries(k - 1, mu - 1) = coeffs.coeff(s, mu);
  }
  return sample;
}

WeylMatrixSample internal_weyl_matrix(const EdgeBasisEvaluator& eval, Cplx lambda) {
  const int n = eval.edge().order;
  const CMatrix& jets = eval.at_vertex(lambda).jets;

  WeylMatrixSample sample;
  sample.index = eval.edge_index();
  sample.lambda = lambda;
  sample.entries = CMatrix::Identity(n, n);

  for (int k = 1; k <= n - 1; ++k) {
    // phi_k expands in the last k solutions S_{n-k+1}..S_n; the k jet
    // conditions phi^{(nu-1)}(l) = delta_{k nu}, nu = 1..k pin it down.
    CMatrix minor(k, k);
    CVector rhs = CVector::Zero(k);
    rhs(k - 1) = 1.0;
    for (int nu = 1; nu <= k; ++nu)
      for (int c = 0; c < k; ++c) minor(nu - 1, c) = jets(nu - 1, n - k + c);

    DenseSolve solved;
    try {
      solved = solve_dense(minor, rhs);
    } catch (const Error& e) {
      if (e.code() == Errc::SingularSystem)
        throw Error(Errc::SingularMinor,
                    "lambda near an eigenvalue of the interval problem on edge " +
                        std::to_string(eval.edge_index()));
      throw;
    }
    if (solved.condition > 1e12)
      throw Error(Errc::SingularMinor,
                  "jet minor condition " + std::to_string(solved.condition) + " on edge " +
                      std::to_string(eval.edge_index()));

    for (int nu = k + 1; nu <= n; ++nu) {
      Cplx v = 0.0;
      for (int c = 0; c < k; ++c) v += solved.x(c) * jets(nu - 1, n - k + c);
      sample.entries(k - 1, nu - 1) = v;
    }
  }
  return sample;
}

WeylMatrixSample ForwardSolver::weyl_matrix_mj(int j, Cplx lambda) const {
  return internal_weyl_matrix(edge_evaluator(j), lambda);
}

CharacteristicSample ForwardSolver::characteristic_fn(int s, int k, Cplx lambda) const {
  const PsiSystem sys = assemble_psi_system(s, k, lambda);
  Eigen::PartialPivLU<CMatrix> lu(sys.matrix);
  CharacteristicSample out;
  out.s = s;
  out.k = k;
  out.lambda = lambda;
  out.value = lu.determinant();
  const double rc = lu.rcond();
  out.condition = (rc > 0.0) ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

struct BoundaryWalk {
  double total_phase = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  std::vector<double> moduli;
};

template <class F>
void walk_segment(const F& f, Cplx za, Cplx fa, Cplx zb, Cplx fb, int depth, BoundaryWalk& acc) {
  const double dphase = std::arg(fb / fa);
  if (std::abs(dphase) <= std::numbers::pi / 2.0 && depth > 0) {
    acc.total_phase += dphase;
    return;
  }
  if (depth >= 26)
    throw Error(Errc::BoundaryZero, "characteristic function vanishes on the rectangle boundary");
  const Cplx zm = 0.5 * (za + zb);
  const Cplx fm = f(zm);
  acc.min_abs = std::min(acc.min_abs, std::abs(fm));
  acc.moduli.push_back(std::abs(fm));
  walk_segment(f, za, fa, zm, fm, depth + 1, acc);
  walk_segment(f, zm, fm, zb, fb, depth + 1, acc);
}

template <class F>
int winding_number(const F& f, const Rect& r, double zero_floor, double* scale_out) {
  const std::array<Cplx, 4> corners{Cplx(r.re0, r.im0), Cplx(r.re1, r.im0),
                                    Cplx(r.re1, r.im1), Cplx(r.re0, r.im1)};
  constexpr int kPerSide = 8;
  std::vector<Cplx> pts;
  for (int side = 0; side < 4; ++side) {
    const Cplx a = corners[static_cast<size_t>(side)];
    const Cplx b = corners[static_cast<size_t>((side + 1) % 4)];
    for (int i = 0; i < kPerSide; ++i)
      pts.push_back(a + (b - a) * (static_cast<double>(i) / kPerSide));
  }
  BoundaryWalk acc;
  std::vector<Cplx> fv(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    fv[i] = f(pts[i]);
    acc.min_abs = std::min(acc.min_abs, std::abs(fv[i]));
    acc.moduli.push_back(std::abs(fv[i]));
  }
  for (size_t i = 0; i < pts.size(); ++i)
    walk_segment(f, pts[i], fv[i], pts[(i + 1) % pts.size()], fv[(i + 1) % pts.size()], 0, acc);

  if (scale_out) {
    std::vector<double> sorted = acc.moduli;
    std::sort(sorted.begin(), sorted.end());
    *scale_out = sorted[sorted.size() / 2];
  }
  const double floor_here =
      (zero_floor > 0.0) ? zero_floor : 1e-12 * (scale_out ? *scale_out : acc.min_abs);
  if (acc.min_abs <= floor_here)
    throw Error(Errc::BoundaryZero, "characteristic function vanishes on the rectangle boundary");
  const double w = acc.total_phase / (2.0 * std::numbers::pi);
  return static_cast<int>(std::lround(w));
}

template <class F>
Cplx newton_refine(const F& f, Cplx z0) {
  Cplx z = z0;
  for (int it = 0; it < 60; ++it) {
    const double h = 1e-7 * (1.0 + std::abs(z));
    const Cplx fz = f(z);
    const Cplx dfz = (f(z + h) - f(z - h)) / (2.0 * h);
    if (std::abs(dfz) == 0.0) break;
    const Cplx step = fz / dfz;
    z -= step;
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) break;
  }
  return z;
}

template <class F>
void locate_rec(const F& f, const Rect& r, double zero_floor, double boundary_scale,
                int depth, std::vector<EigenvalueHit>& hits) {
  const int w = winding_number(f, r, zero_floor, nullptr);
  if (w == 0) return;

  const Cplx center(0.5 * (r.re0 + r.re1), 0.5 * (r.im0 + r.im1));
  const double diag = std::hypot(r.re1 - r.re0, r.im1 - r.im0);
  const bool tiny = diag <= 1e-6 * (1.0 + std::abs(center));

  if (w == 1 || tiny || depth >= 64) {
    const Cplx z = newton_refine(f, center);
    const double margin = 0.1 * diag + 1e-9;
    const bool inside = z.real() >= r.re0 - margin && z.real() <= r.re1 + margin &&
                        z.imag() >= r.im0 - margin && z.imag() <= r.im1 + margin;
    const double residual = std::abs(f(z));
    if (inside && residual <= 1e-8 * boundary_scale) {
      hits.push_back({z, w, residual});
      return;
    }
    if (tiny || depth >= 64)
      throw Error(Errc::NonConvergence, "zero refinement failed inside a terminal rectangle");
  }

  const bool split_re = (r.re1 - r.re0) >= (r.im1 - r.im0);
  constexpr double kCuts[5] = {0.5, 0.55, 0.45, 0.6, 0.4};
  for (double frac : kCuts) {
    Rect a = r, b = r;
    if (split_re) {
      const double cut = r.re0 + frac * (r.re1 - r.re0);
      a.re1 = cut;
      b.re0 = cut;
    } else {
      const double cut = r.im0 + frac * (r.im1 - r.im0);
      a.im1 = cut;
      b.im0 = cut;
    }
    try {
      std::vector<EigenvalueHit> sub;
      locate_rec(f, a, zero_floor, boundary_scale, depth + 1, sub);
      locate_rec(f, b, zero_floor, boundary_scale, depth + 1, sub);
      for (auto& h : sub) hits.push_back(h);
      return;
    } catch (const Error& e) {
      if (e.code() != Errc::BoundaryZero) throw;
    }
  }
  throw Error(Errc::BoundaryZero, "could not cut the rectangle away from interior zeros");
}

}  // namespace

EigLocateResult ForwardSolver::locate_eigenvalues(int s, int k, const Rect& rect,
                                                  int max_count) const {
  if (!(rect.re0 < rect.re1) || !(rect.im0 < rect.im1))
    throw Error(Errc::InvalidConfig, "rectangle must have positive extent");
  auto f = [&](Cplx z) { return characteristic_fn(s, k, z).value; };

  EigLocateResult out;
  out.total_winding = winding_number(f, rect, 0.0, &out.boundary_scale);
  if (out.total_winding > max_count)
    throw Error(Errc::CountOverflow,
                "winding count " + std::to_string(out.total_winding) + " exceeds the cap");
  if (out.total_winding == 0) return out;

  const double zero_floor = 1e-12 * out.boundary_scale;
  locate_rec(f, rect, zero_floor, out.boundary_scale, 0, out.hits);
  std::sort(out.hits.begin(), out.hits.end(), [](const EigenvalueHit& a, const EigenvalueHit& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

Cplx ForwardSolver::asymptotic_reference(int s, int k, int nu, double x, Cplx rho) const {
  const FrobeniusBasis& basis = edge_evaluator(s).basis();
  const int n = basis.order();
  if (k < 1 || k > n) throw Error(Errc::InvalidConfig, "solution index k out of range");
  const SectorData sd = basis.sector_data(rho);
  const Cplx xi = basis.exponents()[static_cast<size_t>(k - 1)];
  const Cplx rho_pow = std::exp(-xi * std::log(rho));  // principal branch, arg in (-pi, pi]
  const Cplx rk = sd.roots[static_cast<size_t>(k - 1)];
  const Cplx deriv_factor = std::pow(rho, nu) * sd.root_power(k, static_cast<double>(nu));
  return sd.omega_ratio[static_cast<size_t>(k - 1)] * rho_pow * deriv_factor *
         std::exp(rho * rk * x);
}

std::vector<SolutionJet> ForwardSolver::psi_vertex_jets(int s, int k, Cplx lambda) const {
  const PsiCoefficients coeffs = solve_psi(s, k, lambda);
  std::vector<SolutionJet> out;
  for (int j = 1; j <= graph_.edge_count(); ++j) {
    const EdgeSpec& e = graph_.edge(j);
    const CMatrix& jets = edge_evaluator(j).at_vertex(lambda).jets;
    SolutionJet jet;
    jet.edge = j;
    jet.x = e.length;
    jet.lambda = lambda;
    jet.d.assign(static_cast<size_t>(e.order), Cplx(0.0));
    for (int mu = 1; mu <= e.order; ++mu) {
      const Cplx c = coeffs.coeff(j, mu);
      if (c == Cplx(0.0)) continue;
      for (int nu = 0; nu < e.order; ++nu)
        jet.d[static_cast<size_t>(nu)] += c * jets(nu, mu - 1);
    }
    out.push_back(std::move(jet));
  }
  return out;
}

SolutionJet ForwardSolver::psi_jet_at(int s, int k, int j, double x, Cplx lambda) const {
  const PsiCoefficients coeffs = solve_psi(s, k, lambda);
  const EdgeSpec& e = graph_.edge(j);
  const EdgeBasisSample sample = edge_evaluator(j).at(x, lambda);
  SolutionJet jet;
  jet.edge = j;
  jet.x = x;
  jet.lambda = lambda;
  jet.d.assign(static_cast<size_t>(e.order), Cplx(0.0));
  for (int mu = 1; mu <= e.order; ++mu) {
    const Cplx c = coeffs.coeff(j, mu);
    if (c == Cplx(0.0)) continue;
    for (int nu = 0; nu < e.order; ++nu)
      jet.d[static_cast<size_t>(nu)] += c * sample.jets(nu, mu - 1);
  }
  return jet;
}

}  // namespace starweyl
