#include "starweyl/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace starweyl {

Reducer::Reducer(const ValidatedGraph& graph, int w, EdgeBasisOptions basis_opts,
                 ReductionOptions opts)
    : graph_(graph), w_(w), opts_(opts) {
  admissible_ = admissible_reference_edges(graph_, w_);

  // the reduction must not look at the potential of the omitted edge
  GraphSpec stripped = graph_.spec();
  stripped.edges[static_cast<size_t>(w_ - 1)].q.assign(
      static_cast<size_t>(stripped.edges[static_cast<size_t>(w_ - 1)].order - 1), Polynomial{});
  stripped.omitted_edge = w_;
  graph_ = validate(std::move(stripped));

  for (int j = 1; j <= graph_.edge_count(); ++j) {
    if (j == w_)
      evals_.push_back(nullptr);
    else
      evals_.push_back(std::make_unique<EdgeBasisEvaluator>(graph_.edge(j), j, basis_opts));
  }
}

std::vector<Cplx> Reducer::psi_on_edge_s(const CMatrix& ms, int s, int k, Cplx lambda) const {
  const int ns = graph_.edge(s).order;
  if (ms.rows() != ns || ms.cols() != ns)
    throw Error(Errc::MatrixEvaluatorFailure, "Weyl matrix size does not match the edge order");
  const CMatrix& jets = eval(s).at_vertex(lambda).jets;

  std::vector<Cplx> jet(static_cast<size_t>(ns));
  for (int nu = 0; nu < ns; ++nu) {
    Cplx v = jets(nu, k - 1);
    for (int mu = k + 1; mu <= ns; ++mu) v += ms(k - 1, mu - 1) * jets(nu, mu - 1);
    jet[static_cast<size_t>(nu)] = v;
  }
  return jet;
}

namespace {

SolutionJet as_jet(const ValidatedGraph& g, int j, Cplx lambda, const std::vector<Cplx>& d) {
  SolutionJet jet;
  jet.edge = j;
  jet.x = g.edge(j).length;
  jet.lambda = lambda;
  jet.d = d;
  return jet;
}

}  // namespace

VertexJetTable Reducer::propagate_known_edges(int s, int k, Cplx lambda,
                                              const std::vector<Cplx>& s_jet) const {
  VertexJetTable table;
  table.jets.resize(static_cast<size_t>(graph_.edge_count()));
  table.jets[static_cast<size_t>(s - 1)] = s_jet;

  const SolutionJet sj = as_jet(graph_, s, lambda, s_jet);
  for (int j = 1; j <= graph_.edge_count(); ++j) {
    if (j == s) continue;
    const int nj = graph_.edge(j).order;
    const int v_max = std::min(k - 1, nj - 2);
    std::vector<Cplx> u(static_cast<size_t>(v_max + 1));
    for (int nu = 0; nu <= v_max; ++nu) u[static_cast<size_t>(nu)] = apply_form(graph_, s, nu, sj);
    table.jets[static_cast<size_t>(j - 1)] = invert_forms(graph_, j, u);
  }
  return table;
}

void Reducer::solve_sigma(int /*s*/, int k, int j, Cplx lambda, VertexJetTable& table) const {
  const int nj = graph_.edge(j).order;
  const int lo = std::max(nj - k + 1, 2);
  const int count = nj - lo + 1;  // = min(k, nj - 1)
  auto& jet = table.jets[static_cast<size_t>(j - 1)];
  if (static_cast<int>(jet.size()) != count)
    throw Error(Errc::InvalidConfig, "sigma system expects the propagated jet range");

  const CMatrix& jets = eval(j).at_vertex(lambda).jets;
  CMatrix a(count, count);
  CVector b(count);
  for (int nu = 0; nu < count; ++nu) {
    for (int c = 0; c < count; ++c) a(nu, c) = jets(nu, lo + c - 1);
    b(nu) = jet[static_cast<size_t>(nu)];
  }

  DenseSolve solved;
  try {
    solved = solve_dense(a, b);
  } catch (const Error& e) {
    if (e.code() == Errc::SingularSystem)
      throw Error(Errc::SingularSigma, "sigma system singular on edge " + std::to_string(j));
    throw;
  }
  if (solved.condition > opts_.sigma_condition_cap)
    throw Error(Errc::SingularSigma, "sigma system condition " + std::to_string(solved.condition) +
                                         " on edge " + std::to_string(j));

  jet.assign(static_cast<size_t>(nj), Cplx(0.0));
  for (int nu = 0; nu < nj; ++nu) {
    Cplx v = 0.0;
    for (int c = 0; c < count; ++c) v += solved.x(c) * jets(nu, lo + c - 1);
    jet[static_cast<size_t>(nu)] = v;
  }
}

void Reducer::kirchhoff_complete(int /*s*/, int k, Cplx lambda, VertexJetTable& table) const {
  const int nw = graph_.edge(w_).order;
  auto& w_jet = table.jets[static_cast<size_t>(w_ - 1)];
  if (static_cast<int>(w_jet.size()) < k)
    throw Error(Errc::InvalidConfig, "Kirchhoff completion needs the propagated jet on edge w");

  std::vector<Cplx> u(static_cast<size_t>(nw));
  const SolutionJet partial = as_jet(graph_, w_, lambda, w_jet);
  for (int nu = 0; nu <= k - 1; ++nu) u[static_cast<size_t>(nu)] = apply_form(graph_, w_, nu, partial);

  for (int nu = k; nu <= nw - 1; ++nu) {
    Cplx sum = 0.0;
    for (int j = 1; j <= graph_.edge_count(); ++j) {
      if (j == w_) continue;
      if (graph_.edge(j).order <= nu) continue;
      const SolutionJet jj = as_jet(graph_, j, lambda, table.jets[static_cast<size_t>(j - 1)]);
      sum += apply_form(graph_, j, nu, jj);
    }
    u[static_cast<size_t>(nu)] = -sum;
  }
  w_jet = invert_forms(graph_, w_, u);
}

CMatrix Reducer::assemble_m_w(const std::vector<std::vector<Cplx>>& w_jets) const {
  const int nw = graph_.edge(w_).order;
  if (static_cast<int>(w_jets.size()) != nw - 1)
    throw Error(Errc::InvalidConfig, "assemble_m_w needs jets for k = 1..n_w-1");

  CMatrix m = CMatrix::Identity(nw, nw);

  // k = 1: plain derivative ratios
  {
    const auto& jet = w_jets[0];
    const double scale = [&] {
      double s = 0.0;
      for (const Cplx& v : jet) s = std::max(s, std::abs(v));
      return s;
    }();
    if (std::abs(jet[0]) <= opts_.denominator_floor * std::max(scale, 1e-290))
      throw Error(Errc::VanishingDenominator, "psi_{s1w}(l_w) vanishes at this lambda");
    for (int nu = 2; nu <= nw; ++nu)
      m(0, nu - 1) = jet[static_cast<size_t>(nu - 1)] / jet[0];
  }

  // k >= 2: ratios of k x k jet minors
  for (int k = 2; k <= nw - 1; ++k) {
    CMatrix den(k, k);
    for (int mu = 1; mu <= k; ++mu)
      for (int d = 0; d < k; ++d)
        den(mu - 1, d) = w_jets[static_cast<size_t>(mu - 1)][static_cast<size_t>(d)];
    double hadamard = 1.0;
    for (int mu = 0; mu < k; ++mu) hadamard *= std::max(den.row(mu).cwiseAbs().maxCoeff(), 1e-290);
    const Cplx den_det = den.determinant();
    if (std::abs(den_det) <= opts_.denominator_floor * hadamard * k)
      throw Error(Errc::VanishingDenominator,
                  "jet minor of order " + std::to_string(k) + " vanishes at this lambda");

    for (int nu = k + 1; nu <= nw; ++nu) {
      CMatrix num = den;
      for (int mu = 1; mu <= k; ++mu)
        num(mu - 1, k - 1) = w_jets[static_cast<size_t>(mu - 1)][static_cast<size_t>(nu - 1)];
      m(k - 1, nu - 1) = num.determinant() / den_det;
    }
  }
  return m;
}

CMatrix Reducer::m_w_at(const MsEvaluator& ms_eval, int s, Cplx lambda) const {
  if (std::find(admissible_.begin(), admissible_.end(), s) == admissible_.end())
    throw Error(Errc::InvalidConfig,
                "reference edge " + std::to_string(s) + " is not admissible for this omitted edge");

  CMatrix ms;
  try {
    ms = ms_eval(s, lambda);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::MatrixEvaluatorFailure, e.what());
  }

  const int nw = graph_.edge(w_).order;
  std::vector<std::vector<Cplx>> w_jets;
  for (int k = 1; k <= nw - 1; ++k) {
    const std::vector<Cplx> s_jet = psi_on_edge_s(ms, s, k, lambda);
    VertexJetTable table = propagate_known_edges(s, k, lambda, s_jet);
    for (int j = 1; j <= graph_.edge_count(); ++j) {
      if (j == s || j == w_) continue;
      solve_sigma(s, k, j, lambda, table);
    }
    kirchhoff_complete(s, k, lambda, table);
    w_jets.push_back(table.jets[static_cast<size_t>(w_ - 1)]);
  }
  return assemble_m_w(w_jets);
}

ReductionReport reduce(const ReductionInput& input) {
  if (input.graph == nullptr) throw Error(Errc::InvalidConfig, "reduction needs a graph");
  Reducer reducer(*input.graph, input.w, input.basis_opts, input.opts);

  std::vector<int> s_list = input.s_list;
  if (s_list.empty()) s_list = reducer.admissible_s();

  ReductionReport report;
  report.w = input.w;
  report.s_list = s_list;

  for (const Cplx& lambda : input.grid) {
    ReductionRow row;
    row.lambda = lambda;

    std::vector<CMatrix> per_s;
    std::string reasons;
    for (int s : s_list) {
      try {
        per_s.push_back(reducer.m_w_at(input.weyl_matrices, s, lambda));
      } catch (const Error& e) {
        if (!reasons.empty()) reasons += "; ";
        reasons += "s=" + std::to_string(s) + ": " + e.what();
      }
    }

    if (per_s.empty()) {
      row.ok = false;
      row.skip_reason = reasons;
      ++report.skipped;
    } else {
      row.ok = true;
      row.skip_reason = reasons;
      row.m_w = per_s.front();
      for (size_t a = 0; a + 1 < per_s.size(); ++a) {
        for (size_t b = a + 1; b < per_s.size(); ++b) {
          const double dev = ((per_s[a] - per_s[b]).cwiseAbs().array() /
                              per_s[b].cwiseAbs().array().max(1.0))
                                 .maxCoeff();
          row.cross_s_deviation = std::max(row.cross_s_deviation, dev);
        }
      }
      report.max_cross_s_deviation =
          std::max(report.max_cross_s_deviation, row.cross_s_deviation);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace starweyl
