#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "starweyl/edge_basis.hpp"
#include "starweyl/graph.hpp"
#include "starweyl/weyl.hpp"

namespace starweyl {

/// Supplies the boundary Weyl matrix M_s(lambda) (full n_s x n_s entries)
/// for the reference edges the reduction runs with.
using MsEvaluator = std::function<CMatrix(int s, Cplx lambda)>;

struct ReductionOptions {
  double sigma_condition_cap = 1e12;
  double denominator_floor = 1e-10;  // relative to the jet scale
};

/// Partial jets psi_{s k j}^(nu)(l_j) accumulated per edge while the
/// reduction walks through its stages; jets[j-1] grows from the propagated
/// range min(k-1, n_j-2) to the full range n_j - 1.
struct VertexJetTable {
  std::vector<std::vector<Cplx>> jets;
};

/// Rebuilds the internal Weyl matrix of the omitted edge w from boundary
/// Weyl matrices of the other edges and solution bases on the known edges.
/// The potential stored on edge w is never consulted (it is cleared on
/// construction).
class Reducer {
 public:
  Reducer(const ValidatedGraph& graph, int w, EdgeBasisOptions basis_opts = {},
          ReductionOptions opts = {});

  const ValidatedGraph& graph() const { return graph_; }
  int omitted() const { return w_; }
  int omitted_order() const { return graph_.edge(w_).order; }
  const std::vector<int>& admissible_s() const { return admissible_; }

  /// Jet of psi_{s k} on the reference edge at l_s, nu = 0..n_s-1.
  std::vector<Cplx> psi_on_edge_s(const CMatrix& ms, int s, int k, Cplx lambda) const;

  /// Continuity conditions carried from the reference edge: every other edge
  /// receives U values for nu = 0..min(k-1, n_j-2) and a partial jet by
  /// triangular inversion.
  VertexJetTable propagate_known_edges(int s, int k, Cplx lambda,
                                       const std::vector<Cplx>& s_jet) const;

  /// Solves the expansion system of edge j (j != s, j != w) for the
  /// coefficients M_{s k j mu} and extends the jet to nu = 0..n_j-1.
  void solve_sigma(int s, int k, int j, Cplx lambda, VertexJetTable& table) const;

  /// Kirchhoff completion: derivatives nu = k..n_w-1 on the omitted edge from
  /// the minus-sum of the known edges, then triangular inversion.
  void kirchhoff_complete(int s, int k, Cplx lambda, VertexJetTable& table) const;

  /// m_w from the jets of psi_{s 1..n_w-1} on edge w via the determinant
  /// ratios; rows nu <= k carry the imposed unit structure.
  CMatrix assemble_m_w(const std::vector<std::vector<Cplx>>& w_jets) const;

  /// Full pipeline for one (s, lambda).
  CMatrix m_w_at(const MsEvaluator& ms, int s, Cplx lambda) const;

 private:
  const EdgeBasisEvaluator& eval(int j) const { return *evals_[static_cast<size_t>(j - 1)]; }

  ValidatedGraph graph_;  // copy with the potential on edge w cleared
  int w_ = 0;
  ReductionOptions opts_;
  std::vector<int> admissible_;
  std::vector<std::unique_ptr<EdgeBasisEvaluator>> evals_;  // null at position w-1
};

struct ReductionRow {
  Cplx lambda;
  bool ok = false;
  std::string skip_reason;
  CMatrix m_w;                      // from the first reference edge that succeeded
  double cross_s_deviation = 0.0;   // max relative entry deviation across reference edges
};

struct ReductionReport {
  int w = 0;
  std::vector<int> s_list;
  std::vector<ReductionRow> rows;
  int skipped = 0;
  double max_cross_s_deviation = 0.0;
};

struct ReductionInput {
  const ValidatedGraph* graph = nullptr;
  int w = 0;
  std::vector<int> s_list;  // empty = all admissible reference edges
  MsEvaluator weyl_matrices;
  std::vector<Cplx> grid;
  EdgeBasisOptions basis_opts;
  ReductionOptions opts;
};

/// Runs the reduction over the grid for every requested reference edge,
/// recording skipped points instead of interpolating across them.
ReductionReport reduce(const ReductionInput& input);

}  // namespace starweyl
