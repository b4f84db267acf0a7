#pragma once

#include <memory>
#include <vector>

#include "starweyl/edge_basis.hpp"
#include "starweyl/frobenius.hpp"
#include "starweyl/graph.hpp"
#include "starweyl/numerics.hpp"

namespace starweyl {

/// One expansion coefficient M_{s k j mu} of a Weyl-type solution.
struct PsiUnknown {
  int edge = 0;
  int mu = 0;
};

enum class PsiRowKind { Continuity, Kirchhoff };

/// Continuity: U_{1 nu}(psi_1) - U_{j nu}(psi_j) = 0 (edge 1 is the
/// reference). Kirchhoff: sum over edges with n_j > nu of U_{j nu} = 0.
struct PsiRow {
  PsiRowKind kind = PsiRowKind::Continuity;
  int j = 0;  // partner edge of a continuity row; unused for Kirchhoff
  int nu = 0;
};

/// First basis index of the expansion of psi_{s k} on edge j != s:
/// <n_j - k - 1> + 2.
int psi_expansion_start(int order, int k);

/// Unknown layout of the matching system, pure range arithmetic over the
/// order tuple: the block of edge s (mu = k+1..n_s) first, then the other
/// edges in ascending index with mu ascending inside each block.
std::vector<PsiUnknown> psi_unknowns(const std::vector<int>& orders, int s, int k);

/// Equation rows in fixed order: continuity rows (j = 2..p ascending, nu
/// ascending, subject to n_j > nu+1), then Kirchhoff rows nu = k..n_s-1.
std::vector<PsiRow> psi_rows(const std::vector<int>& orders, int s, int k);

struct PsiSystem {
  CMatrix matrix;
  CVector rhs;
  std::vector<PsiUnknown> unknowns;
  std::vector<PsiRow> rows;
};

struct PsiCoefficients {
  int s = 0, k = 0;
  Cplx lambda;
  std::vector<PsiUnknown> index;
  CVector values;
  double condition = 0.0;

  /// Expansion coefficient of S_mu on edge j; 1 for the pinned (s, k) term,
  /// 0 outside the expansion window.
  Cplx coeff(int j, int mu) const;
};

/// Boundary matrix M_s or internal matrix m_j sampled at one lambda;
/// entries(k-1, mu-1) with the unit lower-left structure.
struct WeylMatrixSample {
  int index = 0;
  Cplx lambda;
  CMatrix entries;
};

struct CharacteristicSample {
  int s = 0, k = 0;
  Cplx lambda;
  Cplx value;
  double condition = 0.0;
};

struct Rect {
  double re0 = 0, re1 = 0, im0 = 0, im1 = 0;
};

struct EigenvalueHit {
  Cplx lambda;
  int multiplicity = 1;
  double residual = 0.0;
};

struct EigLocateResult {
  std::vector<EigenvalueHit> hits;
  int total_winding = 0;
  double boundary_scale = 0.0;
};

/// Internal Weyl-type matrix of a single edge: jets at l of the solutions
/// normalized at the internal vertex (unit k x k jet minor) and decaying at
/// the singular endpoint.
WeylMatrixSample internal_weyl_matrix(const EdgeBasisEvaluator& eval, Cplx lambda);

class ForwardSolver {
 public:
  explicit ForwardSolver(ValidatedGraph graph, EdgeBasisOptions opts = {});

  const ValidatedGraph& graph() const { return graph_; }
  const EdgeBasisEvaluator& edge_evaluator(int j) const {
    return *evals_[static_cast<size_t>(j - 1)];
  }

  PsiSystem assemble_psi_system(int s, int k, Cplx lambda) const;
  PsiCoefficients solve_psi(int s, int k, Cplx lambda) const;
  WeylMatrixSample weyl_matrix_Ms(int s, Cplx lambda) const;
  WeylMatrixSample weyl_matrix_mj(int j, Cplx lambda) const;
  CharacteristicSample characteristic_fn(int s, int k, Cplx lambda) const;
  EigLocateResult locate_eigenvalues(int s, int k, const Rect& rect, int max_count) const;

  /// Leading large-|rho| reference omega_{s k} rho^{-xi_{k s}} (rho R_{s k})^nu
  /// exp(rho R_{s k} x) for psi_{s k s}^(nu); rho strictly inside a sector.
  Cplx asymptotic_reference(int s, int k, int nu, double x, Cplx rho) const;

  /// Jets of psi_{s k} on every edge at the internal vertex.
  std::vector<SolutionJet> psi_vertex_jets(int s, int k, Cplx lambda) const;
  /// Jet of psi_{s k} restricted to edge j at an interior point.
  SolutionJet psi_jet_at(int s, int k, int j, double x, Cplx lambda) const;

 private:
  Cplx form_on_jets(int j, int nu, const CMatrix& jets, int col) const;

  ValidatedGraph graph_;
  EdgeBasisOptions opts_;
  std::vector<std::unique_ptr<EdgeBasisEvaluator>> evals_;
};

}  // namespace starweyl
