#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "starweyl/frobenius.hpp"
#include "starweyl/graph.hpp"
#include "starweyl/numerics.hpp"

namespace starweyl {

struct EdgeBasisOptions {
  double cut_rel = 1e-3;      // cut point x0 = cut_rel * l
  int picard_corrections = 1;
  double ode_rel_tol = 1e-10;
  double series_tol = 1e-14;
  double quad_tol = 1e-13;    // absolute tolerance scale of the cut-point correction
  bool richardson_check = false;
};

/// Jets of the full fundamental system S_1..S_n at one point:
/// jets(nu, k-1) = S_k^(nu)(x, lambda).
struct EdgeBasisSample {
  int edge = 0;
  Cplx lambda;
  double x = 0.0;
  CMatrix jets;
  Cplx wronskian;
};

Cplx wronskian(const EdgeBasisSample& sample);

/// Evaluates the fundamental system S_k (entire in lambda, behaving like
/// c_k0 x^xi_k at the singular endpoint) anywhere on one edge: series seed at
/// the cut point, a configurable number of Picard corrections with the cut
/// integral on a graded (power-substituted) mesh, then propagation of the
/// companion system to the target point.
class EdgeBasisEvaluator {
 public:
  EdgeBasisEvaluator(EdgeSpec edge, int edge_index, EdgeBasisOptions opts = {});

  const EdgeSpec& edge() const { return edge_; }
  int edge_index() const { return index_; }
  const FrobeniusBasis& basis() const { return basis_; }
  const EdgeBasisOptions& options() const { return opts_; }

  /// Companion matrix A(x) of the full equation at x > 0.
  CMatrix companion_matrix(double x, Cplx lambda) const;

  EdgeBasisSample at(double x, Cplx lambda) const;
  SolutionJet eval_S(int k, double x, Cplx lambda) const;

  /// Cached sample at the internal vertex x = l (safe for concurrent readers;
  /// values are pure functions of (lambda, options)).
  const EdgeBasisSample& at_vertex(Cplx lambda) const;

 private:
  CMatrix seeded_jets(double x, Cplx lambda, int corrections) const;
  CMatrix picard_integral(double y, Cplx lambda, int inner_depth) const;
  bool has_potential() const { return max_potential_mu_ >= 0; }

  EdgeSpec edge_;
  int index_ = 0;
  EdgeBasisOptions opts_;
  FrobeniusBasis basis_;
  int max_potential_mu_ = -1;  // largest mu with a nonzero q_mu
  int quad_power_ = 1;         // substitution exponent of the graded mesh

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const EdgeBasisSample>> cache_;
};

}  // namespace starweyl
