#pragma once

#include <span>
#include <vector>

#include "starweyl/numerics.hpp"

namespace starweyl {

/// <n> = (|n| + n) / 2: n for n >= 0, 0 otherwise.
inline long bracket(long n) { return n >= 0 ? n : 0; }

/// Polynomial in the real edge coordinate, ascending coefficients.
struct Polynomial {
  std::vector<Cplx> coeffs;

  Cplx eval(double x) const {
    Cplx v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
    return v;
  }
  bool is_zero() const {
    for (const Cplx& c : coeffs)
      if (c != Cplx(0.0)) return false;
    return true;
  }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// One edge of the star: order n >= 2, length l > 0, singular coefficients
/// nu[mu] for mu = 0..n-2 and polynomial potentials q[mu] on the same range.
struct EdgeSpec {
  int order = 2;
  double length = 1.0;
  std::vector<Cplx> nu;        // size order-1
  std::vector<Polynomial> q;   // size order-1 (empty polynomials mean zero)
};

/// Coefficients of the linear forms U_{j nu}(y) = sum_{mu<=nu} gamma[j][nu][mu] y^(mu)(l_j).
struct MatchingForms {
  // gamma[j-1][nu][mu], mu <= nu; empty outer vector means identity forms.
  std::vector<std::vector<std::vector<Cplx>>> gamma;

  bool is_identity() const { return gamma.empty(); }
  Cplx coeff(int j, int nu, int mu) const {
    if (gamma.empty()) return nu == mu ? Cplx(1.0) : Cplx(0.0);
    return gamma[static_cast<size_t>(j - 1)][static_cast<size_t>(nu)][static_cast<size_t>(mu)];
  }
  static MatchingForms identity() { return {}; }
};

struct GraphSpec {
  std::vector<EdgeSpec> edges;  // ordered with non-increasing orders
  MatchingForms matching;
  int omitted_edge = 0;  // 1-based; 0 when no edge is omitted
};

/// Partition of the edges into groups of equal order: omega[i-1] is the order
/// of group i, p[i] the index of its last edge (p[0] = 0, p[m] = edge count).
struct GroupStructure {
  std::vector<int> omega;
  std::vector<int> p;

  int group_count() const { return static_cast<int>(omega.size()); }
  int group_of(int j) const {
    for (int i = 1; i <= group_count(); ++i)
      if (j <= p[static_cast<size_t>(i)]) return i;
    return group_count();
  }
  int order_of_group(int i) const { return omega[static_cast<size_t>(i - 1)]; }
};

/// Value and derivatives 0..n-1 of a solution at one point of one edge.
struct SolutionJet {
  int edge = 0;
  double x = 0.0;
  Cplx lambda;
  std::vector<Cplx> d;

  Cplx operator[](int nu) const { return d[static_cast<size_t>(nu)]; }
};

class ValidatedGraph {
 public:
  ValidatedGraph(GraphSpec spec, GroupStructure groups, std::vector<int> permutation)
      : spec_(std::move(spec)), groups_(std::move(groups)), permutation_(std::move(permutation)) {}

  const GraphSpec& spec() const { return spec_; }
  int edge_count() const { return static_cast<int>(spec_.edges.size()); }
  const EdgeSpec& edge(int j) const { return spec_.edges[static_cast<size_t>(j - 1)]; }
  const MatchingForms& matching() const { return spec_.matching; }
  const GroupStructure& groups() const { return groups_; }
  int omitted_edge() const { return spec_.omitted_edge; }
  int max_order() const { return spec_.edges.front().order; }
  /// position i holds the ingestion index now stored at edge i+1
  const std::vector<int>& ingest_permutation() const { return permutation_; }

 private:
  GraphSpec spec_;
  GroupStructure groups_;
  std::vector<int> permutation_;
};

/// Structural validation: p >= 2, non-increasing orders, positive lengths,
/// nonzero gamma diagonals, omitted edge last in its order group. Exponent
/// admissibility is deferred to the Frobenius stage.
ValidatedGraph validate(GraphSpec spec);

/// Swap the omitted edge with the last edge of its order group; returns the
/// permutation (position i holds the original index of the edge now at i+1).
std::vector<int> normalize_omitted_edge(GraphSpec& spec);

/// U_{j nu} applied to a jet taken at x = l_j.
Cplx apply_form(const ValidatedGraph& graph, int j, int nu, const SolutionJet& jet);

/// Recover jet entries d_0..d_V from U values for nu = 0..V by triangular
/// inversion (valid because the gamma diagonals are nonzero).
std::vector<Cplx> invert_forms(const ValidatedGraph& graph, int j, std::span<const Cplx> u_values);

/// Admissible reference edges for the inverse reduction with omitted edge w:
/// 1..p_1 when w lies in a later group, 1..p_1-1 when w lies in the first.
std::vector<int> admissible_reference_edges(const ValidatedGraph& graph, int w);

}  // namespace starweyl
