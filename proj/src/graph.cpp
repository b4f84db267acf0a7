#include "starweyl/graph.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace starweyl {

namespace {

GroupStructure compute_groups(const std::vector<EdgeSpec>& edges) {
  GroupStructure g;
  g.p.push_back(0);
  int i = 0;
  const int p = static_cast<int>(edges.size());
  while (i < p) {
    const int order = edges[static_cast<size_t>(i)].order;
    int j = i;
    while (j < p && edges[static_cast<size_t>(j)].order == order) ++j;
    g.omega.push_back(order);
    g.p.push_back(j);
    i = j;
  }
  return g;
}

}  // namespace

std::vector<int> normalize_omitted_edge(GraphSpec& spec) {
  std::vector<int> perm(spec.edges.size());
  std::iota(perm.begin(), perm.end(), 1);
  const int w = spec.omitted_edge;
  if (w <= 0 || w > static_cast<int>(spec.edges.size())) return perm;

  const int order = spec.edges[static_cast<size_t>(w - 1)].order;
  int last = w;
  for (int j = w + 1; j <= static_cast<int>(spec.edges.size()); ++j) {
    if (spec.edges[static_cast<size_t>(j - 1)].order == order) last = j;
  }
  if (last != w) {
    std::swap(spec.edges[static_cast<size_t>(w - 1)], spec.edges[static_cast<size_t>(last - 1)]);
    if (!spec.matching.is_identity())
      std::swap(spec.matching.gamma[static_cast<size_t>(w - 1)],
                spec.matching.gamma[static_cast<size_t>(last - 1)]);
    std::swap(perm[static_cast<size_t>(w - 1)], perm[static_cast<size_t>(last - 1)]);
    spec.omitted_edge = last;
  }
  return perm;
}

ValidatedGraph validate(GraphSpec spec) {
  const int p = static_cast<int>(spec.edges.size());
  if (p < 2) throw Error(Errc::EmptyGraph, "a star graph needs at least two edges");

  for (int j = 1; j <= p; ++j) {
    const EdgeSpec& e = spec.edges[static_cast<size_t>(j - 1)];
    if (e.order < 2)
      throw Error(Errc::InvalidConfig, "edge " + std::to_string(j) + ": order must be >= 2");
    if (!(e.length > 0.0))
      throw Error(Errc::InvalidConfig, "edge " + std::to_string(j) + ": length must be positive");
    if (static_cast<int>(e.nu.size()) != e.order - 1)
      throw Error(Errc::InvalidConfig,
                  "edge " + std::to_string(j) + ": expected " + std::to_string(e.order - 1) +
                      " singular coefficients");
    if (static_cast<int>(e.q.size()) > e.order - 1)
      throw Error(Errc::InvalidConfig,
                  "edge " + std::to_string(j) + ": too many potential components");
    if (j > 1 && e.order > spec.edges[static_cast<size_t>(j - 2)].order)
      throw Error(Errc::UnsortedOrders, "edge orders must be non-increasing");
  }
  // pad missing potential components with zero polynomials
  for (EdgeSpec& e : spec.edges) e.q.resize(static_cast<size_t>(e.order - 1));

  if (!spec.matching.is_identity()) {
    if (static_cast<int>(spec.matching.gamma.size()) != p)
      throw Error(Errc::InvalidConfig, "gamma must list one triangle per edge");
    for (int j = 1; j <= p; ++j) {
      const auto& tri = spec.matching.gamma[static_cast<size_t>(j - 1)];
      const int n = spec.edges[static_cast<size_t>(j - 1)].order;
      if (static_cast<int>(tri.size()) != n)
        throw Error(Errc::InvalidConfig,
                    "edge " + std::to_string(j) + ": gamma needs " + std::to_string(n) + " rows");
      for (int nu = 0; nu < n; ++nu) {
        if (static_cast<int>(tri[static_cast<size_t>(nu)].size()) != nu + 1)
          throw Error(Errc::InvalidConfig,
                      "edge " + std::to_string(j) + ": gamma row " + std::to_string(nu) +
                          " needs " + std::to_string(nu + 1) + " entries");
        if (tri[static_cast<size_t>(nu)][static_cast<size_t>(nu)] == Cplx(0.0))
          throw Error(Errc::ZeroGammaDiagonal,
                      "edge " + std::to_string(j) + ", form " + std::to_string(nu));
      }
    }
  }

  if (spec.omitted_edge < 0 || spec.omitted_edge > p)
    throw Error(Errc::InvalidConfig, "omitted edge index out of range");

  GroupStructure groups = compute_groups(spec.edges);

  if (spec.omitted_edge > 0) {
    const int group = groups.group_of(spec.omitted_edge);
    if (spec.omitted_edge != groups.p[static_cast<size_t>(group)])
      throw Error(Errc::InvalidConfig,
                  "omitted edge must be the last edge of its order group "
                  "(use normalize_omitted_edge or the config loader)");
  }

  std::vector<int> perm(spec.edges.size());
  std::iota(perm.begin(), perm.end(), 1);
  return ValidatedGraph(std::move(spec), std::move(groups), std::move(perm));
}

Cplx apply_form(const ValidatedGraph& graph, int j, int nu, const SolutionJet& jet) {
  const EdgeSpec& e = graph.edge(j);
  if (std::abs(jet.x - e.length) > 1e-12 * std::max(1.0, e.length))
    throw Error(Errc::JetAtWrongPoint, "linear forms act on jets at x = l_j");
  if (nu < 0 || nu >= e.order)
    throw Error(Errc::InvalidConfig, "form index out of range");

  Cplx sum = 0.0;
  for (int mu = 0; mu <= nu; ++mu) sum += graph.matching().coeff(j, nu, mu) * jet[mu];
  return sum;
}

std::vector<Cplx> invert_forms(const ValidatedGraph& graph, int j, std::span<const Cplx> u_values) {
  const EdgeSpec& e = graph.edge(j);
  if (static_cast<int>(u_values.size()) > e.order)
    throw Error(Errc::InvalidConfig, "more U values than derivative orders");

  std::vector<Cplx> d(u_values.size());
  for (size_t nu = 0; nu < u_values.size(); ++nu) {
    Cplx acc = u_values[nu];
    for (size_t mu = 0; mu < nu; ++mu)
      acc -= graph.matching().coeff(j, static_cast<int>(nu), static_cast<int>(mu)) * d[mu];
    d[nu] = acc / graph.matching().coeff(j, static_cast<int>(nu), static_cast<int>(nu));
  }
  return d;
}

std::vector<int> admissible_reference_edges(const ValidatedGraph& graph, int w) {
  if (w < 1 || w > graph.edge_count())
    throw Error(Errc::InvalidConfig, "omitted edge index out of range");
  const GroupStructure& g = graph.groups();
  if (w != g.p[static_cast<size_t>(g.group_of(w))])
    throw Error(Errc::InvalidConfig, "omitted edge must be the last edge of its order group");

  const int group = g.group_of(w);
  const int p1 = g.p[1];
  const int hi = (group > 1) ? p1 : p1 - 1;
  std::vector<int> out;
  for (int s = 1; s <= hi; ++s) out.push_back(s);
  if (out.empty())
    throw Error(Errc::InvalidConfig,
                "no admissible reference edge: the omitted edge is the only one of maximal order");
  return out;
}

}  // namespace starweyl
