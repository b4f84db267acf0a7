#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "starweyl/graph.hpp"

using namespace starweyl;

namespace {

EdgeSpec make_edge(int order, double length) {
  EdgeSpec e;
  e.order = order;
  e.length = length;
  e.nu.assign(static_cast<size_t>(order - 1), Cplx(0.0));
  return e;
}

GraphSpec star(const std::vector<int>& orders) {
  GraphSpec g;
  for (int n : orders) g.edges.push_back(make_edge(n, 1.0));
  return g;
}

}  // namespace

TEST_CASE("bracket") {
  CHECK(bracket(3) == 3);
  CHECK(bracket(-2) == 0);
  CHECK(bracket(0) == 0);
}

TEST_CASE("validate computes the group structure") {
  SUBCASE("(3,2,2)") {
    const ValidatedGraph g = validate(star({3, 2, 2}));
    const GroupStructure& gs = g.groups();
    REQUIRE(gs.group_count() == 2);
    CHECK(gs.omega == std::vector<int>{3, 2});
    CHECK(gs.p == std::vector<int>{0, 1, 3});
    CHECK(gs.group_of(1) == 1);
    CHECK(gs.group_of(2) == 2);
    CHECK(gs.group_of(3) == 2);
  }
  SUBCASE("(2,2) single group") {
    const ValidatedGraph g = validate(star({2, 2}));
    CHECK(g.groups().group_count() == 1);
    CHECK(g.groups().omega == std::vector<int>{2});
    CHECK(g.groups().p == std::vector<int>{0, 2});
  }
  SUBCASE("(2,3) violates the sorting") {
    CHECK_THROWS_WITH_AS(validate(star({2, 3})), doctest::Contains("non-increasing"), Error);
  }
  SUBCASE("single edge") {
    CHECK_THROWS_AS(validate(star({2})), Error);
  }
}

TEST_CASE("group structure reconstructs the orders") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 4);
    std::vector<int> orders(static_cast<size_t>(p));
    for (auto& n : orders) n = 2 + static_cast<int>(rng() % 4);
    std::sort(orders.rbegin(), orders.rend());

    const ValidatedGraph g = validate(star(orders));
    const GroupStructure& gs = g.groups();

    int total = 0;
    std::vector<int> rebuilt;
    for (int i = 1; i <= gs.group_count(); ++i) {
      const int count = gs.p[static_cast<size_t>(i)] - gs.p[static_cast<size_t>(i - 1)];
      total += count;
      for (int c = 0; c < count; ++c) rebuilt.push_back(gs.order_of_group(i));
      if (i > 1) CHECK(gs.order_of_group(i) < gs.order_of_group(i - 1));
    }
    CHECK(total == p);
    CHECK(rebuilt == orders);
  }
}

TEST_CASE("gamma validation") {
  GraphSpec g = star({2, 2});
  g.matching.gamma = {
      {{Cplx(1.0)}, {Cplx(0.5), Cplx(2.0)}},
      {{Cplx(1.0)}, {Cplx(0.0), Cplx(0.0)}},
  };
  CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("edge 2"), Error);
  g.matching.gamma[1][1][1] = Cplx(1.0);
  CHECK_NOTHROW(validate(g));
}

TEST_CASE("apply_form") {
  GraphSpec spec = star({2, 2});
  SUBCASE("identity forms pick out derivatives") {
    const ValidatedGraph g = validate(spec);
    SolutionJet jet{1, 1.0, Cplx(0.0), {Cplx(3.0, 1.0), Cplx(-2.0)}};
    CHECK(apply_form(g, 1, 0, jet) == Cplx(3.0, 1.0));
    CHECK(apply_form(g, 1, 1, jet) == Cplx(-2.0));
  }
  SUBCASE("weighted sum") {
    spec.matching.gamma = {
        {{Cplx(1.0)}, {Cplx(1.0), Cplx(2.0)}},
        {{Cplx(1.0)}, {Cplx(0.0), Cplx(1.0)}},
    };
    const ValidatedGraph g = validate(spec);
    SolutionJet jet{1, 1.0, Cplx(0.0), {Cplx(1.0), Cplx(2.0)}};
    CHECK(apply_form(g, 1, 1, jet) == Cplx(5.0));  // 1*1 + 2*2
  }
  SUBCASE("scaling form") {
    spec.matching.gamma = {
        {{Cplx(4.0)}, {Cplx(0.0), Cplx(1.0)}},
        {{Cplx(1.0)}, {Cplx(0.0), Cplx(1.0)}},
    };
    const ValidatedGraph g = validate(spec);
    SolutionJet jet{1, 1.0, Cplx(0.0), {Cplx(1.5), Cplx(0.0)}};
    CHECK(apply_form(g, 1, 0, jet) == Cplx(6.0));
  }
  SUBCASE("jet at the wrong point") {
    const ValidatedGraph g = validate(spec);
    SolutionJet jet{1, 0.5, Cplx(0.0), {Cplx(1.0), Cplx(0.0)}};
    CHECK_THROWS_WITH_AS(apply_form(g, 1, 0, jet), doctest::Contains("l_j"), Error);
  }
}

TEST_CASE("invert_forms") {
  SUBCASE("identity forms") {
    const ValidatedGraph g = validate(star({3, 2}));
    const std::vector<Cplx> u{Cplx(1.0), Cplx(2.0), Cplx(3.0)};
    CHECK(invert_forms(g, 1, u) == u);
  }
  SUBCASE("inverse of the forward example") {
    GraphSpec spec = star({2, 2});
    spec.matching.gamma = {
        {{Cplx(1.0)}, {Cplx(1.0), Cplx(2.0)}},
        {{Cplx(1.0)}, {Cplx(0.0), Cplx(1.0)}},
    };
    const ValidatedGraph g = validate(spec);
    const std::vector<Cplx> u{Cplx(1.0), Cplx(5.0)};
    const auto d = invert_forms(g, 1, u);
    CHECK(std::abs(d[0] - Cplx(1.0)) < 1e-15);
    CHECK(std::abs(d[1] - Cplx(2.0)) < 1e-15);
  }
}

TEST_CASE("apply_form and invert_forms round-trip random data") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    GraphSpec spec = star({n, n});
    spec.matching.gamma.resize(2);
    for (auto& tri : spec.matching.gamma) {
      tri.resize(static_cast<size_t>(n));
      for (int nu = 0; nu < n; ++nu) {
        tri[static_cast<size_t>(nu)].resize(static_cast<size_t>(nu + 1));
        for (int mu = 0; mu <= nu; ++mu)
          tri[static_cast<size_t>(nu)][static_cast<size_t>(mu)] = Cplx(u(rng), u(rng));
        Cplx& diag = tri[static_cast<size_t>(nu)][static_cast<size_t>(nu)];
        diag += Cplx(diag.real() >= 0 ? 1.5 : -1.5, 0.0);
      }
    }
    const ValidatedGraph g = validate(spec);

    SolutionJet jet{1, 1.0, Cplx(0.0), {}};
    jet.d.resize(static_cast<size_t>(n));
    for (auto& v : jet.d) v = Cplx(u(rng), u(rng));

    std::vector<Cplx> uv(static_cast<size_t>(n));
    for (int nu = 0; nu < n; ++nu) uv[static_cast<size_t>(nu)] = apply_form(g, 1, nu, jet);
    const auto back = invert_forms(g, 1, uv);
    for (int nu = 0; nu < n; ++nu)
      CHECK(std::abs(back[static_cast<size_t>(nu)] - jet.d[static_cast<size_t>(nu)]) < 1e-10);
  }
}

TEST_CASE("omitted edge normalization") {
  GraphSpec spec = star({3, 2, 2});
  spec.edges[1].length = 0.7;  // tag the config's edge 2
  spec.omitted_edge = 2;
  const auto perm = normalize_omitted_edge(spec);
  CHECK(spec.omitted_edge == 3);
  CHECK(spec.edges[2].length == 0.7);
  CHECK(perm == std::vector<int>{1, 3, 2});
  CHECK_NOTHROW(validate(spec));

  GraphSpec bad = star({3, 2, 2});
  bad.omitted_edge = 2;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("last edge"), Error);
}

TEST_CASE("admissible reference edges") {
  SUBCASE("omitted edge in a later group frees the whole first group") {
    GraphSpec s = star({3, 3, 2});
    s.omitted_edge = 3;
    const ValidatedGraph g = validate(s);
    CHECK(admissible_reference_edges(g, 3) == std::vector<int>{1, 2});
  }
  SUBCASE("omitted edge inside the first group") {
    GraphSpec s = star({2, 2, 2});
    s.omitted_edge = 3;
    const ValidatedGraph g = validate(s);
    CHECK(admissible_reference_edges(g, 3) == std::vector<int>{1, 2});
  }
  SUBCASE("no admissible reference edge") {
    GraphSpec s = star({3, 2, 2});
    s.omitted_edge = 1;
    const ValidatedGraph g = validate(s);
    CHECK_THROWS_WITH_AS(admissible_reference_edges(g, 1), doctest::Contains("no admissible"),
                         Error);
  }
}
