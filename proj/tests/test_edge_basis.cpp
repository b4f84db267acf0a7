#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "starweyl/edge_basis.hpp"
#include "support.hpp"

using namespace starweyl;
using namespace testsupport;

TEST_CASE("q = 0 reproduces the series basis") {
  for (int n : {2, 3}) {
    const EdgeSpec edge = singular_edge(n, 1.0);
    const EdgeBasisEvaluator eval(edge, 1);
    const FrobeniusBasis& basis = eval.basis();
    for (double x : {5e-4, 0.3, 1.0}) {
      const Cplx lambda(3.0, 1.0);
      const EdgeBasisSample s = eval.at(x, lambda);
      const CMatrix c = basis.c_jets(x, lambda);
      const double scale = c.cwiseAbs().maxCoeff();
      CHECK((s.jets - c).cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
  }
}

TEST_CASE("constant potential is a spectral shift") {
  // y'' + (nu/x^2 + c) y = lambda y solves the unperturbed problem at lambda - c
  const Cplx c(0.8, 0.0);
  EdgeSpec edge = singular_edge(2, 1.0);
  edge.q[0] = poly({0.8});
  const EdgeBasisEvaluator eval(edge, 1);
  const FrobeniusBasis& basis = eval.basis();

  for (double x : {0.2, 0.7, 1.0}) {
    for (Cplx lambda : {Cplx(4.0, 1.0), Cplx(-2.0, 0.5), Cplx(0.0, 2.0)}) {
      const EdgeBasisSample s = eval.at(x, lambda);
      const CMatrix shifted = basis.c_jets(x, lambda - c);
      for (int k = 0; k < 2; ++k)
        for (int nu = 0; nu < 2; ++nu)
          CHECK(std::abs(s.jets(nu, k) - shifted(nu, k)) <=
                1e-8 * shifted.col(k).cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("vertex sample closed forms on the Laplace edge") {
  const EdgeBasisEvaluator eval(laplace_edge(1.0), 1);
  SUBCASE("lambda = 1: cosh/sinh jets") {
    const EdgeBasisSample s = eval.at_vertex(Cplx(1.0));
    CHECK(rel_err(s.jets(0, 0), std::cosh(1.0)) < 1e-9);
    CHECK(rel_err(s.jets(1, 0), std::sinh(1.0)) < 1e-9);
    CHECK(rel_err(s.jets(0, 1), std::sinh(1.0)) < 1e-9);
    CHECK(rel_err(s.jets(1, 1), std::cosh(1.0)) < 1e-9);
    CHECK(std::abs(s.wronskian - Cplx(1.0)) < 1e-8);
  }
  SUBCASE("lambda = 0: power jets") {
    const EdgeBasisSample s = eval.at_vertex(Cplx(0.0));
    CHECK(std::abs(s.jets(0, 0) - Cplx(1.0)) < 1e-9);  // x^0 at x=1
    CHECK(std::abs(s.jets(1, 0)) < 1e-9);
    CHECK(std::abs(s.jets(0, 1) - Cplx(1.0)) < 1e-9);  // x^1 at x=1
    CHECK(std::abs(s.jets(1, 1) - Cplx(1.0)) < 1e-9);
  }
  SUBCASE("vertex cache returns identical samples") {
    const EdgeBasisSample& a = eval.at_vertex(Cplx(2.0, 1.0));
    const EdgeBasisSample& b = eval.at_vertex(Cplx(2.0, 1.0));
    CHECK(&a == &b);
  }
}

TEST_CASE("wronskian stays one under perturbation") {
  std::mt19937 rng(51);
  SUBCASE("random polynomial potential, n = 3") {
    for (int trial = 0; trial < 4; ++trial) {
      EdgeSpec edge = singular_edge(3, 0.9);
      edge.q[0] = random_poly(2, rng);
      edge.q[1] = random_poly(1, rng, 0.3);
      const EdgeBasisEvaluator eval(edge, 1);
      for (Cplx lambda : {Cplx(2.0, 1.0), Cplx(-4.0, 1.0)}) {
        const EdgeBasisSample s = eval.at(0.9, lambda);
        CHECK(std::abs(s.wronskian - Cplx(1.0)) < 1e-7);
      }
    }
  }
  SUBCASE("determinant scales linearly in a row") {
    const EdgeBasisEvaluator eval(laplace_edge(1.0), 1);
    EdgeBasisSample s = eval.at(1.0, Cplx(1.5, 0.5));
    s.jets.col(0) *= 2.0;
    CHECK(std::abs(wronskian(s) - 2.0 * s.wronskian) < 1e-8);
  }
}

TEST_CASE("growth stays within the singular-endpoint envelope") {
  // |S_k^(nu)(x)| <= C |x^{xi_k - nu}| for |rho| x <= 1: the scaled ratio must
  // stay bounded as x -> 0
  EdgeSpec edge = singular_edge(2, 1.0);
  edge.q[0] = poly({0.2, -0.1});
  const EdgeBasisEvaluator eval(edge, 1);
  const auto& xi = eval.basis().exponents();
  const Cplx lambda(9.0, 0.0);  // rho = 3, so x <= 1/3

  for (int k = 0; k < 2; ++k) {
    for (int nu = 0; nu < 2; ++nu) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (double x : {0.02, 0.05, 0.1, 0.2, 0.33}) {
        const EdgeBasisSample s = eval.at(x, lambda);
        const double ratio =
            std::abs(s.jets(nu, k)) / std::pow(x, xi[static_cast<size_t>(k)].real() - nu);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      CHECK(hi <= 50.0 * std::max(lo, 1e-12));
    }
  }
}

TEST_CASE("jets are derivative-consistent along the edge") {
  std::mt19937 rng(53);
  EdgeSpec edge = singular_edge(3, 1.0);
  edge.q[0] = random_poly(2, rng);
  edge.q[1] = random_poly(1, rng, 0.3);
  const EdgeBasisEvaluator eval(edge, 1);
  const Cplx lambda(5.0, 1.0);
  const double h = 1e-4;

  for (double x : {0.4, 0.8}) {
    const CMatrix mid = eval.at(x, lambda).jets;
    const CMatrix hij = eval.at(x + h, lambda).jets;
    const CMatrix loj = eval.at(x - h, lambda).jets;
    const double scale = mid.cwiseAbs().maxCoeff();
    for (int k = 0; k < 3; ++k) {
      for (int nu = 0; nu + 1 < 3; ++nu) {
        const Cplx fd = (hij(nu, k) - loj(nu, k)) / (2.0 * h);
        CHECK(std::abs(fd - mid(nu + 1, k)) < 1e-6 * scale);
      }
      // top derivative from the companion row
      const Cplx fd_top = (hij(2, k) - loj(2, k)) / (2.0 * h);
      const Cplx rhs = (eval.companion_matrix(x, lambda) * mid)(2, k);
      CHECK(std::abs(fd_top - rhs) < 1e-6 * scale * (1.0 + std::abs(lambda)));
    }
  }
}

TEST_CASE("samples reproduce the discrete mean over a lambda circle") {
  std::mt19937 rng(57);
  EdgeSpec edge = singular_edge(2, 1.0);
  edge.q[0] = random_poly(2, rng);
  const EdgeBasisEvaluator eval(edge, 1);

  const Cplx center(3.0, 1.0);
  const double radius = 0.3;
  const int m = 24;
  CMatrix mean = CMatrix::Zero(2, 2);
  for (int i = 0; i < m; ++i) {
    const Cplx lambda = center + std::polar(radius, 2.0 * std::numbers::pi * i / m);
    mean += eval.at(0.8, lambda).jets;
  }
  mean /= static_cast<double>(m);
  const CMatrix direct = eval.at(0.8, center).jets;
  CHECK((mean - direct).cwiseAbs().maxCoeff() < 1e-6 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("cut point validation") {
  EdgeSpec edge = singular_edge(2, 1.0);
  edge.q[0] = poly({30.0, 20.0});

  SUBCASE("an absurd cut point fails the Richardson check") {
    EdgeBasisOptions opts;
    opts.cut_rel = 0.45;
    opts.richardson_check = true;
    const EdgeBasisEvaluator eval(edge, 1, opts);
    CHECK_THROWS_WITH_AS(eval.at(1.0, Cplx(2.0, 1.0)), doctest::Contains("cut"), Error);
  }
  SUBCASE("the default cut point passes it") {
    EdgeBasisOptions opts;
    opts.richardson_check = true;
    const EdgeBasisEvaluator eval(edge, 1, opts);
    CHECK_NOTHROW(eval.at(1.0, Cplx(2.0, 1.0)));
  }
}

TEST_CASE("a second Picard correction sharpens the small-x seed") {
  EdgeSpec edge = singular_edge(2, 1.0);
  edge.q[0] = poly({0.8});  // constant potential: exact shift oracle
  const Cplx lambda(4.0, 1.0);
  const double x = 1e-3;  // inside the series region

  double err[3];
  for (int corr = 0; corr <= 2; ++corr) {
    EdgeBasisOptions opts;
    opts.picard_corrections = corr;
    const EdgeBasisEvaluator eval(edge, 1, opts);
    const CMatrix got = eval.at(x, lambda).jets;
    const CMatrix want = eval.basis().c_jets(x, lambda - Cplx(0.8));
    err[corr] = (got - want).cwiseAbs().maxCoeff() / want.cwiseAbs().maxCoeff();
  }
  CHECK(err[1] < 0.1 * err[0]);
  CHECK(err[2] <= err[1] * 1.001);
}
