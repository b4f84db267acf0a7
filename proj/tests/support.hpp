#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "starweyl/graph.hpp"

namespace testsupport {

using starweyl::Cplx;
using starweyl::EdgeSpec;
using starweyl::GraphSpec;
using starweyl::Polynomial;

// Singular coefficients whose characteristic polynomial has the given roots.
// The roots must sum to n(n-1)/2 (the coefficient forced by nu_{n-1} = 0);
// conversion by evaluating g = delta - (xi)_n at 0..n-2 and forward
// substitution in the falling-factorial basis.
inline std::vector<Cplx> nu_from_exponents(int n, const std::vector<Cplx>& roots) {
  std::vector<Cplx> monic{1.0};
  for (const Cplx& r : roots) {
    std::vector<Cplx> next(monic.size() + 1, Cplx(0.0));
    for (size_t i = 0; i < monic.size(); ++i) {
      next[i + 1] += monic[i];
      next[i] -= r * monic[i];
    }
    monic = std::move(next);
  }
  auto eval_monic = [&](double m) {
    Cplx v = 0.0;
    for (auto it = monic.rbegin(); it != monic.rend(); ++it) v = v * m + *it;
    return v;
  };
  auto falling_eval = [](double m, int mu) {
    double v = 1.0;
    for (int i = 0; i < mu; ++i) v *= m - i;
    return v;
  };
  std::vector<Cplx> nu(static_cast<size_t>(n - 1));
  for (int m = 0; m <= n - 2; ++m) {
    Cplx g = eval_monic(m);  // (m)_n = 0 for 0 <= m <= n-1
    for (int mu = 0; mu < m; ++mu) g -= nu[static_cast<size_t>(mu)] * falling_eval(m, mu);
    nu[static_cast<size_t>(m)] = g / falling_eval(m, m);
  }
  return nu;
}

// Base exponent spreads with theta > 0 and no admissibility violations.
inline std::vector<Cplx> base_exponents(int n) {
  switch (n) {
    case 2: return {Cplx(0.25), Cplx(0.75)};
    case 3: return {Cplx(0.2), Cplx(0.9), Cplx(1.9)};
    case 4: return {Cplx(0.3), Cplx(1.1), Cplx(2.0), Cplx(2.6)};
    default: throw std::runtime_error("no base exponents for this order");
  }
}

// Random admissible singular coefficients: jitter the base exponents with a
// zero-sum perturbation, keeping real parts separated.
inline std::vector<Cplx> random_admissible_nu(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  std::vector<Cplx> xi = base_exponents(n);
  double shift_sum = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double d = u(rng);
    xi[static_cast<size_t>(k)] += d;
    shift_sum += d;
  }
  xi[static_cast<size_t>(n - 1)] -= shift_sum;
  return nu_from_exponents(n, xi);
}

inline Polynomial poly(std::initializer_list<double> coeffs) {
  Polynomial p;
  for (double c : coeffs) p.coeffs.push_back(Cplx(c));
  return p;
}

inline Polynomial random_poly(int degree, std::mt19937& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Polynomial p;
  for (int d = 0; d <= degree; ++d) p.coeffs.push_back(Cplx(u(rng)));
  return p;
}

inline EdgeSpec laplace_edge(double length) {  // n = 2, nu_0 = 0
  EdgeSpec e;
  e.order = 2;
  e.length = length;
  e.nu = {Cplx(0.0)};
  e.q.resize(1);
  return e;
}

inline EdgeSpec singular_edge(int n, double length, std::vector<Cplx> nu_override = {}) {
  EdgeSpec e;
  e.order = n;
  e.length = length;
  e.nu = nu_override.empty() ? nu_from_exponents(n, base_exponents(n)) : std::move(nu_override);
  e.q.resize(static_cast<size_t>(n - 1));
  return e;
}

// Two Laplace edges joined at the internal vertex; the workhorse with closed
// forms M_112 = -sqrt(lambda) coth(sqrt(lambda) L), m_j12 = sqrt(lambda)
// coth(sqrt(lambda) l_j).
inline GraphSpec two_edge_laplace(double l1, double l2) {
  GraphSpec g;
  g.edges = {laplace_edge(l1), laplace_edge(l2)};
  return g;
}

inline Cplx coth(Cplx z) { return std::cosh(z) / std::sinh(z); }

inline Cplx closed_form_M112(Cplx lambda, double total_length) {
  const Cplx r = std::sqrt(lambda);
  return -r * coth(r * total_length);
}

inline Cplx closed_form_m12(Cplx lambda, double edge_length) {
  const Cplx r = std::sqrt(lambda);
  return r * coth(r * edge_length);
}

inline double rel_err(Cplx got, Cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testsupport
