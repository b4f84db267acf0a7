#pragma once

#include <vector>

#include "starweyl/graph.hpp"
#include "starweyl/numerics.hpp"

namespace starweyl {

/// Per-sector ordering data for the n-th roots of unity: inside an open
/// sector arg rho in (xi pi/n, (xi+1) pi/n) the roots are numbered so that
/// Re(rho R_1) < ... < Re(rho R_n). Powers of R_k follow the fixed convention
/// R_k^mu = exp(2 pi i mu eta_k / n).
struct SectorData {
  int n = 0;
  int sector_index = 0;
  std::vector<int> eta;           // eta[k-1] in {0..n-1}
  std::vector<Cplx> roots;        // R_k ordered per the sector
  std::vector<Cplx> omega_det;    // Omega_0..Omega_n
  std::vector<Cplx> omega_ratio;  // omega_k = Omega_{k-1} / Omega_k, k = 1..n

  Cplx root_power(int k, Cplx expo) const;
};

/// delta_j(xi) = (xi)_n + sum_{mu=0}^{n-2} nu_mu (xi)_mu with (xi)_mu the
/// falling factorial; ascending monomial coefficients, monic of degree n.
std::vector<Cplx> characteristic_poly(const EdgeSpec& edge);

/// Local data of one edge at its regular singular endpoint: exponents
/// (sorted by ascending real part and admissibility-checked), leading
/// coefficients of the unperturbed series solutions, and sector machinery.
class FrobeniusBasis {
 public:
  static FrobeniusBasis build(const EdgeSpec& edge, int edge_index = 0,
                              double admissibility_tol = 1e-9);

  int order() const { return n_; }
  int source_edge() const { return edge_index_; }
  const std::vector<Cplx>& delta_coeffs() const { return delta_; }
  const std::vector<Cplx>& exponents() const { return xi_; }
  const std::vector<Cplx>& leading_coeffs() const { return c0_; }
  double theta() const { return theta_; }
  Cplx vandermonde() const { return vandermonde_; }

  Cplx delta_at(Cplx xi) const;

  /// c_{k mu} = c_{k0} / prod_{s=1}^{mu} delta(xi_k + s n), mu = 0..mu_max.
  std::vector<Cplx> series_coefficients(int k, int mu_max) const;

  /// Jet of the unperturbed solution C_k at x > 0; the series is summed in
  /// z = lambda x^n, truncated when trailing terms fall below tol relative
  /// to the largest term of each derivative's series (cap 200 terms).
  SolutionJet eval_C(int k, double x, Cplx lambda, int d_max = -1,
                     double tol = 1e-14) const;

  /// All k at once: (d_max+1) x n matrix, row nu = derivative order,
  /// column k-1 = solution index.
  CMatrix c_jets(double x, Cplx lambda, int d_max = -1, double tol = 1e-14) const;

  SectorData sector_data(Cplx rho) const;

 private:
  int n_ = 0;
  int edge_index_ = 0;
  std::vector<Cplx> delta_;
  std::vector<Cplx> xi_;
  std::vector<Cplx> c0_;
  Cplx vandermonde_;
  double theta_ = 0.0;
};

}  // namespace starweyl
