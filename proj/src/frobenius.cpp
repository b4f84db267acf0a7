#include "starweyl/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace starweyl {

namespace {

constexpr int kSeriesCap = 200;

// ascending coefficients of (xi)_mu
std::vector<Cplx> falling_coeffs(int mu) {
  std::vector<Cplx> c{1.0};
  for (int i = 0; i < mu; ++i) {
    std::vector<Cplx> next(c.size() + 1, Cplx(0.0));
    for (size_t d = 0; d < c.size(); ++d) {
      next[d + 1] += c[d];
      next[d] -= static_cast<double>(i) * c[d];
    }
    c = std::move(next);
  }
  return c;
}

}  // namespace

std::vector<Cplx> characteristic_poly(const EdgeSpec& edge) {
  const int n = edge.order;
  std::vector<Cplx> delta = falling_coeffs(n);
  for (int mu = 0; mu <= n - 2; ++mu) {
    const Cplx nu = edge.nu[static_cast<size_t>(mu)];
    if (nu == Cplx(0.0)) continue;
    const std::vector<Cplx> ff = falling_coeffs(mu);
    for (size_t d = 0; d < ff.size(); ++d) delta[d] += nu * ff[d];
  }
  return delta;
}

FrobeniusBasis FrobeniusBasis::build(const EdgeSpec& edge, int edge_index,
                                     double admissibility_tol) {
  FrobeniusBasis b;
  b.n_ = edge.order;
  b.edge_index_ = edge_index;
  b.delta_ = characteristic_poly(edge);
  b.xi_ = poly_roots(b.delta_);

  const int n = b.n_;
  const double tol = admissibility_tol;
  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(b.xi_[static_cast<size_t>(k)].real() -
                 b.xi_[static_cast<size_t>(k + 1)].real()) < tol)
      throw Error(Errc::EqualRealParts,
                  "edge " + std::to_string(edge_index) + ": exponents share a real part");
  }
  for (int k = 0; k < n; ++k) {
    for (int m = k + 1; m < n; ++m) {
      const Cplx diff = b.xi_[static_cast<size_t>(m)] - b.xi_[static_cast<size_t>(k)];
      if (std::abs(diff.imag()) < tol) {
        const double s = std::round(diff.real() / n);
        if (std::abs(diff.real() - s * n) < tol)
          throw Error(Errc::ResonantExponents,
                      "edge " + std::to_string(edge_index) +
                          ": exponent difference is a multiple of the order");
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i <= n - 3; ++i) {
      if (std::abs(b.xi_[static_cast<size_t>(k)] - static_cast<double>(i)) < tol)
        throw Error(Errc::IntegerCollision,
                    "edge " + std::to_string(edge_index) + ": exponent collides with " +
                        std::to_string(i));
    }
  }

  Cplx vander = 1.0;
  for (int k = 0; k < n; ++k)
    for (int m = k + 1; m < n; ++m)
      vander *= b.xi_[static_cast<size_t>(m)] - b.xi_[static_cast<size_t>(k)];
  b.vandermonde_ = vander;
  b.c0_.assign(static_cast<size_t>(n), Cplx(1.0));
  b.c0_[0] = 1.0 / vander;

  b.theta_ = n - 1 -
             (b.xi_[static_cast<size_t>(n - 1)].real() - b.xi_[0].real());
  return b;
}

Cplx FrobeniusBasis::delta_at(Cplx xi) const {
  Cplx v = 0.0;
  for (auto it = delta_.rbegin(); it != delta_.rend(); ++it) v = v * xi + *it;
  return v;
}

std::vector<Cplx> FrobeniusBasis::series_coefficients(int k, int mu_max) const {
  const Cplx xi = xi_[static_cast<size_t>(k - 1)];
  std::vector<Cplx> c(static_cast<size_t>(mu_max + 1));
  c[0] = c0_[static_cast<size_t>(k - 1)];
  for (int mu = 1; mu <= mu_max; ++mu)
    c[static_cast<size_t>(mu)] =
        c[static_cast<size_t>(mu - 1)] / delta_at(xi + static_cast<double>(mu * n_));
  return c;
}

CMatrix FrobeniusBasis::c_jets(double x, Cplx lambda, int d_max, double tol) const {
  if (!(x > 0.0))
    throw Error(Errc::InvalidConfig, "series solutions are evaluated at x > 0");
  if (d_max < 0) d_max = n_ - 1;

  CMatrix jets = CMatrix::Zero(d_max + 1, n_);
  const Cplx zstep = lambda * std::pow(x, n_);
  const double log_x = std::log(x);

  for (int k = 1; k <= n_; ++k) {
    const Cplx xi = xi_[static_cast<size_t>(k - 1)];
    Cplx base = c0_[static_cast<size_t>(k - 1)] * std::exp(xi * log_x);
    std::vector<Cplx> sum(static_cast<size_t>(d_max + 1), Cplx(0.0));
    std::vector<double> peak(static_cast<size_t>(d_max + 1), 0.0);

    int quiet = 0;
    int mu = 0;
    for (;; ++mu) {
      if (mu > kSeriesCap)
        throw Error(Errc::SeriesCapExceeded, "series did not settle within 200 terms");
      const Cplx a = xi + static_cast<double>(mu * n_);
      bool all_small = true;
      Cplx ff = 1.0;
      double inv_xd = 1.0;
      for (int d = 0; d <= d_max; ++d) {
        const Cplx term = base * ff * inv_xd;
        sum[static_cast<size_t>(d)] += term;
        const double mag = std::abs(term);
        if (!std::isfinite(mag))
          throw Error(Errc::SeriesCapExceeded, "series term left the double range");
        peak[static_cast<size_t>(d)] = std::max(peak[static_cast<size_t>(d)], mag);
        if (mag > tol * peak[static_cast<size_t>(d)]) all_small = false;
        ff *= a - static_cast<double>(d);
        inv_xd /= x;
      }
      quiet = all_small ? quiet + 1 : 0;
      if (quiet >= 2) break;
      base *= zstep / delta_at(xi + static_cast<double>((mu + 1) * n_));
    }
    for (int d = 0; d <= d_max; ++d) jets(d, k - 1) = sum[static_cast<size_t>(d)];
  }
  return jets;
}

SolutionJet FrobeniusBasis::eval_C(int k, double x, Cplx lambda, int d_max,
                                   double tol) const {
  if (d_max < 0) d_max = n_ - 1;
  const CMatrix jets = c_jets(x, lambda, d_max, tol);
  SolutionJet jet;
  jet.edge = edge_index_;
  jet.x = x;
  jet.lambda = lambda;
  jet.d.resize(static_cast<size_t>(d_max + 1));
  for (int d = 0; d <= d_max; ++d) jet.d[static_cast<size_t>(d)] = jets(d, k - 1);
  return jet;
}

Cplx SectorData::root_power(int k, Cplx expo) const {
  const Cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  return std::exp(two_pi_i * expo * (static_cast<double>(eta[static_cast<size_t>(k - 1)]) / n));
}

SectorData FrobeniusBasis::sector_data(Cplx rho) const {
  if (rho == Cplx(0.0))
    throw Error(Errc::InvalidConfig, "sector data requires rho != 0");

  SectorData sd;
  sd.n = n_;
  const double arg = std::arg(rho);
  sd.sector_index =
      std::clamp(static_cast<int>(std::floor(arg * n_ / std::numbers::pi)), -n_, n_ - 1);

  std::vector<int> idx(static_cast<size_t>(n_));
  std::vector<double> key(static_cast<size_t>(n_));
  std::vector<Cplx> eps(static_cast<size_t>(n_));
  for (int e = 0; e < n_; ++e) {
    idx[static_cast<size_t>(e)] = e;
    eps[static_cast<size_t>(e)] =
        std::exp(Cplx(0.0, 2.0 * std::numbers::pi * e / n_));
    key[static_cast<size_t>(e)] = (rho * eps[static_cast<size_t>(e)]).real();
  }
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return key[static_cast<size_t>(a)] < key[static_cast<size_t>(b)]; });
  const double tie_tol = 1e-12 * std::abs(rho);
  for (int i = 0; i + 1 < n_; ++i) {
    if (std::abs(key[static_cast<size_t>(idx[static_cast<size_t>(i)])] -
                 key[static_cast<size_t>(idx[static_cast<size_t>(i + 1)])]) <= tie_tol)
      throw Error(Errc::SectorBoundary, "rho lies on a sector boundary");
  }

  sd.eta.resize(static_cast<size_t>(n_));
  sd.roots.resize(static_cast<size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    sd.eta[static_cast<size_t>(k)] = idx[static_cast<size_t>(k)];
    sd.roots[static_cast<size_t>(k)] = eps[static_cast<size_t>(idx[static_cast<size_t>(k)])];
  }

  sd.omega_det.assign(static_cast<size_t>(n_ + 1), Cplx(1.0));
  sd.omega_ratio.assign(static_cast<size_t>(n_), Cplx(0.0));
  for (int k = 1; k <= n_; ++k) {
    CMatrix m(k, k);
    for (int l = 1; l <= k; ++l)
      for (int mu = 1; mu <= k; ++mu)
        m(l - 1, mu - 1) = sd.root_power(l, xi_[static_cast<size_t>(mu - 1)]);
    const Cplx det = m.determinant();
    if (!std::isfinite(det.real()) || !std::isfinite(det.imag()) || det == Cplx(0.0))
      throw Error(Errc::NonConvergence, "degenerate sector determinant");
    sd.omega_det[static_cast<size_t>(k)] = det;
    sd.omega_ratio[static_cast<size_t>(k - 1)] =
        sd.omega_det[static_cast<size_t>(k - 1)] / det;
  }
  return sd;
}

}  // namespace starweyl
