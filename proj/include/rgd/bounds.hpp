#pragma once

// Imaginary-time reference states and analytic RGD step-count bounds.
//
//   error bound:  eps <= (5/2) (beta/N) ||H|| (e^{4 beta ||H||} - 1)
//   beta(eps):    beta = ln(4 / (|C0| eps)) / Delta
//   steps bound:  N <= (5/2) xi ln(alpha)/eps alpha^{4 xi},
//                 alpha = 4/(|C0| eps), xi = ||H|| / Delta
//
// Bounds are evaluated in long-double log space so that alpha^{4 xi} can
// overflow a double without losing the log10 of the result.

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "rgd/engine.hpp"
#include "rgd/error.hpp"
#include "rgd/hamiltonian.hpp"

namespace rgd {

struct BoundInputs {
  double beta = 0.0;
  int n_steps = 1;
  double precision = 1.0;  // eps
  double overlap = 1.0;    // C0
  double gap = 1.0;        // Delta
  double h_norm = 1.0;     // ||H||

  double xi() const { return h_norm / gap; }
  double alpha() const { return 4.0 / (std::abs(overlap) * precision); }
};

struct BoundValue {
  double value = 0.0;  // +inf when the bound overflows a double
  double log10 = -std::numeric_limits<double>::infinity();
  bool overflow = false;
};

namespace detail {

inline BoundValue from_log(long double ln_value) {
  BoundValue b;
  b.log10 = double(ln_value / std::log(10.0L));
  if (ln_value > std::log((long double)std::numeric_limits<double>::max())) {
    b.value = std::numeric_limits<double>::infinity();
    b.overflow = true;
  } else {
    b.value = double(std::exp(ln_value));
  }
  return b;
}

}  // namespace detail

inline BoundValue error_bound(double beta, int n_steps, double h_norm) {
  detail::require(beta >= 0.0 && std::isfinite(beta), "error_bound: beta must be >= 0");
  detail::require(n_steps >= 1, "error_bound: N must be >= 1");
  detail::require(h_norm >= 0.0 && std::isfinite(h_norm), "error_bound: ||H|| must be >= 0");
  if (beta == 0.0 || h_norm == 0.0) return {0.0, -std::numeric_limits<double>::infinity(), false};
  const long double b = beta;
  const long double h = h_norm;
  const long double x = 4.0L * b * h;
  // ln(e^x - 1) = x + ln(1 - e^{-x})
  const long double ln_growth = x > 700.0L ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
  const long double ln_value =
      std::log(2.5L) + std::log(b) - std::log((long double)n_steps) + std::log(h) + ln_growth;
  return detail::from_log(ln_value);
}

inline double beta_for_precision(double precision, double overlap, double gap) {
  detail::require(precision > 0.0, "beta_for_precision: eps must be > 0");
  detail::require(overlap != 0.0, "beta_for_precision: C0 must be nonzero");
  detail::require(gap > 0.0, "beta_for_precision: Delta must be > 0");
  return std::log(4.0 / (std::abs(overlap) * precision)) / gap;
}

// Returns the signed value; when ln(alpha) <= 0 (eps >= 4/|C0|) the bound is
// <= 0 and no steps are needed.
inline BoundValue steps_bound(double precision, double overlap, double gap, double h_norm) {
  detail::require(precision > 0.0, "steps_bound: eps must be > 0");
  detail::require(overlap > 0.0 && overlap <= 1.0, "steps_bound: C0 must be in (0, 1]");
  detail::require(gap > 0.0, "steps_bound: Delta must be > 0");
  detail::require(h_norm > 0.0, "steps_bound: ||H|| must be > 0");
  const long double xi = (long double)h_norm / gap;
  const long double ln_alpha = std::log(4.0L / ((long double)overlap * precision));
  if (ln_alpha <= 0.0L) {
    const long double v =
        2.5L * xi * ln_alpha / precision * std::exp(4.0L * xi * ln_alpha);
    BoundValue b;
    b.value = double(v);
    b.log10 = v > 0 ? double(std::log10(v)) : -std::numeric_limits<double>::infinity();
    return b;
  }
  const long double ln_value = std::log(2.5L) + std::log(xi) + std::log(ln_alpha) -
                               std::log((long double)precision) + 4.0L * xi * ln_alpha;
  return detail::from_log(ln_value);
}

// e^{-beta H} psi0 / ||e^{-beta H} psi0||, computed as e^{-beta (H - E0)} in
// the eigenbasis so large beta cannot underflow the ground component.
inline StateVector ite_state(const Hamiltonian& h, double beta, const StateVector& psi0,
                             const SpectralCaps& caps = {}) {
  detail::require(beta >= 0.0 && std::isfinite(beta), "ite_state: beta must be >= 0");
  detail::require_same_dim(h.dim(), psi0.dim(), "ite_state");
  if (beta == 0.0) return psi0;
  if (h.is_diagonal()) {
    if (!spectrum_affordable(h, caps)) throw SizeCapExceeded("ite_state: size cap exceeded");
    const auto& d = h.diagonal();
    const double e0 = *std::min_element(d.begin(), d.end());
    Amplitudes out(psi0.dim());
    for (std::size_t b = 0; b < out.size(); ++b) out[b] = std::exp(-beta * (d[b] - e0)) * psi0[b];
    if (!(StateVector::l2_norm(out) > 1e-300)) throw Error("ite_state: result underflowed");
    return StateVector::normalized(std::move(out));
  }
  const Eigensystem es = eigensystem(h, caps);
  const auto dim = static_cast<Eigen::Index>(h.dim());
  Eigen::VectorXcd v(dim);
  for (Eigen::Index b = 0; b < dim; ++b) v(b) = psi0[std::size_t(b)];
  Eigen::VectorXcd coeffs = es.vectors.adjoint() * v;
  const double e0 = es.values.front();
  for (Eigen::Index k = 0; k < dim; ++k) coeffs(k) *= std::exp(-beta * (es.values[std::size_t(k)] - e0));
  Eigen::VectorXcd out = es.vectors * coeffs;
  if (!(out.norm() > 1e-300)) throw Error("ite_state: result underflowed");
  return StateVector::normalized(Amplitudes(out.data(), out.data() + out.size()));
}

// ||psi(beta) - psi_N|| with psi_N from N exact RGD steps of size beta/N.
inline double ite_vs_rgd_error(const Hamiltonian& h, double beta, int n_steps,
                               const StateVector& psi0, const SpectralCaps& caps = {}) {
  detail::require(n_steps >= 1, "ite_vs_rgd_error: N must be >= 1");
  const StateVector target = ite_state(h, beta, psi0, caps);
  if (beta == 0.0) return 0.0;
  StateVector psi = psi0;
  const double gamma = beta / n_steps;
  for (int k = 0; k < n_steps; ++k) psi = exact_rgd_step(psi, h, gamma);
  double s = 0.0;
  for (std::size_t b = 0; b < psi.dim(); ++b) s += std::norm(target[b] - psi[b]);
  return std::sqrt(s);
}

}  // namespace rgd
