// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "covdiff/solver_types.hpp"

namespace covdiff {

// Spectrum enclosed by the segment [xi_lo, xi_hi] in the complex plane.
struct ChebyshevConfig {
  std::complex<double> xi_lo{1.0, 0.0};
  std::complex<double> xi_hi{1.0, 0.0};
  StopRule stop{};
  // Abort when the relative residual exceeds this.
  double divergence_limit = 1e8;
  // In fixed mode, also form the final residual (one more operator apply).
  bool final_residual = false;

  std::complex<double> center() const { return 0.5 * (xi_lo + xi_hi); }
  std::complex<double> half_width() const { return 0.5 * (xi_hi - xi_lo); }
};

// Chebyshev semi-iteration from a zero initial guess.
//
// The error after p steps is T_p((c - M)/d) / T_p(c/d) applied to the initial
// error, with c, d the segment centre and half-width. The three-term form
// below carries the true residual b - M x, so each step after the first costs
// one application of `op` and, when given, one of `prec`. In fixed mode the
// residual after the last step is skipped unless cfg.final_residual is set.
//
// Op:   void(const Vec& in, Vec& out), out = M in
// Prec: void(const Vec& r, Vec& z),    z ~ M^{-1} r
// Obs:  void(int k, const Vec& x_k), called after each update of x
template <class Vec, class Op, class Prec, class Obs>
SolveTrace chebyshev_solve_observed(const Op& op, const Vec& b, Vec& x,
                                    const ChebyshevConfig& cfg, const Prec& prec,
                                    const Obs& observe) {
  using S = typename Vec::Scalar;
  SolveTrace trace;
  x = Vec::Zero(b.rows(), b.cols());
  trace.residuals.push_back(1.0);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    trace.converged = true;
    return trace;
  }
  if (cfg.stop.max_iterations <= 0) return trace;

  const std::complex<double> c = cfg.center();
  const std::complex<double> d = cfg.half_width();
  if (std::abs(c) == 0.0) throw std::invalid_argument("Chebyshev segment passes through 0");
  const bool single_point = std::abs(d) == 0.0;

  const S theta = detail::scalar_from<S>(c);
  const S sigma1 = single_point ? S(0) : detail::scalar_from<S>(c / d);
  const S delta = single_point ? S(1) : detail::scalar_from<S>(d);
  S rho = single_point ? S(0) : S(1) / sigma1;

  Vec r = b;
  Vec z;
  prec(r, z);
  Vec dir = z / theta;
  Vec mx;

  for (int k = 1; k <= cfg.stop.max_iterations; ++k) {
    x += dir;
    trace.iterations = k;
    observe(k, x);
    const bool last = k == cfg.stop.max_iterations;
    if (cfg.stop.fixed && last && !cfg.final_residual) break;
    op(x, mx);
    r = b - mx;
    const double res = r.norm() / bnorm;
    trace.residuals.push_back(res);
    if (!std::isfinite(res) || res > cfg.divergence_limit)
      throw DivergenceError("Chebyshev iteration diverged at step " + std::to_string(k));
    if (!cfg.stop.fixed && res < cfg.stop.tol) {
      trace.converged = true;
      break;
    }
    if (last) break;
    prec(r, z);
    if (single_point) {
      dir = z / theta;
      continue;
    }
    const S rho_next = S(1) / (S(2) * sigma1 - rho);
    dir = (rho_next * rho) * dir + (S(2) * rho_next / delta) * z;
    rho = rho_next;
  }
  return trace;
}

template <class Vec, class Op, class Prec = IdentityPrecond>
SolveTrace chebyshev_solve(const Op& op, const Vec& b, Vec& x, const ChebyshevConfig& cfg,
                           const Prec& prec = Prec{}) {
  return chebyshev_solve_observed(op, b, x, cfg, prec, [](int, const Vec&) {});
}

struct LinearPolynomial {
  // Omega(mu) = 1 + coefficient * mu
  std::complex<double> coefficient;
  double max_modulus;
};

// Minimax degree-1 residual polynomial on the segment [xi_n, xi_1]:
// Omega(mu) = 1 - mu (|xi_1|/xi_1 + |xi_n|/xi_n) / (|xi_1| + |xi_n|).
LinearPolynomial optimal_linear_polynomial(std::complex<double> xi_n, std::complex<double> xi_1);

// Max modulus of the degree-1 Chebyshev residual polynomial 1 - mu/c on the
// segment, |xi_1 - xi_n| / |xi_1 + xi_n|.
double chebyshev_linear_max_modulus(std::complex<double> xi_n, std::complex<double> xi_1);

// T_p(z) for complex z, via the three-term recurrence.
std::complex<double> chebyshev_t(int p, std::complex<double> z);

}  // namespace covdiff
