// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace covdiff {

namespace {

// Guards floor() against products like 0.29 * 100 = 28.999999999999996.
int safe_floor(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

}  // namespace

double analytic_eigenvalue(const DiffusionOperator& op, int i, int j) {
  const int nx = op.nx();
  if (i < 1 || i > nx || j < 1 || j > nx)
    throw std::out_of_range("eigenvalue index outside 1..nx");
  const double a = std::sin(i * std::numbers::pi / (2.0 * (nx + 1)));
  const double b = std::sin(j * std::numbers::pi / (2.0 * (nx + 1)));
  return 1.0 + 4.0 * op.coupling() * (a * a + b * b);
}

SpectralBounds extreme_eigenvalues(const DiffusionOperator& op) {
  return {analytic_eigenvalue(op, 1, 1), analytic_eigenvalue(op, op.nx(), op.nx()),
          SpectralBounds::Source::analytic};
}

SpectralBounds user_bounds(double mu_min, double mu_max) {
  if (!(mu_min > 0) || !(mu_max >= mu_min))
    throw std::invalid_argument("need 0 < mu_min <= mu_max");
  return {mu_min, mu_max, SpectralBounds::Source::user};
}

std::vector<cplx> scaled_roots_of_unity(int ell, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  const double r = std::pow(alpha, 1.0 / ell);
  std::vector<cplx> lam(ell);
  for (int j = 0; 2 * j <= ell; ++j) {
    const double t = 2.0 * std::numbers::pi * j / ell;
    lam[j] = cplx(r * std::cos(t), r * std::sin(t));
  }
  for (int j = 1; 2 * j < ell; ++j) lam[ell - j] = std::conj(lam[j]);
  lam[0] = cplx(r, 0.0);
  if (ell % 2 == 0) lam[ell / 2] = cplx(-r, 0.0);
  return lam;
}

Interval outer_spectral_bounds(const SpectralBounds& b, int ell, double alpha) {
  const double p = std::pow(b.mu_min, ell);
  if (!(alpha > 0) || !(alpha < p))
    throw std::invalid_argument("alpha must lie in (0, mu_N^ell)");
  return {1.0, p / (p - alpha)};
}

double convergence_factor_bound(const SpectralBounds& b, cplx lambda) {
  if (!(lambda.real() < b.mu_min)) throw std::invalid_argument("Re(lambda) must be below mu_N");
  const double kappa = (b.mu_max - lambda.real()) / (b.mu_min - lambda.real());
  const double s = std::sqrt(kappa);
  return (s - 1.0) / (s + 1.0);
}

int predicted_iterations(double v_min, double v_max, double eps) {
  if (!(v_min > 0) || !(v_max >= v_min)) throw std::invalid_argument("need 0 < v_min <= v_max");
  if (!(eps > 0) || !(eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (v_min == v_max) return 1;
  const double q = std::sqrt(v_min / v_max);
  const double num = std::log(1.0 / eps + std::sqrt(1.0 / (eps * eps) - 1.0));
  const double den = std::log((1.0 + q) / (1.0 - q));
  return static_cast<int>(std::ceil(num / den));
}

int IterationAllocation::total() const {
  return std::accumulate(per_block.begin(), per_block.end(), 0);
}

IterationAllocation allocate_inner_iterations(int ell, int nx, const SpectralBounds& b,
                                              double alpha, double eta, AllocationKind kind) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (ell < 1 || nx < 1) throw std::invalid_argument("ell and nx must be positive");
  IterationAllocation out;
  out.budget = safe_floor(static_cast<double>(ell) * nx * eta);
  if (kind == AllocationKind::uniform) {
    out.per_block.assign(ell, std::max(1, safe_floor(nx * eta)));
    return out;
  }
  const auto lam = scaled_roots_of_unity(ell, alpha);
  std::vector<double> r(ell);
  const double s1 = convergence_factor_bound(b, lam[0]);
  for (int j = 0; j < ell; ++j) {
    const double sj = convergence_factor_bound(b, lam[j]);
    // sigma = 0 only when mu_N == mu_1; every block then converges in one step.
    r[j] = (s1 > 0 && sj > 0) ? std::log(s1) / std::log(sj) : 1.0;
  }
  const double sum = std::accumulate(r.begin(), r.end(), 0.0);
  out.per_block.resize(ell);
  for (int j = 0; j < ell; ++j)
    out.per_block[j] = std::max(1, safe_floor(r[j] / sum * ell * nx * eta));
  // Conjugate partners share Re(lambda) but may differ in the last bit.
  for (int j = 1; 2 * j < ell; ++j) out.per_block[ell - j] = out.per_block[j];
  return out;
}

double gamma_condition_number(int ell, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const double e = std::abs(std::log(alpha)) * (ell - 1) / ell;
  return std::exp(e);
}

}  // namespace covdiff
