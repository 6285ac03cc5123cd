// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "covdiff/diffusion_operator.hpp"

namespace covdiff {

struct SpectralBounds {
  double mu_min = 1.0;  // mu_N
  double mu_max = 1.0;  // mu_1
  enum class Source { analytic, user } source = Source::analytic;
};

// 1 + (4 nu/h^2)(sin^2(i pi/(2(nx+1))) + sin^2(j pi/(2(nx+1)))), 1 <= i,j <= nx.
double analytic_eigenvalue(const DiffusionOperator& op, int i, int j);

SpectralBounds extreme_eigenvalues(const DiffusionOperator& op);

// Rejects mu_min > mu_max or mu_min <= 0.
SpectralBounds user_bounds(double mu_min, double mu_max);

// lambda_j = alpha^(1/ell) exp(2 pi i (j-1)/ell), j = 1..ell; index 0 holds
// lambda_1. Conjugate partners are bitwise conjugates.
std::vector<cplx> scaled_roots_of_unity(int ell, double alpha);

// Index (0-based) of the conjugate partner of block j (0-based).
inline int conjugate_block(int j, int ell) { return j == 0 ? 0 : ell - j; }

struct Interval {
  double lo;
  double hi;
};

// Foci (1, mu_N^ell / (mu_N^ell - alpha)) of the preconditioned spectrum.
Interval outer_spectral_bounds(const SpectralBounds& b, int ell, double alpha);

// sigma = (sqrt(kappa)-1)/(sqrt(kappa)+1), kappa = (mu_1 - Re l)/(mu_N - Re l).
double convergence_factor_bound(const SpectralBounds& b, cplx lambda);

// ceil of ln(1/eps + sqrt(1/eps^2 - 1)) / ln((1+sqrt(r))/(1-sqrt(r))), r = vmin/vmax.
// Returns 1 when vmin == vmax.
int predicted_iterations(double v_min, double v_max, double eps);

enum class AllocationKind { uniform, weighted };

struct IterationAllocation {
  std::vector<int> per_block;
  int budget = 0;  // floor(ell * nx * eta)
  int total() const;
};

// uniform: floor(nx*eta) per block. weighted: ln(sigma_1)/ln(sigma_j),
// normalised, scaled by ell*nx*eta and floored. Every block gets at least 1.
IterationAllocation allocate_inner_iterations(int ell, int nx, const SpectralBounds& b,
                                              double alpha, double eta,
                                              AllocationKind kind = AllocationKind::weighted);

// 2-norm condition number of U* Gamma_alpha.
double gamma_condition_number(int ell, double alpha);

}  // namespace covdiff
