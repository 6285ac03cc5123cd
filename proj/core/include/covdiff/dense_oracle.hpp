// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covdiff/diffusion_operator.hpp"

namespace covdiff {

// Densely assembled all-at-once system and alpha-circulant preconditioner.
// Sizes are limited to N * ell <= 600.
struct DenseInstance {
  int nx = 0;
  int ell = 0;
  double alpha = 1.0;
  Eigen::MatrixXd A;        // N x N
  Eigen::MatrixXd Acal;     // ell N square, I (x) A - S (x) I with S the lower shift
  Eigen::MatrixXd P;        // I (x) A - C_alpha (x) I
  Eigen::MatrixXd C;        // alpha-circulant: lower shift plus alpha in the corner
  Eigen::VectorXd gamma;    // diagonal of Gamma_alpha, alpha^(k/ell)
  Eigen::MatrixXcd U;       // U(j,k) = exp(2 pi i jk/ell)/sqrt(ell)
  Eigen::VectorXcd lambda;  // scaled roots of unity
};

DenseInstance build_dense_instance(const DiffusionOperator& op, double alpha);

struct OracleReport {
  std::string check;
  bool pass = false;
  double max_deviation = 0.0;
  std::string detail;
};

// Greedy nearest pairing of two multisets after sorting by real part; returns
// the largest pair distance scaled by max(1, |expected|), or +inf on a size mismatch.
double multiset_distance(std::vector<std::complex<double>> got,
                         std::vector<std::complex<double>> expected);

// Eigenvalues of P^{-1} Acal against {1 x (ell-1)N} U {mu^ell/(mu^ell - alpha)},
// plus the extreme values when alpha < mu_N^ell.
OracleReport verify_preconditioned_spectrum(const DenseInstance& inst, double tol = 1e-8);

// Rebuilds P from the scaled DFT factors.
OracleReport verify_factorization(const DenseInstance& inst, double tol = 1e-10);

// Woodbury form of P^{-1} and E_ell^T Acal^{-1} E_1 = A^{-ell}.
OracleReport verify_sherman_morrison(const DenseInstance& inst, double tol = 1e-9);

// Eigenvalue matrix of P^{-1} Acal is numerically full rank.
OracleReport verify_diagonalizable(const DenseInstance& inst);

// Eigenvalues of blockdiag(Phi+Psi, Phi+Psi)^{-1} [Phi Psi; Psi -Phi] satisfy
// 1/sqrt(2) <= |theta| <= 1.
OracleReport verify_saddle_spectrum(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& psi,
                                    double tol = 1e-10);
OracleReport verify_saddle_spectrum(const DiffusionOperator& op, std::complex<double> lambda,
                                    double tol = 1e-10);

// Runs p Chebyshev steps on M x = M x_true and compares the error with
// T_p((c - M)/d) T_p(c/d)^{-1} e_0.
OracleReport verify_chebyshev_polynomial_contract(const Eigen::MatrixXcd& M,
                                                  std::complex<double> xi_lo,
                                                  std::complex<double> xi_hi, int p,
                                                  double tol = 1e-8);

// Dense normal matrix Q diag(eigs) Q^* with a seeded random unitary Q.
Eigen::MatrixXcd random_normal_matrix(const Eigen::VectorXcd& eigs, unsigned seed);

// Full grid nx in {2,3,4} x ell in {4,6} x alpha in {1, 0.1, 0.01}, plus the
// saddle and Chebyshev checks.
std::vector<OracleReport> run_oracle_suite();

}  // namespace covdiff
