// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "covdiff/counter.hpp"

namespace covdiff {

using cplx = std::complex<double>;
using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// A = I - (nu/h^2) L on an nx-by-nx interior grid of the unit square, with L
// the Dirichlet 5-point Laplacian (unscaled), h = 1/(nx+1) and
// nu = D^2/(2 ell - 4). Unknowns are ordered x-fastest: k = i + nx*j.
class DiffusionOperator {
 public:
  DiffusionOperator(int nx, int ell, double daley_length = 0.2);

  // Same grid with an explicit diffusion coefficient; nu = 0 gives A = I.
  static DiffusionOperator with_nu(int nx, int ell, double nu);

  int nx() const { return nx_; }
  int ell() const { return ell_; }
  Eigen::Index N() const { return static_cast<Eigen::Index>(nx_) * nx_; }
  double h() const { return 1.0 / (nx_ + 1); }
  double nu() const { return nu_; }
  double daley_length() const { return daley_; }
  // nu / h^2, the off-diagonal magnitude.
  double coupling() const { return nu_ / (h() * h()); }
  double diagonal() const { return 1.0 + 4.0 * coupling(); }

  const RowSparse& matrix() const { return A_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(A_); }

  void apply(const double* x, double* y) const;
  void apply(const cplx* x, cplx* y) const;

  template <class Vec>
  Vec apply(const Vec& v, MatvecCounter* counter = nullptr) const {
    check_length(v.size());
    Vec out(v.size());
    apply(v.data(), out.data());
    count_matvecs(counter);
    return out;
  }

  void check_length(Eigen::Index n) const;

 private:
  DiffusionOperator(int nx, int ell, double daley, double nu);

  int nx_;
  int ell_;
  double daley_;
  double nu_;
  RowSparse A_;
};

// B = A - lambda I, applied matrix-free through the shared A.
class ShiftedOperator {
 public:
  ShiftedOperator(const DiffusionOperator& base, cplx lambda);

  const DiffusionOperator& base() const { return *base_; }
  cplx shift() const { return lambda_; }
  // Segment endpoints mu_N - lambda and mu_1 - lambda.
  cplx xi_low() const { return xi_lo_; }
  cplx xi_high() const { return xi_hi_; }

  void apply(const cplx* x, cplx* y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, MatvecCounter* counter = nullptr) const;

 private:
  const DiffusionOperator* base_;
  cplx lambda_;
  cplx xi_lo_;
  cplx xi_hi_;
};

// Real symmetric 2N form of (A - lambda I) x = b for Im(lambda) > 0:
//   [ Phi  Psi ] [u]   [-Im b]
//   [ Psi -Phi ] [w] = [ Re b],   u = Re x, w = -Im x,
// with Phi = Im(lambda) I and Psi = A - Re(lambda) I.
class SaddleOperator {
 public:
  SaddleOperator(const DiffusionOperator& base, cplx lambda);

  const DiffusionOperator& base() const { return *base_; }
  cplx shift() const { return lambda_; }
  Eigen::Index size() const { return 2 * base_->N(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v, MatvecCounter* counter = nullptr) const;
  void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out, MatvecCounter* counter) const;

  static Eigen::VectorXd rhs(const Eigen::VectorXcd& b);
  static Eigen::VectorXcd solution(const Eigen::VectorXd& uw);

  Eigen::MatrixXd dense() const;

 private:
  const DiffusionOperator* base_;
  cplx lambda_;
};

}  // namespace covdiff
