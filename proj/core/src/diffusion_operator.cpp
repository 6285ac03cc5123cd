// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/diffusion_operator.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "covdiff/spectral.hpp"

namespace covdiff {

namespace {

void validate(int nx, int ell) {
  if (nx < 2) throw std::invalid_argument("nx must be at least 2, got " + std::to_string(nx));
  if (ell <= 2 || ell % 2 != 0)
    throw std::invalid_argument("ell must be even and greater than 2, got " +
                                std::to_string(ell));
}

RowSparse assemble(int nx, double c) {
  const Eigen::Index n = static_cast<Eigen::Index>(nx) * nx;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index k = i + static_cast<Eigen::Index>(nx) * j;
      if (j > 0) t.emplace_back(k, k - nx, -c);
      if (i > 0) t.emplace_back(k, k - 1, -c);
      t.emplace_back(k, k, 1.0 + 4.0 * c);
      if (i + 1 < nx) t.emplace_back(k, k + 1, -c);
      if (j + 1 < nx) t.emplace_back(k, k + nx, -c);
    }
  }
  RowSparse A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

template <class T>
void csr_apply(const RowSparse& A, const T* x, T* y) {
  const int* outer = A.outerIndexPtr();
  const int* inner = A.innerIndexPtr();
  const double* val = A.valuePtr();
  const Eigen::Index n = A.rows();
  for (Eigen::Index r = 0; r < n; ++r) {
    T s{};
    for (int p = outer[r]; p < outer[r + 1]; ++p) s += val[p] * x[inner[p]];
    y[r] = s;
  }
}

}  // namespace

DiffusionOperator::DiffusionOperator(int nx, int ell, double daley_length)
    : DiffusionOperator(nx, ell, daley_length,
                        daley_length * daley_length / (2.0 * ell - 4.0)) {
  if (!(daley_length > 0)) throw std::invalid_argument("Daley lengthscale must be positive");
}

DiffusionOperator DiffusionOperator::with_nu(int nx, int ell, double nu) {
  if (nu < 0) throw std::invalid_argument("nu must be non-negative");
  return DiffusionOperator(nx, ell, 0.0, nu);
}

DiffusionOperator::DiffusionOperator(int nx, int ell, double daley, double nu)
    : nx_(nx), ell_(ell), daley_(daley), nu_(nu) {
  validate(nx, ell);
  A_ = assemble(nx, coupling());
}

void DiffusionOperator::apply(const double* x, double* y) const { csr_apply(A_, x, y); }
void DiffusionOperator::apply(const cplx* x, cplx* y) const { csr_apply(A_, x, y); }

void DiffusionOperator::check_length(Eigen::Index n) const {
  if (n != N())
    throw std::invalid_argument("vector length " + std::to_string(n) + " does not match N = " +
                                std::to_string(N()));
}

ShiftedOperator::ShiftedOperator(const DiffusionOperator& base, cplx lambda)
    : base_(&base), lambda_(lambda) {
  const SpectralBounds b = extreme_eigenvalues(base);
  xi_lo_ = b.mu_min - lambda;
  xi_hi_ = b.mu_max - lambda;
}

void ShiftedOperator::apply(const cplx* x, cplx* y) const {
  base_->apply(x, y);
  const Eigen::Index n = base_->N();
  for (Eigen::Index i = 0; i < n; ++i) y[i] -= lambda_ * x[i];
}

Eigen::VectorXcd ShiftedOperator::apply(const Eigen::VectorXcd& v, MatvecCounter* counter) const {
  base_->check_length(v.size());
  Eigen::VectorXcd out(v.size());
  apply(v.data(), out.data());
  count_matvecs(counter);
  return out;
}

SaddleOperator::SaddleOperator(const DiffusionOperator& base, cplx lambda)
    : base_(&base), lambda_(lambda) {
  if (!(lambda.imag() > 0))
    throw std::invalid_argument("saddle form needs Im(lambda) > 0; solve the conjugate system");
  if (!(extreme_eigenvalues(base).mu_min > lambda.real()))
    throw std::invalid_argument("A - Re(lambda) I is not positive definite");
}

void SaddleOperator::apply(const Eigen::VectorXd& v, Eigen::VectorXd& out,
                           MatvecCounter* counter) const {
  const Eigen::Index n = base_->N();
  if (v.size() != 2 * n) throw std::invalid_argument("saddle vector has wrong length");
  out.resize(2 * n);
  const double phi = lambda_.imag();
  const double re = lambda_.real();
  auto u = v.head(n);
  auto w = v.tail(n);
  // out_top = Phi u + Psi w, out_bottom = Psi u - Phi w
  base_->apply(w.data(), out.data());
  base_->apply(u.data(), out.data() + n);
  out.head(n) += phi * u - re * w;
  out.tail(n) += -re * u - phi * w;
  count_matvecs(counter, 2);
}

Eigen::VectorXd SaddleOperator::apply(const Eigen::VectorXd& v, MatvecCounter* counter) const {
  Eigen::VectorXd out;
  apply(v, out, counter);
  return out;
}

Eigen::VectorXd SaddleOperator::rhs(const Eigen::VectorXcd& b) {
  Eigen::VectorXd r(2 * b.size());
  r.head(b.size()) = -b.imag();
  r.tail(b.size()) = b.real();
  return r;
}

Eigen::VectorXcd SaddleOperator::solution(const Eigen::VectorXd& uw) {
  const Eigen::Index n = uw.size() / 2;
  Eigen::VectorXcd x(n);
  x.real() = uw.head(n);
  x.imag() = -uw.tail(n);
  return x;
}

Eigen::MatrixXd SaddleOperator::dense() const {
  const Eigen::Index n = base_->N();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd psi = base_->dense() - lambda_.real() * I;
  Eigen::MatrixXd S(2 * n, 2 * n);
  S << lambda_.imag() * I, psi, psi, -lambda_.imag() * I;
  return S;
}

}  // namespace covdiff
