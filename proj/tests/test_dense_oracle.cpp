// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "covdiff/dense_oracle.hpp"
#include "covdiff/spectral.hpp"

namespace covdiff {
namespace {

TEST(DenseOracle, SuitePasses) {
  const auto reports = run_oracle_suite();
  EXPECT_GE(reports.size(), 18u * 4u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.check << ": " << r.detail;
}

TEST(DenseOracle, ReferenceInstance) {
  const DiffusionOperator op(3, 4);
  const DenseInstance inst = build_dense_instance(op, 0.5);
  EXPECT_TRUE(verify_preconditioned_spectrum(inst).pass);
  EXPECT_TRUE(verify_factorization(inst).pass);
  EXPECT_TRUE(verify_sherman_morrison(inst).pass);
  EXPECT_TRUE(verify_diagonalizable(inst).pass);
}

TEST(DenseOracle, TinyAlphaGivesUnitSpectrum) {
  const DiffusionOperator op(3, 4);
  const DenseInstance inst = build_dense_instance(op, 1e-12);
  const Eigen::VectorXcd ev = inst.P.lu().solve(inst.Acal).eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) EXPECT_NEAR(std::abs(ev(k) - 1.0), 0.0, 1e-10);
}

TEST(DenseOracle, ExcludedAlphaIsAPreconditionViolation) {
  const auto op = DiffusionOperator::with_nu(2, 4, 0.0);
  const DenseInstance bad = build_dense_instance(op, 1.0);
  const OracleReport r = verify_preconditioned_spectrum(bad);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.detail.find("precondition violated"), std::string::npos);
  EXPECT_TRUE(verify_preconditioned_spectrum(build_dense_instance(op, 0.5)).pass);
}

TEST(DenseOracle, ZeroDiffusionInstancesPass) {
  for (int ell : {4, 6})
    for (double alpha : {0.5, 0.1, 0.01}) {
      const DenseInstance inst = build_dense_instance(DiffusionOperator::with_nu(3, ell, 0.0), alpha);
      EXPECT_TRUE(verify_preconditioned_spectrum(inst).pass);
      EXPECT_TRUE(verify_factorization(inst).pass);
      EXPECT_TRUE(verify_sherman_morrison(inst).pass);
    }
}

TEST(DenseOracle, RejectsLargeInstances) {
  EXPECT_THROW(build_dense_instance(DiffusionOperator(10, 10), 1.0), std::invalid_argument);
}

TEST(DenseOracle, MultisetDistance) {
  using C = std::complex<double>;
  EXPECT_EQ(multiset_distance({C(1, 0), C(2, 1)}, {C(2, 1), C(1, 0)}), 0.0);
  EXPECT_NEAR(multiset_distance({C(1, 0), C(3, 0)}, {C(1, 0), C(3.3, 0)}), 0.3 / 3.3, 1e-12);
  EXPECT_TRUE(std::isinf(multiset_distance({C(1, 0)}, {C(1, 0), C(1, 0)})));
}

TEST(DenseOracle, SaddleSpectrumAllSmallInstances) {
  for (int nx : {2, 3, 4, 5})
    for (int ell : {4, 6, 10})
      for (double alpha : {1.0, 0.1, 0.01}) {
        const DiffusionOperator op(nx, ell);
        for (const cplx& l : scaled_roots_of_unity(ell, alpha)) {
          if (std::abs(l.imag()) < 1e-14) continue;
          const OracleReport r = verify_saddle_spectrum(op, l);
          EXPECT_TRUE(r.pass) << r.check << " " << r.detail;
        }
      }
  // Phi = Psi gives |theta| = 1/sqrt(2) exactly.
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const OracleReport r = verify_saddle_spectrum(one, one);
  EXPECT_TRUE(r.pass);
}

TEST(DenseOracle, RandomNormalMatrixHasGivenSpectrum) {
  Eigen::VectorXcd e(5);
  e << cplx(1, 1), cplx(2, -1), cplx(3, 0), cplx(-1, 0.5), cplx(0.2, 0.2);
  const Eigen::MatrixXcd M = random_normal_matrix(e, 3);
  EXPECT_LT((M * M.adjoint() - M.adjoint() * M).norm(), 1e-12);
  const Eigen::VectorXcd got = M.eigenvalues();
  std::vector<cplx> a(got.data(), got.data() + 5), b(e.data(), e.data() + 5);
  EXPECT_LT(multiset_distance(a, b), 1e-12);
}

}  // namespace
}  // namespace covdiff
