// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "covdiff/block_system.hpp"
#include "covdiff/krylov.hpp"
#include "covdiff/multigrid.hpp"
#include "covdiff/spectral.hpp"

namespace covdiff {
namespace {

Eigen::MatrixXd shifted_dense(const DiffusionOperator& op, double s) {
  return op.dense() + s * Eigen::MatrixXd::Identity(op.N(), op.N());
}

TEST(Multigrid, CoarseningSizes) {
  EXPECT_EQ(coarsen_nx(7), 3);
  EXPECT_EQ(coarsen_nx(100), 50);
  EXPECT_EQ(coarsen_nx(255), 127);
  EXPECT_EQ(coarsen_nx(6), 3);
  const MGHierarchy h(DiffusionOperator(7, 10), 0.0);
  EXPECT_EQ(h.levels(), 2);
  EXPECT_EQ(h.level_nx(1), 3);
  const MGHierarchy big(DiffusionOperator(500, 10), 0.0);
  EXPECT_LE(big.level_nx(big.levels() - 1), 7);
}

TEST(Multigrid, InterpolationIsLinearOnCoordinates) {
  for (auto [nf, nc] : {std::pair{7, 3}, std::pair{100, 50}, std::pair{9, 4}}) {
    const Eigen::MatrixXd P = interpolation_1d(nf, nc);
    ASSERT_EQ(P.rows(), nf);
    ASSERT_EQ(P.cols(), nc);
    // Linear functions vanishing at both ends interpolate exactly away from
    // the boundary cells; here check a(x) = x on coordinates.
    Eigen::VectorXd xc(nc), xf(nf);
    for (int i = 0; i < nc; ++i) xc(i) = (i + 1.0) / (nc + 1.0);
    for (int i = 0; i < nf; ++i) xf(i) = (i + 1.0) / (nf + 1.0);
    const Eigen::VectorXd got = P * xc;
    for (int i = 0; i < nf; ++i) {
      if (xf(i) < xc(0) || xf(i) > xc(nc - 1)) continue;
      EXPECT_NEAR(got(i), xf(i), 1e-14);
    }
    EXPECT_GE(P.minCoeff(), 0.0);
  }
}

TEST(Multigrid, LevelsAreSymmetricPositiveDefinite) {
  for (CoarseOperator co : {CoarseOperator::rediscretized, CoarseOperator::galerkin}) {
    MGOptions o;
    o.coarse = co;
    const MGHierarchy h(DiffusionOperator(37, 10), -0.5, o);
    for (int k = 0; k < h.levels(); ++k) {
      const Eigen::MatrixXd A(h.level_matrix(k));
      EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(A).info(), Eigen::Success);
    }
  }
}

TEST(Multigrid, RejectsIndefiniteShift) {
  const DiffusionOperator op(20, 10);
  EXPECT_THROW(MGHierarchy(op, -extreme_eigenvalues(op).mu_min), std::invalid_argument);
}

TEST(Multigrid, CountsSetupsAndCycles) {
  MatvecCounter c;
  const MGHierarchy h(DiffusionOperator(15, 10), 0.5, {}, &c);
  EXPECT_EQ(c.mg_setups(), 1);
  h.vcycle(random_vector(225, 1), &c);
  h.vcycle(random_vector(225, 2), &c);
  EXPECT_EQ(c.vcycles(), 2);
  EXPECT_EQ(c.matvecs(), 0);
}

class VcycleProperties : public ::testing::TestWithParam<Smoother> {};

TEST_P(VcycleProperties, ZeroLinearSymmetricPositive) {
  MGOptions o;
  o.smoother = GetParam();
  const DiffusionOperator op(31, 10);
  const MGHierarchy h(op, 0.8, o);
  EXPECT_EQ(h.vcycle(Eigen::VectorXd::Zero(op.N())).norm(), 0.0);
  const Eigen::VectorXd r1 = random_vector(op.N(), 1), r2 = random_vector(op.N(), 2);
  const Eigen::VectorXd z1 = h.vcycle(r1), z2 = h.vcycle(r2);
  const Eigen::VectorXd zc = h.vcycle(2.5 * r1 - 0.7 * r2);
  EXPECT_LT((zc - (2.5 * z1 - 0.7 * z2)).norm(), 1e-12 * zc.norm());
  EXPECT_NEAR(z1.dot(r2), r1.dot(z2), 1e-12 * std::abs(z1.dot(r2)));
  for (unsigned s = 10; s < 20; ++s) {
    const Eigen::VectorXd r = random_vector(op.N(), s);
    EXPECT_GT(h.vcycle(r).dot(r), 0.0);
  }
}

TEST_P(VcycleProperties, EnergyContractionAgainstDenseSolve) {
  MGOptions o;
  o.smoother = GetParam();
  const DiffusionOperator op(4, 10);
  const double s = 0.3;
  const MGHierarchy h(op, s, o);
  const Eigen::MatrixXd M = shifted_dense(op, s);
  const Eigen::VectorXd r = random_vector(op.N(), 5);
  const Eigen::VectorXd zs = M.llt().solve(r);
  const Eigen::VectorXd e = h.vcycle(r) - zs;
  EXPECT_LT(e.dot(M * e), zs.dot(M * zs));
}

INSTANTIATE_TEST_SUITE_P(Smoothers, VcycleProperties,
                         ::testing::Values(Smoother::gauss_seidel, Smoother::jacobi));

TEST(Multigrid, ContractionFactorPoisson255) {
  // Residual reduction of one V-cycle from a zero guess on random residuals.
  const DiffusionOperator op(255, 10);
  for (CoarseOperator co : {CoarseOperator::rediscretized, CoarseOperator::galerkin}) {
    MGOptions o;
    o.coarse = co;
    const MGHierarchy h(op, 0.0, o);
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Eigen::VectorXd r = random_vector(op.N(), seed);
      const Eigen::VectorXd z = h.vcycle(r);
      EXPECT_LE((r - op.apply(z)).norm() / r.norm(), 0.2);
    }
  }
}

TEST(Multigrid, GalerkinAndRediscretizedAgreeOnOddGrids) {
  // On nested grids the Galerkin product of the 5-point stencil differs from
  // the rediscretized one, but both must be SPD and close in action on
  // smooth vectors.
  const DiffusionOperator op(31, 10);
  MGOptions g;
  g.coarse = CoarseOperator::galerkin;
  const MGHierarchy hr(op, 0.2), hg(op, 0.2, g);
  ASSERT_EQ(hr.levels(), hg.levels());
  for (int k = 0; k < hr.levels(); ++k) EXPECT_EQ(hr.level_nx(k), hg.level_nx(k));
  const int nc = hr.level_nx(1);
  Eigen::VectorXd v(nc * nc);
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nc; ++i)
      v(i + nc * j) = std::sin(std::numbers::pi * (i + 1) / (nc + 1)) *
                      std::sin(std::numbers::pi * (j + 1) / (nc + 1));
  const Eigen::VectorXd a = hr.level_matrix(1) * v, b = hg.level_matrix(1) * v;
  EXPECT_LT((a - b).norm() / a.norm(), 0.05);
}

int mg_pcg_iterations(int nx, double s) {
  const DiffusionOperator op(nx, 10);
  const MGHierarchy h(op, s);
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out = op.apply(in) + s * in;
  };
  auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) { h.vcycle(r, z); };
  Eigen::VectorXd x;
  const SolveTrace t =
      pcg_solve(apply, random_vector(op.N(), 0), x, StopRule::tolerance(1e-6, 200), prec);
  EXPECT_TRUE(t.converged);
  return t.iterations;
}

TEST(Multigrid, PcgIterationsAndMeshIndependence) {
  const double s = 1.0;  // alpha^(1/ell) at alpha = 1
  const int i100 = mg_pcg_iterations(100, s);
  const int i500 = mg_pcg_iterations(500, s);
  EXPECT_LE(i100, 10);
  EXPECT_LE(i500 - i100, 2);
}

TEST(Multigrid, SaddleMinresWithOneVcycleStaysClose) {
  const DiffusionOperator op(4, 10);
  const cplx lambda = scaled_roots_of_unity(10, 1.0)[1];
  const SaddleOperator S(op, lambda);
  const Eigen::MatrixXd Sd = S.dense();
  const double s = lambda.imag() - lambda.real();
  const MGHierarchy h(op, s);
  const Eigen::LLT<Eigen::MatrixXd> llt(shifted_dense(op, s));
  Eigen::VectorXcd b(op.N());
  b.real() = random_vector(op.N(), 1);
  b.imag() = random_vector(op.N(), 2);
  const Eigen::VectorXd rhs = SaddleOperator::rhs(b);
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = Sd * in; };
  auto exact = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    z.head(op.N()) = llt.solve(r.head(op.N()));
    z.tail(op.N()) = llt.solve(r.tail(op.N()));
  };
  auto vcyc = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    z.head(op.N()) = h.vcycle(Eigen::VectorXd(r.head(op.N())));
    z.tail(op.N()) = h.vcycle(Eigen::VectorXd(r.tail(op.N())));
  };
  Eigen::VectorXd x1, x2;
  const SolveTrace t1 = minres_solve(apply, rhs, x1, StopRule::tolerance(1e-8, 200), exact);
  const SolveTrace t2 = minres_solve(apply, rhs, x2, StopRule::tolerance(1e-8, 200), vcyc);
  EXPECT_TRUE(t1.converged);
  EXPECT_TRUE(t2.converged);
  EXPECT_LE(t2.iterations, 2 * t1.iterations);
}

}  // namespace
}  // namespace covdiff
