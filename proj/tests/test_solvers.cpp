// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "covdiff/block_system.hpp"
#include "covdiff/chebyshev.hpp"
#include "covdiff/dense_oracle.hpp"
#include "covdiff/krylov.hpp"
#include "covdiff/multigrid.hpp"
#include "covdiff/spectral.hpp"

namespace covdiff {
namespace {

auto dense_op(const Eigen::MatrixXcd& M, int* calls = nullptr) {
  return [&M, calls](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out = M * in;
    if (calls) ++*calls;
  };
}

auto dense_op_real(const Eigen::MatrixXd& M) {
  return [&M](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = M * in; };
}

Eigen::VectorXcd random_complex(int n, unsigned seed) {
  Eigen::VectorXcd v(n);
  v.real() = random_vector(n, seed);
  v.imag() = random_vector(n, seed + 1000);
  return v;
}

TEST(Chebyshev, IdentityConvergesInOneStep) {
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(8, 8);
  const Eigen::VectorXcd b = random_complex(8, 1);
  Eigen::VectorXcd x;
  ChebyshevConfig cfg;
  cfg.stop = StopRule::tolerance(1e-12, 10);
  const SolveTrace t = chebyshev_solve(dense_op(I), b, x, cfg);
  EXPECT_EQ(t.iterations, 1);
  EXPECT_TRUE(t.converged);
  EXPECT_LT((x - b).norm(), 1e-15);
  EXPECT_EQ(t.residuals.size(), 2u);
}

TEST(Chebyshev, ZeroRhs) {
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(4, 4);
  Eigen::VectorXcd x;
  const SolveTrace t =
      chebyshev_solve(dense_op(I), Eigen::VectorXcd::Zero(4).eval(), x, ChebyshevConfig{});
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iterations, 0);
  EXPECT_EQ(x.norm(), 0.0);
}

TEST(Chebyshev, PolynomialContractOnRandomNormalMatrices) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const cplx lo(1.0 + u(rng), u(rng) - 0.5);
    const cplx hi = lo + cplx(3.0 + 5.0 * u(rng), 2.0 * u(rng) - 1.0);
    const int n = 14;
    Eigen::VectorXcd eigs(n);
    for (int k = 0; k < n; ++k) eigs(k) = lo + (hi - lo) * (double(k) / (n - 1));
    const Eigen::MatrixXcd M = random_normal_matrix(eigs, 10 + trial);
    for (int p : {1, 2, 5, 9}) {
      const OracleReport r = verify_chebyshev_polynomial_contract(M, lo, hi, p);
      EXPECT_TRUE(r.pass) << r.detail;
    }
  }
}

TEST(Chebyshev, ErrorBoundOnNormalMatrices) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const cplx lo(0.5 + u(rng), u(rng));
    const cplx hi = lo + cplx(2.0 + 10.0 * u(rng), 0.0);
    const int n = 20;
    Eigen::VectorXcd eigs(n);
    for (int k = 0; k < n; ++k) eigs(k) = lo + (hi - lo) * u(rng);
    eigs(0) = lo;
    eigs(1) = hi;
    const Eigen::MatrixXcd M = random_normal_matrix(eigs, 77 + trial);
    const Eigen::VectorXcd xt = random_complex(n, 3 + trial);
    const Eigen::VectorXcd b = M * xt;
    const cplx c = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
    for (int p = 1; p <= 15; ++p) {
      Eigen::VectorXcd x;
      ChebyshevConfig cfg;
      cfg.xi_lo = lo;
      cfg.xi_hi = hi;
      cfg.stop = StopRule::iterations(p);
      chebyshev_solve(dense_op(M), b, x, cfg);
      const double bound = 1.0 / std::abs(chebyshev_t(p, c / d));
      EXPECT_LE((x - xt).norm() / xt.norm(), bound * (1 + 1e-6)) << "p=" << p;
    }
  }
}

TEST(Chebyshev, FixedModeCountsAndFinalResidual) {
  const DiffusionOperator op(10, 10);
  const ShiftedOperator B(op, cplx(0.2, 0.3));
  const Eigen::VectorXcd b = random_complex(op.N(), 2);
  int calls = 0;
  auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out = B.apply(in);
    ++calls;
  };
  ChebyshevConfig cfg;
  cfg.xi_lo = B.xi_low();
  cfg.xi_hi = B.xi_high();
  cfg.stop = StopRule::iterations(7);
  Eigen::VectorXcd x;
  SolveTrace t = chebyshev_solve(apply, b, x, cfg);
  EXPECT_EQ(t.iterations, 7);
  EXPECT_EQ(calls, 6);
  EXPECT_EQ(t.residuals.size(), 7u);
  calls = 0;
  cfg.final_residual = true;
  Eigen::VectorXcd x2;
  t = chebyshev_solve(apply, b, x2, cfg);
  EXPECT_EQ(calls, 7);
  EXPECT_EQ(t.residuals.size(), 8u);
  EXPECT_LT((x - x2).norm(), 1e-14 * x.norm());
  EXPECT_NEAR(t.residuals.back(), (b - B.apply(x2)).norm() / b.norm(), 1e-12);
}

TEST(Chebyshev, DivergenceGuard) {
  // Foci that exclude the spectrum: M = -I on [1, 2].
  const Eigen::MatrixXcd M = -Eigen::MatrixXcd::Identity(6, 6);
  ChebyshevConfig cfg;
  cfg.xi_lo = 1.0;
  cfg.xi_hi = 2.0;
  cfg.stop = StopRule::tolerance(1e-6, 1000);
  Eigen::VectorXcd x;
  EXPECT_THROW(chebyshev_solve(dense_op(M), random_complex(6, 1), x, cfg), DivergenceError);
}

TEST(Chebyshev, ReferenceRealBlockCounts) {
  // The lambda = +-1 blocks at nx = 100, ell = 10, alpha = 1 with a uniform
  // right-hand side.
  const DiffusionOperator op(100, 10);
  const Eigen::VectorXcd b = random_vector(op.N(), 0, RhsDistribution::uniform).cast<cplx>();
  auto count = [&](cplx lambda) {
    const ShiftedOperator B(op, lambda);
    ChebyshevConfig cfg;
    cfg.xi_lo = B.xi_low();
    cfg.xi_hi = B.xi_high();
    cfg.stop = StopRule::tolerance(1e-6, 5000);
    auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = B.apply(in); };
    Eigen::VectorXcd x;
    return chebyshev_solve(apply, b, x, cfg).iterations;
  };
  EXPECT_NEAR(count(1.0), 463, 2);
  EXPECT_NEAR(count(-1.0), 72, 2);
}

TEST(Chebyshev, RealScalarRejectsComplexFoci) {
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
  ChebyshevConfig cfg;
  cfg.xi_lo = cplx(1.0, 0.5);
  cfg.xi_hi = cplx(2.0, 0.5);
  Eigen::VectorXd x;
  EXPECT_THROW(chebyshev_solve(dense_op_real(M), Eigen::VectorXd::Ones(3).eval(), x, cfg),
               std::invalid_argument);
}

TEST(LinearPolynomial, RealSegmentCoincides) {
  const LinearPolynomial p = optimal_linear_polynomial(1.0, 3.0);
  EXPECT_NEAR(p.coefficient.real(), -0.5, 1e-15);
  EXPECT_NEAR(p.coefficient.imag(), 0.0, 1e-15);
  EXPECT_NEAR(p.max_modulus, 0.5, 1e-15);
  EXPECT_NEAR(chebyshev_linear_max_modulus(1.0, 3.0), 0.5, 1e-15);
}

TEST(LinearPolynomial, ComplexSegment) {
  const cplx xn(1, 1), x1(3, 1);
  EXPECT_NEAR(optimal_linear_polynomial(xn, x1).max_modulus,
              2.0 / (std::sqrt(2.0) + std::sqrt(10.0)), 1e-14);
  EXPECT_NEAR(chebyshev_linear_max_modulus(xn, x1), 2.0 / std::sqrt(20.0), 1e-14);
  EXPECT_THROW(optimal_linear_polynomial(cplx(1, 0), cplx(1, 2)), std::invalid_argument);
}

TEST(LinearPolynomial, StrictlyBetterOnRandomSegments) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int checked = 0;
  while (checked < 1000) {
    const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
    if (std::abs(a.real() - b.real()) < 1e-6) continue;
    // Segment must avoid the origin.
    const cplx d = b - a;
    const double t = std::clamp(-std::real(std::conj(d) * a) / std::norm(d), 0.0, 1.0);
    if (std::abs(a + t * d) < 1e-3) continue;
    const LinearPolynomial p = optimal_linear_polynomial(a, b);
    // The stated max modulus is attained: sample the segment.
    double sampled = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const cplx mu = a + (k / 200.0) * d;
      sampled = std::max(sampled, std::abs(1.0 + p.coefficient * mu));
    }
    EXPECT_NEAR(sampled, p.max_modulus, 1e-9 * std::max(1.0, p.max_modulus));
    const bool collinear = std::abs(std::imag(a * std::conj(b))) < 1e-12;
    if (!collinear) EXPECT_LT(p.max_modulus, chebyshev_linear_max_modulus(a, b));
    ++checked;
  }
}

TEST(ChebyshevT, Recurrence) {
  EXPECT_EQ(chebyshev_t(0, 0.3), cplx(1.0));
  EXPECT_EQ(chebyshev_t(1, cplx(0.3, 0.1)), cplx(0.3, 0.1));
  EXPECT_NEAR(std::abs(chebyshev_t(5, 0.4) - std::cos(5 * std::acos(0.4))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(chebyshev_t(7, 1.7) - std::cosh(7 * std::acosh(1.7))), 0.0,
              1e-10 * std::cosh(7 * std::acosh(1.7)));
}

TEST(Pcg, IdentityIsOneIteration) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd x;
  const SolveTrace t = pcg_solve(dense_op_real(I), random_vector(5, 1), x,
                                 StopRule::tolerance(1e-12, 10));
  EXPECT_EQ(t.iterations, 1);
  EXPECT_TRUE(t.converged);
}

TEST(Pcg, MatchesDenseSolve) {
  const DiffusionOperator op(4, 10);
  const Eigen::MatrixXd A = op.dense() + 0.3 * Eigen::MatrixXd::Identity(16, 16);
  const Eigen::VectorXd b = random_vector(16, 4);
  Eigen::VectorXd x;
  const SolveTrace t = pcg_solve(dense_op_real(A), b, x, StopRule::tolerance(1e-13, 100));
  EXPECT_TRUE(t.converged);
  EXPECT_LT((x - A.llt().solve(b)).norm(), 1e-8 * x.norm());
}

TEST(Pcg, BreakdownOnIndefinite) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4, 4);
  M(0, 0) = -1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
  b(0) = 1.0;
  Eigen::VectorXd x;
  EXPECT_THROW(pcg_solve(dense_op_real(M), b, x, StopRule::tolerance(1e-10, 10)), BreakdownError);
}

TEST(Pcg, MultigridPreconditionedReferenceShift) {
  const DiffusionOperator op(100, 10);
  const double s = std::pow(1.0, 0.1);  // alpha^(1/ell) at alpha = 1
  const MGHierarchy mg(op, s);
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out = op.apply(in) + s * in;
  };
  auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) { mg.vcycle(r, z); };
  Eigen::VectorXd x;
  const SolveTrace t =
      pcg_solve(apply, random_vector(op.N(), 0), x, StopRule::tolerance(1e-6, 100), prec);
  EXPECT_TRUE(t.converged);
  EXPECT_LE(t.iterations, 8);
}

TEST(Minres, ZeroRhs) {
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd x;
  const SolveTrace t =
      minres_solve(dense_op_real(M), Eigen::VectorXd::Zero(4).eval(), x, StopRule{});
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iterations, 0);
  EXPECT_EQ(x.norm(), 0.0);
}

TEST(Minres, SaddleMatchesDenseAndIsMonotone) {
  const DiffusionOperator op(4, 10);
  const cplx lambda = scaled_roots_of_unity(10, 1.0)[2];
  const SaddleOperator S(op, lambda);
  const Eigen::MatrixXd Sd = S.dense();
  Eigen::VectorXcd b(op.N());
  b.real() = random_vector(op.N(), 8);
  b.imag() = random_vector(op.N(), 9);
  const Eigen::VectorXd rhs = SaddleOperator::rhs(b);
  const Eigen::MatrixXd PD = op.dense() + (lambda.imag() - lambda.real()) *
                                              Eigen::MatrixXd::Identity(op.N(), op.N());
  const Eigen::LLT<Eigen::MatrixXd> llt(PD);
  auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    z.head(op.N()) = llt.solve(r.head(op.N()));
    z.tail(op.N()) = llt.solve(r.tail(op.N()));
  };
  Eigen::VectorXd uw;
  const SolveTrace t =
      minres_solve(dense_op_real(Sd), rhs, uw, StopRule::tolerance(1e-13, 200), prec);
  EXPECT_TRUE(t.converged);
  for (std::size_t k = 1; k < t.residuals.size(); ++k)
    EXPECT_LE(t.residuals[k], t.residuals[k - 1] * (1 + 1e-12));
  EXPECT_LT((uw - Sd.lu().solve(rhs)).norm(), 1e-8 * uw.norm());
}

TEST(Minres, ReferenceSaddleWithExactBlockPreconditioner) {
  const DiffusionOperator op(100, 10);
  const cplx lambda = scaled_roots_of_unity(10, 1.0)[1];
  const SaddleOperator S(op, lambda);
  const double s = lambda.imag() - lambda.real();
  Eigen::SparseMatrix<double> PD = op.matrix();
  for (int k = 0; k < op.N(); ++k) PD.coeffRef(k, k) += s;
  const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(PD);
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = S.apply(in); };
  auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    z.head(op.N()) = llt.solve(r.head(op.N()));
    z.tail(op.N()) = llt.solve(r.tail(op.N()));
  };
  Eigen::VectorXcd b = random_vector(op.N(), 0).cast<cplx>();
  Eigen::VectorXd uw;
  const SolveTrace t =
      minres_solve(apply, SaddleOperator::rhs(b), uw, StopRule::tolerance(1e-6, 200), prec);
  EXPECT_TRUE(t.converged);
  EXPECT_LE(t.iterations, 30);
  const Eigen::VectorXcd x = SaddleOperator::solution(uw);
  const ShiftedOperator B(op, lambda);
  EXPECT_LT((B.apply(x) - b).norm() / b.norm(), 1e-5);
}

}  // namespace
}  // namespace covdiff
