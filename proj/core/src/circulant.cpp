// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/circulant.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "covdiff/chebyshev.hpp"
#include "covdiff/krylov.hpp"
#include "covdiff/parallel.hpp"

namespace covdiff {

// ---------------------------------------------------------------- BlockDft

BlockDft::BlockDft(int ell, double alpha) : ell_(ell), alpha_(alpha) {
  if (ell < 1) throw std::invalid_argument("ell must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  std::vector<cplx> w(ell);
  for (int m = 0; 2 * m <= ell; ++m) {
    const double t = 2.0 * std::numbers::pi * m / ell;
    w[m] = cplx(std::cos(t), std::sin(t));
  }
  for (int m = 1; 2 * m < ell; ++m) w[ell - m] = std::conj(w[m]);
  if (ell % 2 == 0) w[ell / 2] = cplx(-1.0, 0.0);

  const double s = 1.0 / std::sqrt(static_cast<double>(ell));
  F_.resize(ell, ell);
  G_.resize(ell, ell);
  for (int j = 0; j < ell; ++j)
    for (int k = 0; k < ell; ++k) {
      const double g = std::pow(alpha, static_cast<double>(k) / ell);
      const cplx e = w[(j * k) % ell];
      F_(j, k) = e * (g * s);
      G_(k, j) = std::conj(e) * (s / g);
    }
}

ComplexBlockVector BlockDft::forward(const BlockVector& x) const {
  if (x.cols() != ell_) throw std::invalid_argument("block count mismatch in forward transform");
  return x.cast<cplx>() * F_.transpose();
}

ComplexBlockVector BlockDft::forward(const ComplexBlockVector& x) const {
  if (x.cols() != ell_) throw std::invalid_argument("block count mismatch in forward transform");
  return x * F_.transpose();
}

ComplexBlockVector BlockDft::inverse(const ComplexBlockVector& y) const {
  if (y.cols() != ell_) throw std::invalid_argument("block count mismatch in inverse transform");
  return y * G_.transpose();
}

BlockVector BlockDft::inverse_real(const ComplexBlockVector& y, double tol) const {
  const ComplexBlockVector x = inverse(y);
  const double re = x.real().norm();
  const double im = x.imag().norm();
  if (tol < 0) tol = 1e-10 * gamma_condition_number(ell_, alpha_);
  if (im > tol * std::max(re, 1e-300))
    throw std::runtime_error("inverse transform has imaginary residue " + std::to_string(im) +
                             " relative to " + std::to_string(re));
  return x.real();
}

// ---------------------------------------------------------------- names

std::string to_string(PrecondKind k) {
  switch (k) {
    case PrecondKind::none: return "none";
    case PrecondKind::exact: return "exact";
    case PrecondKind::nc1: return "nc1";
    case PrecondKind::nc2: return "nc2";
    case PrecondKind::sp: return "sp";
  }
  return "?";
}

std::string to_string(InnerPrecond k) {
  switch (k) {
    case InnerPrecond::mg: return "mg";
    case InnerPrecond::jacobi: return "jacobi";
    case InnerPrecond::identity: return "identity";
  }
  return "?";
}

PrecondKind parse_precond_kind(const std::string& s) {
  for (auto k : {PrecondKind::none, PrecondKind::exact, PrecondKind::nc1, PrecondKind::nc2,
                 PrecondKind::sp})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown preconditioner '" + s + "'");
}

InnerPrecond parse_inner_precond(const std::string& s) {
  for (auto k : {InnerPrecond::mg, InnerPrecond::jacobi, InnerPrecond::identity})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown inner preconditioner '" + s + "'");
}

void validate(const PreconditionerSpec& spec, const DiffusionOperator& op) {
  if (spec.threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (spec.kind == PrecondKind::none) return;
  const SpectralBounds b = spec.bounds.value_or(extreme_eigenvalues(op));
  const double limit = std::pow(b.mu_min, op.ell());
  if (!(spec.alpha > 0) || !(spec.alpha < limit))
    throw std::invalid_argument("alpha must lie in (0, mu_N^ell) = (0, " + std::to_string(limit) +
                                ")");
  if ((spec.kind == PrecondKind::nc1 || spec.kind == PrecondKind::nc2 ||
       spec.kind == PrecondKind::sp) &&
      !(spec.eta > 0))
    throw std::invalid_argument("eta must be positive");
  if (spec.kind == PrecondKind::sp && !(spec.inner_tol > 0 && spec.inner_tol < 1))
    throw std::invalid_argument("inner tolerance must lie in (0, 1)");
}

// ---------------------------------------------------------------- exact

struct ExactPreconditioner::Factors {
  using Lu = Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>>;
  std::vector<std::unique_ptr<Lu>> lu;
};

ExactPreconditioner::ExactPreconditioner(const DiffusionOperator& op, double alpha, int threads)
    : op_(&op),
      dft_(op.ell(), alpha),
      lambda_(scaled_roots_of_unity(op.ell(), alpha)),
      threads_(threads),
      factors_(std::make_unique<Factors>()) {
  const int ell = op.ell();
  factors_->lu.resize(ell);
  Eigen::SparseMatrix<cplx> I(op.N(), op.N());
  I.setIdentity();
  const Eigen::SparseMatrix<cplx> A = op.matrix().cast<cplx>();
  parallel_for(ell, threads_, [&](int j) {
    auto lu = std::make_unique<Factors::Lu>();
    Eigen::SparseMatrix<cplx> B = A - lambda_[j] * I;
    B.makeCompressed();
    lu->compute(B);
    if (lu->info() != Eigen::Success)
      throw std::runtime_error("shifted block " + std::to_string(j + 1) + " is singular");
    factors_->lu[j] = std::move(lu);
  });
  stats_.iterations.assign(ell, 0);
  stats_.matvecs.assign(ell, 0);
  stats_.last_residual.assign(ell, 0.0);
}

ExactPreconditioner::~ExactPreconditioner() = default;

void ExactPreconditioner::apply(const BlockVector& r, BlockVector& z, MatvecCounter*) {
  ComplexBlockVector y = dft_.forward(r);
  parallel_for(dft_.ell(), threads_, [&](int j) {
    y.col(j) = factors_->lu[j]->solve(Eigen::VectorXcd(y.col(j)));
  });
  z = dft_.inverse_real(y);
  ++stats_.applications;
}

// ---------------------------------------------------------------- nested Chebyshev

NestedChebyshevPreconditioner::NestedChebyshevPreconditioner(const DiffusionOperator& op,
                                                             double alpha,
                                                             IterationAllocation allocation,
                                                             const SpectralBounds& bounds,
                                                             int threads, PrecondKind tag)
    : op_(&op),
      dft_(op.ell(), alpha),
      lambda_(scaled_roots_of_unity(op.ell(), alpha)),
      alloc_(std::move(allocation)),
      bounds_(bounds),
      threads_(threads),
      tag_(tag) {
  if (static_cast<int>(alloc_.per_block.size()) != op.ell())
    throw std::invalid_argument("allocation has the wrong number of blocks");
  stats_.iterations.assign(op.ell(), 0);
  stats_.matvecs.assign(op.ell(), 0);
  stats_.last_residual.assign(op.ell(), 0.0);
}

void NestedChebyshevPreconditioner::apply(const BlockVector& r, BlockVector& z,
                                          MatvecCounter* counter) {
  ComplexBlockVector y = dft_.forward(r);
  parallel_for(dft_.ell(), threads_, [&](int j) {
    const cplx lam = lambda_[j];
    ChebyshevConfig cfg;
    cfg.xi_lo = bounds_.mu_min - lam;
    cfg.xi_hi = bounds_.mu_max - lam;
    cfg.stop = StopRule::iterations(alloc_.per_block[j]);
    std::int64_t used = 0;
    auto op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
      out.resize(in.size());
      op_->apply(in.data(), out.data());
      out -= lam * in;
      ++used;
    };
    const Eigen::VectorXcd b = y.col(j);
    Eigen::VectorXcd x;
    const SolveTrace t = chebyshev_solve(op, b, x, cfg);
    y.col(j) = x;
    count_matvecs(counter, used);
    stats_.iterations[j] += t.iterations;
    stats_.matvecs[j] += used;
    stats_.last_residual[j] = t.final_residual();
  });
  z = dft_.inverse_real(y);
  ++stats_.applications;
}

// ---------------------------------------------------------------- saddle point

SaddlePointPreconditioner::SaddlePointPreconditioner(const DiffusionOperator& op, double alpha,
                                                     int inner_iterations, double inner_tol,
                                                     InnerPrecond inner, const MGOptions& mg,
                                                     MatvecCounter* setup_counter, int threads)
    : op_(&op),
      dft_(op.ell(), alpha),
      lambda_(scaled_roots_of_unity(op.ell(), alpha)),
      inner_iterations_(std::max(1, inner_iterations)),
      inner_tol_(inner_tol),
      inner_(inner),
      threads_(threads) {
  const int half = op.ell() / 2;
  if (inner_ == InnerPrecond::mg) {
    mg_.resize(half + 1);
    parallel_for(half + 1, threads_, [&](int j) {
      mg_[j] = std::make_unique<MGHierarchy>(op, inner_shift(j), mg, setup_counter);
    });
  } else if (inner_ == InnerPrecond::jacobi) {
    jacobi_.resize(half + 1);
    const Eigen::VectorXd d = op.matrix().diagonal();
    for (int j = 0; j <= half; ++j)
      jacobi_[j] = (d.array() + inner_shift(j)).inverse().matrix();
  }
  stats_.iterations.assign(op.ell(), 0);
  stats_.matvecs.assign(op.ell(), 0);
  stats_.last_residual.assign(op.ell(), 0.0);
}

double SaddlePointPreconditioner::inner_shift(int j) const {
  const cplx lam = lambda_[j];
  if (lam.imag() == 0.0) return -lam.real();
  return lam.imag() - lam.real();
}

void SaddlePointPreconditioner::inner_apply(int j, const Eigen::VectorXd& r, Eigen::VectorXd& z,
                                            MatvecCounter* counter) const {
  switch (inner_) {
    case InnerPrecond::mg: mg_[j]->vcycle(r, z, counter); return;
    case InnerPrecond::jacobi: z = jacobi_[j].cwiseProduct(r); return;
    case InnerPrecond::identity: z = r; return;
  }
}

Eigen::VectorXcd SaddlePointPreconditioner::solve_block(int j, const Eigen::VectorXcd& b,
                                                        MatvecCounter* counter,
                                                        SolveTrace* trace) const {
  const int ell = dft_.ell();
  const cplx lam = lambda_[j];
  const StopRule stop = StopRule::tolerance(inner_tol_, inner_iterations_);
  if (lam.imag() == 0.0) {
    const double s = -lam.real();
    auto op = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out.resize(in.size());
      op_->apply(in.data(), out.data());
      out += s * in;
      count_matvecs(counter);
    };
    auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) { inner_apply(j, r, z, counter); };
    Eigen::VectorXcd x(b.size());
    Eigen::VectorXd part;
    SolveTrace t = pcg_solve(op, Eigen::VectorXd(b.real()), part, stop, prec);
    x.real() = part;
    x.imag().setZero();
    if (b.imag().norm() > 0.0) {
      const SolveTrace ti = pcg_solve(op, Eigen::VectorXd(b.imag()), part, stop, prec);
      x.imag() = part;
      t.iterations += ti.iterations;
    }
    if (trace) *trace = t;
    return x;
  }
  const bool flip = lam.imag() < 0.0;
  const int jj = flip ? conjugate_block(j, ell) : j;
  const SaddleOperator S(*op_, lambda_[jj]);
  const Eigen::Index n = op_->N();
  auto op = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { S.apply(in, out, counter); };
  auto prec = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z.resize(r.size());
    Eigen::VectorXd part;
    inner_apply(jj, r.head(n), part, counter);
    z.head(n) = part;
    inner_apply(jj, r.tail(n), part, counter);
    z.tail(n) = part;
  };
  const Eigen::VectorXd rhs = SaddleOperator::rhs(flip ? Eigen::VectorXcd(b.conjugate()) : b);
  Eigen::VectorXd uw;
  const SolveTrace t = minres_solve(op, rhs, uw, stop, prec);
  if (trace) *trace = t;
  Eigen::VectorXcd x = SaddleOperator::solution(uw);
  return flip ? Eigen::VectorXcd(x.conjugate()) : x;
}

void SaddlePointPreconditioner::apply(const BlockVector& r, BlockVector& z,
                                      MatvecCounter* counter) {
  ComplexBlockVector y = dft_.forward(r);
  parallel_for(dft_.ell(), threads_, [&](int j) {
    MatvecCounter local;
    SolveTrace t;
    y.col(j) = solve_block(j, y.col(j), &local, &t);
    if (counter) counter->merge(local.snapshot());
    stats_.iterations[j] += t.iterations;
    stats_.matvecs[j] += local.matvecs();
    stats_.last_residual[j] = t.final_residual();
  });
  z = dft_.inverse_real(y);
  ++stats_.applications;
}

// ---------------------------------------------------------------- factory / outer

std::unique_ptr<BlockPreconditioner> make_preconditioner(const DiffusionOperator& op,
                                                         const PreconditionerSpec& spec,
                                                         MatvecCounter* setup_counter) {
  validate(spec, op);
  const SpectralBounds bounds = spec.bounds.value_or(extreme_eigenvalues(op));
  switch (spec.kind) {
    case PrecondKind::none: return nullptr;
    case PrecondKind::exact:
      return std::make_unique<ExactPreconditioner>(op, spec.alpha, spec.threads);
    case PrecondKind::nc1:
    case PrecondKind::nc2: {
      const auto kind =
          spec.kind == PrecondKind::nc1 ? AllocationKind::uniform : AllocationKind::weighted;
      auto alloc = allocate_inner_iterations(op.ell(), op.nx(), bounds, spec.alpha, spec.eta, kind);
      return std::make_unique<NestedChebyshevPreconditioner>(op, spec.alpha, std::move(alloc),
                                                             bounds, spec.threads, spec.kind);
    }
    case PrecondKind::sp: {
      const int iters = std::max(1, static_cast<int>(std::floor(op.nx() * spec.eta + 1e-9)));
      return std::make_unique<SaddlePointPreconditioner>(op, spec.alpha, iters, spec.inner_tol,
                                                         spec.inner, spec.mg, setup_counter,
                                                         spec.threads);
    }
  }
  return nullptr;
}

SolveReport solve_outer(const DiffusionOperator& op, const PreconditionerSpec& spec,
                        const BlockVector& b, double tol, int max_outer, MatvecCounter& counter,
                        BlockVector* solution) {
  validate(spec, op);
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
  const BlockSystem sys(op);
  if (b.rows() != op.N() || b.cols() != op.ell())
    throw std::invalid_argument("right-hand side shape does not match the block system");

  SolveReport rep;
  rep.kind = spec.kind;
  const CounterSnapshot start = counter.snapshot();
  const SpectralBounds bounds = spec.bounds.value_or(extreme_eigenvalues(op));
  rep.foci = spec.kind == PrecondKind::none
                 ? Interval{bounds.mu_min, bounds.mu_max}
                 : outer_spectral_bounds(bounds, op.ell(), spec.alpha);

  std::unique_ptr<BlockPreconditioner> prec = make_preconditioner(op, spec, &counter);
  if (auto* nc = dynamic_cast<NestedChebyshevPreconditioner*>(prec.get()))
    rep.allocation = nc->allocation();

  rep.cumulative_matvecs.push_back(0);
  auto apply_sys = [&](const BlockVector& in, BlockVector& out) {
    sys.apply(in, out, &counter);
    rep.cumulative_matvecs.push_back(counter.matvecs() - start.matvecs);
  };
  auto apply_prec = [&](const BlockVector& r, BlockVector& z) {
    if (prec)
      prec->apply(r, z, &counter);
    else
      z = r;
    ++rep.preconditioner_applications;
  };

  ChebyshevConfig cfg;
  cfg.xi_lo = rep.foci.lo;
  cfg.xi_hi = rep.foci.hi;
  cfg.stop = StopRule::tolerance(tol, max_outer);

  BlockVector x;
  try {
    const SolveTrace t = chebyshev_solve(apply_sys, b, x, cfg, apply_prec);
    rep.outer_iterations = t.iterations;
    rep.converged = t.converged;
    rep.residuals = t.residuals;
    rep.final_residual = t.final_residual();
  } catch (const DivergenceError&) {
    rep.outer_iterations = static_cast<int>(rep.cumulative_matvecs.size()) - 1;
    rep.converged = false;
    rep.final_residual = std::numeric_limits<double>::infinity();
  }
  rep.counts = counter.snapshot() - start;
  if (spec.kind == PrecondKind::sp)
    rep.nominal_amg_setups = static_cast<std::int64_t>(op.ell()) * rep.outer_iterations;
  if (prec) rep.inner = prec->stats();
  if (solution) *solution = std::move(x);
  return rep;
}

}  // namespace covdiff
