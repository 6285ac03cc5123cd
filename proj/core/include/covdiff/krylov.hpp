// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covdiff/solver_types.hpp"

namespace covdiff {

// Preconditioned conjugate gradients for a Hermitian positive definite `op`
// and preconditioner, zero initial guess. Stops on the recursively updated
// unpreconditioned relative residual. One `op` and one `prec` per iteration.
template <class Vec, class Op, class Prec = IdentityPrecond>
SolveTrace pcg_solve(const Op& op, const Vec& b, Vec& x, const StopRule& stop,
                     const Prec& prec = Prec{}) {
  SolveTrace trace;
  x = Vec::Zero(b.rows(), b.cols());
  trace.residuals.push_back(1.0);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    trace.converged = true;
    return trace;
  }
  Vec r = b;
  Vec z;
  prec(r, z);
  Vec p = z;
  Vec q;
  double rz = std::real(r.dot(z));
  for (int k = 1; k <= stop.max_iterations; ++k) {
    op(p, q);
    const double pq = std::real(p.dot(q));
    if (!(pq > 0.0)) throw BreakdownError("CG: non-positive curvature, operator is not SPD");
    const double a = rz / pq;
    x += a * p;
    r -= a * q;
    trace.iterations = k;
    const double res = r.norm() / bnorm;
    trace.residuals.push_back(res);
    if (!stop.fixed && res < stop.tol) {
      trace.converged = true;
      break;
    }
    if (k == stop.max_iterations) break;
    prec(r, z);
    const double rz_next = std::real(r.dot(z));
    if (!(rz_next > 0.0)) {
      if (rz_next == 0.0) {
        trace.converged = true;
        break;
      }
      throw BreakdownError("CG: preconditioner is not positive definite");
    }
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return trace;
}

// Preconditioned MINRES (Paige-Saunders) for a real symmetric, possibly
// indefinite `op` with an SPD preconditioner, zero initial guess. The trace
// holds the preconditioned residual norm relative to its initial value, which
// is non-increasing. One `op` and one `prec` per iteration.
template <class Vec, class Op, class Prec = IdentityPrecond>
SolveTrace minres_solve(const Op& op, const Vec& b, Vec& x, const StopRule& stop,
                        const Prec& prec = Prec{}) {
  SolveTrace trace;
  x = Vec::Zero(b.rows(), b.cols());
  trace.residuals.push_back(1.0);
  Vec r1 = b;
  Vec y;
  prec(r1, y);
  const double bmb = r1.dot(y);
  if (bmb < 0.0) throw BreakdownError("MINRES: preconditioner is not positive definite");
  const double beta1 = std::sqrt(bmb);
  if (beta1 == 0.0) {
    trace.converged = true;
    return trace;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  Vec r2 = r1;
  Vec v;
  Vec w = Vec::Zero(b.rows(), b.cols());
  Vec w1 = w;
  Vec w2 = w;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  for (int k = 1; k <= stop.max_iterations; ++k) {
    v = y / beta;
    op(v, y);
    if (k >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    prec(r2, y);
    oldb = beta;
    const double bb = r2.dot(y);
    if (bb < 0.0) throw BreakdownError("MINRES: preconditioner is not positive definite");
    beta = std::sqrt(bb);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    trace.iterations = k;
    const double res = phibar / beta1;
    trace.residuals.push_back(res);
    if (!stop.fixed && res < stop.tol) {
      trace.converged = true;
      break;
    }
    if (beta == 0.0) {
      // Invariant subspace found; x is exact.
      trace.converged = true;
      break;
    }
  }
  return trace;
}

}  // namespace covdiff
