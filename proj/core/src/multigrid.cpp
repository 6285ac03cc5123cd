// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covdiff/spectral.hpp"

namespace covdiff {

int coarsen_nx(int nx) { return nx % 2 == 1 ? (nx - 1) / 2 : nx / 2; }

Eigen::MatrixXd interpolation_1d(int nf, int nc) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nf, nc);
  const double hf = 1.0 / (nf + 1);
  const double hc = 1.0 / (nc + 1);
  for (int k = 0; k < nf; ++k) {
    const double x = (k + 1) * hf;
    for (int i = 0; i < nc; ++i) {
      const double w = 1.0 - std::abs(x - (i + 1) * hc) / hc;
      if (w > 1e-14) P(k, i) = w;
    }
  }
  return P;
}

namespace {

RowSparse prolongation_2d(int nf, int nc) {
  const Eigen::MatrixXd p = interpolation_1d(nf, nc);
  std::vector<std::vector<std::pair<int, double>>> rows(nf);
  for (int k = 0; k < nf; ++k)
    for (int i = 0; i < nc; ++i)
      if (p(k, i) != 0.0) rows[k].emplace_back(i, p(k, i));
  std::vector<Eigen::Triplet<double>> t;
  for (int jf = 0; jf < nf; ++jf)
    for (const auto& [jc, wj] : rows[jf])
      for (int ifn = 0; ifn < nf; ++ifn)
        for (const auto& [ic, wi] : rows[ifn])
          t.emplace_back(ifn + nf * jf, ic + nc * jc, wi * wj);
  RowSparse P(static_cast<Eigen::Index>(nf) * nf, static_cast<Eigen::Index>(nc) * nc);
  P.setFromTriplets(t.begin(), t.end());
  P.makeCompressed();
  return P;
}

std::vector<int> red_black_order(int nx) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(nx) * nx);
  for (int colour = 0; colour < 2; ++colour)
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i)
        if ((i + j) % 2 == colour) order.push_back(i + nx * j);
  return order;
}

}  // namespace

MGHierarchy::MGHierarchy(const DiffusionOperator& op, double shift, MGOptions opts,
                         MatvecCounter* counter)
    : shift_(shift), opts_(opts) {
  auto check_spd = [shift](const DiffusionOperator& o) {
    if (!(extreme_eigenvalues(o).mu_min + shift > 0))
      throw std::invalid_argument("A + sI is not positive definite for this shift");
  };
  check_spd(op);
  if (opts_.coarsest_nx < 1) throw std::invalid_argument("coarsest_nx must be positive");

  Level fine;
  fine.nx = op.nx();
  RowSparse I(op.N(), op.N());
  I.setIdentity();
  fine.A = op.matrix() + shift * I;
  levels_.push_back(std::move(fine));

  while (levels_.back().nx > opts_.coarsest_nx) {
    const int nf = levels_.back().nx;
    const int nc = coarsen_nx(nf);
    if (nc < 1) break;
    Level& f = levels_.back();
    f.P = prolongation_2d(nf, nc);
    const double ratio = double(nc + 1) / double(nf + 1);
    f.R = RowSparse(f.P.transpose()) * (ratio * ratio);
    Level c;
    c.nx = nc;
    if (opts_.coarse == CoarseOperator::galerkin) {
      c.A = RowSparse(f.R * f.A * f.P);
      c.A.prune(0.0);
    } else {
      const auto co = DiffusionOperator::with_nu(nc, op.ell(), op.nu());
      check_spd(co);
      RowSparse Ic(co.N(), co.N());
      Ic.setIdentity();
      c.A = co.matrix() + shift * Ic;
    }
    levels_.push_back(std::move(c));
  }
  for (auto& lv : levels_) {
    lv.inv_diag = lv.A.diagonal().cwiseInverse();
    lv.order = red_black_order(lv.nx);
  }
  coarse_.compute(Eigen::MatrixXd(levels_.back().A));
  if (coarse_.info() != Eigen::Success)
    throw std::invalid_argument("coarsest operator is not positive definite");
  if (counter) counter->add_mg_setups();
}

void MGHierarchy::smooth(const Level& lv, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                         int sweeps, bool reverse) const {
  if (opts_.smoother == Smoother::jacobi) {
    Eigen::VectorXd r(b.size());
    for (int s = 0; s < sweeps; ++s) {
      r.noalias() = b - lv.A * x;
      x += opts_.jacobi_weight * lv.inv_diag.cwiseProduct(r);
    }
    return;
  }
  const int* outer = lv.A.outerIndexPtr();
  const int* inner = lv.A.innerIndexPtr();
  const double* val = lv.A.valuePtr();
  const auto n = static_cast<std::ptrdiff_t>(lv.order.size());
  auto relax = [&](int row) {
    double s = b[row];
    for (int p = outer[row]; p < outer[row + 1]; ++p)
      if (inner[p] != row) s -= val[p] * x[inner[p]];
    x[row] = s * lv.inv_diag[row];
  };
  for (int s = 0; s < sweeps; ++s) {
    if (!reverse)
      for (std::ptrdiff_t q = 0; q < n; ++q) relax(lv.order[q]);
    else
      for (std::ptrdiff_t q = n - 1; q >= 0; --q) relax(lv.order[q]);
  }
}

void MGHierarchy::cycle(std::size_t k, const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
  if (k + 1 == levels_.size()) {
    x = coarse_.solve(b);
    return;
  }
  const Level& lv = levels_[k];
  x.setZero(b.size());
  smooth(lv, b, x, opts_.pre_sweeps, false);
  const Eigen::VectorXd rc = lv.R * (b - lv.A * x);
  Eigen::VectorXd ec;
  cycle(k + 1, rc, ec);
  x += lv.P * ec;
  smooth(lv, b, x, opts_.post_sweeps, true);
}

void MGHierarchy::vcycle(const Eigen::VectorXd& r, Eigen::VectorXd& z,
                         MatvecCounter* counter) const {
  if (r.size() != levels_.front().A.rows())
    throw std::invalid_argument("V-cycle input has wrong length");
  cycle(0, r, z);
  if (counter) counter->add_vcycles();
}

Eigen::VectorXd MGHierarchy::vcycle(const Eigen::VectorXd& r, MatvecCounter* counter) const {
  Eigen::VectorXd z;
  vcycle(r, z, counter);
  return z;
}

}  // namespace covdiff
