// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/block_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace covdiff {

void BlockSystem::apply(const BlockVector& x, BlockVector& out, MatvecCounter* counter) const {
  const int l = ell();
  if (x.cols() != l || x.rows() != N())
    throw std::invalid_argument("block vector shape does not match the block system");
  out.resize(N(), l);
  for (int j = 0; j < l; ++j) op_->apply(x.col(j).data(), out.col(j).data());
  out.rightCols(l - 1) -= x.leftCols(l - 1);
  count_matvecs(counter, l);
}

BlockVector BlockSystem::apply(const BlockVector& x, MatvecCounter* counter) const {
  BlockVector out;
  apply(x, out, counter);
  return out;
}

Eigen::MatrixXd BlockSystem::dense() const {
  const Eigen::Index n = N();
  const int l = ell();
  const Eigen::MatrixXd A = op_->dense();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * l, n * l);
  for (int j = 0; j < l; ++j) {
    M.block(j * n, j * n, n, n) = A;
    if (j > 0) M.block(j * n, (j - 1) * n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  }
  return M;
}

BlockVector zero_blocks(Eigen::Index N, int ell) { return BlockVector::Zero(N, ell); }

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed, RhsDistribution dist) {
  std::mt19937_64 gen(seed);
  auto unif = [&gen] { return std::generate_canonical<double, 53>(gen); };
  Eigen::VectorXd v(n);
  if (dist == RhsDistribution::uniform) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif();
    return v;
  }
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double u1 = std::max(1.0 - unif(), std::numeric_limits<double>::min());
    const double u2 = unif();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    v[i] = rad * std::cos(ang);
    if (i + 1 < n) v[i + 1] = rad * std::sin(ang);
  }
  return v;
}

BlockVector build_rhs(Eigen::Index N, int ell, std::uint64_t seed, RhsDistribution dist) {
  BlockVector b = BlockVector::Zero(N, ell);
  b.col(0) = random_vector(N, seed, dist);
  return b;
}

}  // namespace covdiff
