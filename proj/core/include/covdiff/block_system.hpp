// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "covdiff/diffusion_operator.hpp"

namespace covdiff {

// ell stacked length-N blocks; column j holds block j+1.
using BlockVector = Eigen::MatrixXd;
using ComplexBlockVector = Eigen::MatrixXcd;

enum class RhsDistribution { normal, uniform };

// The all-at-once operator: block 1 is A x_1, block j is A x_j - x_{j-1}.
class BlockSystem {
 public:
  explicit BlockSystem(const DiffusionOperator& op) : op_(&op) {}

  const DiffusionOperator& op() const { return *op_; }
  int ell() const { return op_->ell(); }
  Eigen::Index N() const { return op_->N(); }

  BlockVector apply(const BlockVector& x, MatvecCounter* counter = nullptr) const;
  void apply(const BlockVector& x, BlockVector& out, MatvecCounter* counter) const;

  // Dense I_ell (x) A - S (x) I_N with S the lower shift; small instances only.
  Eigen::MatrixXd dense() const;

 private:
  const DiffusionOperator* op_;
};

BlockVector zero_blocks(Eigen::Index N, int ell);

// b = (b_1, 0, ..., 0). b_1 is drawn from std::mt19937_64 seeded with `seed`:
// standard normal via the Box-Muller transform on pairs of uniform [0,1)
// variates (53-bit, std::generate_canonical), or the uniform variates
// themselves for RhsDistribution::uniform.
BlockVector build_rhs(Eigen::Index N, int ell, std::uint64_t seed,
                      RhsDistribution dist = RhsDistribution::normal);

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed,
                              RhsDistribution dist = RhsDistribution::normal);

// Stacks blocks column-major into one length ell*N vector (block 1 first).
inline Eigen::VectorXd stack(const BlockVector& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}
inline BlockVector unstack(const Eigen::VectorXd& v, Eigen::Index N, int ell) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), N, ell);
}

}  // namespace covdiff
