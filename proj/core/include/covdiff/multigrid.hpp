// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "covdiff/diffusion_operator.hpp"

namespace covdiff {

enum class Smoother { gauss_seidel, jacobi };
enum class CoarseOperator { rediscretized, galerkin };

struct MGOptions {
  Smoother smoother = Smoother::gauss_seidel;
  int pre_sweeps = 1;
  int post_sweeps = 1;
  double jacobi_weight = 0.8;
  // Coarsening stops once a level has at most this many points per side.
  int coarsest_nx = 3;
  CoarseOperator coarse = CoarseOperator::rediscretized;
};

// Geometric V-cycle for A + s I on the grid of a DiffusionOperator.
//
// Coarse grids halve nx ((nx-1)/2 for odd nx, nx/2 for even) and use
// coordinate-based bilinear interpolation P with full-weighting restriction
// (h_f/h_c)^2 P^T. Coarse operators rediscretize the shifted stencil with the
// same nu on the coarse h, or optionally form Galerkin products R A_f P. The
// coarsest level is solved by dense Cholesky. Gauss-Seidel pre-sweeps run in red-black order and
// post-sweeps in the exact reverse order, so one V-cycle is a symmetric
// positive definite linear operator.
class MGHierarchy {
 public:
  MGHierarchy(const DiffusionOperator& op, double shift, MGOptions opts = {},
              MatvecCounter* counter = nullptr);

  double shift() const { return shift_; }
  int levels() const { return static_cast<int>(levels_.size()); }
  int level_nx(int k) const { return levels_.at(k).nx; }
  const RowSparse& level_matrix(int k) const { return levels_.at(k).A; }
  const MGOptions& options() const { return opts_; }

  // z = one V-cycle applied to r from a zero initial guess. Thread-safe.
  void vcycle(const Eigen::VectorXd& r, Eigen::VectorXd& z, MatvecCounter* counter = nullptr) const;
  Eigen::VectorXd vcycle(const Eigen::VectorXd& r, MatvecCounter* counter = nullptr) const;

 private:
  struct Level {
    int nx = 0;
    RowSparse A;
    Eigen::VectorXd inv_diag;
    std::vector<int> order;
    // Interpolation from the next coarser level to this one.
    RowSparse P;
    RowSparse R;
  };

  void cycle(std::size_t k, const Eigen::VectorXd& b, Eigen::VectorXd& x) const;
  void smooth(const Level& lv, const Eigen::VectorXd& b, Eigen::VectorXd& x, int sweeps,
              bool reverse) const;

  double shift_;
  MGOptions opts_;
  std::vector<Level> levels_;
  Eigen::LLT<Eigen::MatrixXd> coarse_;
};

// Next coarser grid size.
int coarsen_nx(int nx);

// 1D linear interpolation from nc to nf interior points of the unit interval.
Eigen::MatrixXd interpolation_1d(int nf, int nc);

}  // namespace covdiff
