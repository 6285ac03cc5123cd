// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "covdiff/block_system.hpp"
#include "covdiff/circulant.hpp"

namespace covdiff {

struct ExperimentConfig {
  int nx = 100;
  int ell = 10;
  double daley_length = 0.2;
  double alpha = 1.0;
  double eta = 0.2;
  PrecondKind kind = PrecondKind::none;
  double tol = 1e-6;
  int max_outer = 5000;
  std::uint64_t seed = 0;
  RhsDistribution rhs = RhsDistribution::normal;
  InnerPrecond inner = InnerPrecond::mg;
  double inner_tol = 1e-6;
  CoarseOperator mg_coarse = CoarseOperator::rediscretized;
  double amg_matvec_equiv = 80.0;
  int threads = 1;

  PreconditionerSpec spec() const;
};

// Throws std::invalid_argument with a readable message.
void validate(const ExperimentConfig& cfg);

struct ReportRow {
  ExperimentConfig config;
  int outer_iterations = 0;
  bool converged = false;
  std::int64_t matvecs = 0;
  std::int64_t mg_setups = 0;
  std::int64_t vcycles = 0;
  std::int64_t nominal_amg_setups = 0;
  double equivalent_matvecs = 0.0;
  double final_residual = 1.0;
  std::vector<int> allocation;
  std::vector<double> residuals;
  std::vector<std::int64_t> cumulative_matvecs;
};

ReportRow run_solve(const ExperimentConfig& cfg);

// A rectangular result with string cells, written as CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& os) const;
};

struct TableOptions {
  // Empty vectors select the desk-scale default for the table.
  std::vector<int> nx;
  std::vector<int> ell;
  std::vector<double> alpha;
  std::vector<double> eta;
  // Run the full sweep of the reference tables instead of the desk default.
  bool full = false;
  // Right-hand side for the inner-count tables 2 and 5; table 2 defaults to
  // uniform entries, everything else follows base.rhs.
  std::optional<RhsDistribution> inner_rhs;
  ExperimentConfig base{};
};

// Table ids 2..8; throws std::invalid_argument otherwise.
Table make_table(int id, const TableOptions& opts);

// Inner Chebyshev iteration counts to reach each tolerance, one column per
// root, for the block problems A - lambda_j I at the given configuration.
std::vector<std::vector<int>> inner_chebyshev_counts(const ExperimentConfig& cfg,
                                                     const std::vector<double>& tolerances);

// Same for the saddle/CG inner solves used by the sp preconditioner.
std::vector<std::vector<int>> inner_sp_counts(const ExperimentConfig& cfg,
                                              const std::vector<double>& tolerances);

Table sweep_alpha(const ExperimentConfig& base, const std::vector<double>& alphas,
                  const std::vector<PrecondKind>& kinds);

// Outer residual trace; with `inner_block` set, the Chebyshev trace of that
// block problem together with the sigma_j^p bound instead.
Table trace_table(const ExperimentConfig& cfg, std::optional<int> inner_block = std::nullopt);

// Reference values quoted for the tables, or nullopt where none exist.
std::optional<int> reference_table2(int tol_exponent, int column);
std::optional<int> reference_table5(int tol_exponent, int column);
struct ReferenceCell {
  int outer;
  std::int64_t matvecs;
  std::int64_t amg = -1;
};
std::optional<ReferenceCell> reference_table3(double alpha, int nx, PrecondKind kind, double eta);
std::optional<ReferenceCell> reference_table4(double alpha, int ell, PrecondKind kind, double eta);
std::optional<ReferenceCell> reference_table6(double alpha, int nx);
std::optional<ReferenceCell> reference_table7(double alpha, int ell);
std::optional<ReferenceCell> reference_table8(int nx, PrecondKind kind);

std::string format_double(double v);

}  // namespace covdiff
