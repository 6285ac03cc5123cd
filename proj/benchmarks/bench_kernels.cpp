// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "covdiff/block_system.hpp"
#include "covdiff/circulant.hpp"
#include "covdiff/multigrid.hpp"

using namespace covdiff;

namespace {

void BM_ApplyA(benchmark::State& state) {
  const DiffusionOperator op(static_cast<int>(state.range(0)), 10);
  const Eigen::VectorXd v = random_vector(op.N(), 0);
  Eigen::VectorXd y;
  for (auto _ : state) {
    y = op.apply(v);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * op.N());
}
BENCHMARK(BM_ApplyA)->Arg(100)->Arg(250)->Arg(500);

void BM_BlockApply(benchmark::State& state) {
  const DiffusionOperator op(static_cast<int>(state.range(0)), 10);
  const BlockSystem sys(op);
  const BlockVector x = build_rhs(op.N(), op.ell(), 0);
  BlockVector y;
  for (auto _ : state) {
    sys.apply(x, y, nullptr);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_BlockApply)->Arg(100)->Arg(250);

void BM_Vcycle(benchmark::State& state) {
  const DiffusionOperator op(static_cast<int>(state.range(0)), 10);
  const MGHierarchy h(op, 1.0);
  const Eigen::VectorXd r = random_vector(op.N(), 0);
  Eigen::VectorXd z;
  for (auto _ : state) {
    h.vcycle(r, z);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_Vcycle)->Arg(100)->Arg(255)->Arg(500);

void BM_PreconditionerApply(benchmark::State& state) {
  const DiffusionOperator op(100, 10);
  PreconditionerSpec spec;
  spec.kind = static_cast<PrecondKind>(state.range(0));
  spec.alpha = 0.01;
  auto prec = make_preconditioner(op, spec);
  const BlockVector r = build_rhs(op.N(), op.ell(), 0);
  BlockVector z;
  for (auto _ : state) {
    prec->apply(r, z, nullptr);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetLabel(to_string(spec.kind));
}
BENCHMARK(BM_PreconditionerApply)
    ->Arg(static_cast<int>(PrecondKind::exact))
    ->Arg(static_cast<int>(PrecondKind::nc1))
    ->Arg(static_cast<int>(PrecondKind::nc2))
    ->Arg(static_cast<int>(PrecondKind::sp))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
