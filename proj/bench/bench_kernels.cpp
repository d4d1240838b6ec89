// SPDX-License-Identifier: Apache-2.0
//
// Serial versus OpenMP timings for the sampling and restart loops. The first
// benchmark argument selects the policy: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include "posmap/choi.hpp"
#include "posmap/cones.hpp"
#include "posmap/kpos.hpp"

using namespace posmap;

namespace {

ExecutionPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecutionPolicy::serial : ExecutionPolicy::parallel;
}

// The 3x3 Choi map, positive but not decomposable.
LinearMapRep choi_map() {
  return LinearMapRep::from_function(3, 3, [](const ComplexMatrix& x) {
    ComplexMatrix y = -x;
    y(0, 0) += x(0, 0) + x(2, 2);
    y(1, 1) += x(1, 1) + x(0, 0);
    y(2, 2) += x(2, 2) + x(1, 1);
    return y;
  });
}

void BM_block_positivity(benchmark::State& state) {
  const ComplexMatrix h = choi_of_map(choi_map());
  SearchParams params;
  params.restarts = 32;
  params.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(block_positivity(h, 3, 3, params, 7));
}

void BM_sk_check(benchmark::State& state) {
  const LinearMapRep phi = choi_map();
  SampleParams params;
  params.samples = 500;
  params.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sk_check(phi, 2, params, 7));
}

void BM_pk_check(benchmark::State& state) {
  const LinearMapRep phi = choi_map();
  PkParams params;
  params.projections = 16;
  params.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(pk_check(phi, 2, params, 7));
}

void BM_cone_inequalities(benchmark::State& state) {
  ComplexMatrix rho_a = ComplexMatrix::Zero(2, 2);
  rho_a(0, 0) = 0.7;
  rho_a(1, 1) = 0.3;
  const BipartiteConeContext ctx = bipartite_context(rho_a, ComplexMatrix::Identity(2, 2) / 2.0);
  Rng rng(11);
  const ComplexMatrix xi = sample_cone_vector(ctx, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cone_inequalities(ctx, xi, 2000, 7, policy_of(state)));
}

}  // namespace

BENCHMARK(BM_block_positivity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sk_check)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pk_check)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cone_inequalities)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
