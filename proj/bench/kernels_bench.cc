//
// Copyright 2026 The fedlmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <benchmark/benchmark.h>

#include "fedlmm/privacy.h"
#include "fedlmm/rng.h"
#include "fedlmm/simharness.h"
#include "fedlmm/summary.h"
#include "fedlmm/summary_kernels.h"

namespace fedlmm {
namespace {

Execution ExecutionArg(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_CrossProducts(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  Rng rng(1);
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, 7);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.Normal();
    for (int j = 0; j < 7; ++j) X(i, j) = rng.Normal();
  }
  const Execution e = ExecutionArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeCrossProducts(y, X, e));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CrossProducts)
    ->ArgNames({"parallel", "n"})
    ->ArgsProduct({{0, 1}, {1000, 100000, 1000000}});

void BM_PrivatizeAll(benchmark::State& state) {
  const Scenario sc = Scenario::Named("ri-correct",
                                      static_cast<int>(state.range(1)));
  std::vector<SiteSummary> sums;
  for (const SiteData& s : Generate(sc, 3)) sums.push_back(ComputeSummary(s));
  const PrivacyBudget budget = PrivacyBudget::Make(4.0, 1e-4, 2.0);
  const Execution e = ExecutionArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PrivatizeAll(sums, budget, PrivatizationScope::Full(), 9, e));
  }
}
BENCHMARK(BM_PrivatizeAll)
    ->ArgNames({"parallel", "K"})
    ->ArgsProduct({{0, 1}, {200, 2000}});

void BM_EstimationStudy(benchmark::State& state) {
  const Scenario sc = Scenario::Named("ri-correct", 50);
  StudyOptions opt;
  opt.execution = ExecutionArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunEstimationStudy(sc, {4.0}, 8, 11, opt));
  }
}
BENCHMARK(BM_EstimationStudy)
    ->ArgNames({"parallel"})
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);

void BM_ReconstructionCell(benchmark::State& state) {
  const Execution e = ExecutionArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RunReconstructionCell(4, 3, 8.0, 0.01, 64, 13, {}, e));
  }
}
BENCHMARK(BM_ReconstructionCell)
    ->ArgNames({"parallel"})
    ->Arg(0)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fedlmm

BENCHMARK_MAIN();
