/* Copyright 2026 The Kerrblock Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Serial reference versus OpenMP kernels on identical inputs.
#include <benchmark/benchmark.h>

#include <vector>

#include "kerrblock/modulation_analysis.hpp"
#include "kerrblock/optimizer.hpp"

using namespace kerrblock;

namespace {

const std::vector<int> kPeriods{20, 40};
const std::vector<double> kChiT{0.2, 0.3};

TrotterScanOptions scan_options() {
  TrotterScanOptions o;
  o.simulation.fixed_dim = 8;
  return o;
}

OptimizationProblem problem() {
  OptimizationProblem p;
  p.config.r = 2;
  p.target_unitary = permutation_gate(3);
  p.duration = 0.2;
  p.kmax = 5;
  p.restarts = 8;
  p.max_iterations = 40;
  p.fidelity_goal = 1.0;  // every restart runs to the iteration cap
  p.verify = false;
  return p;
}

void BM_TrotterScanSerial(benchmark::State& state) {
  BlockadeConfig c;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trotter_error_scan_serial(std::nullopt, kPeriods, kChiT, c, scan_options()));
  }
}

void BM_TrotterScanParallel(benchmark::State& state) {
  BlockadeConfig c;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trotter_error_scan(std::nullopt, kPeriods, kChiT, c, scan_options()));
  }
}

void BM_OptimizeSerial(benchmark::State& state) {
  const OptimizationProblem p = problem();
  for (auto _ : state) benchmark::DoNotOptimize(optimize_serial(p, 1));
}

void BM_OptimizeParallel(benchmark::State& state) {
  const OptimizationProblem p = problem();
  for (auto _ : state) benchmark::DoNotOptimize(optimize(p, 1));
}

}  // namespace

BENCHMARK(BM_TrotterScanSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrotterScanParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OptimizeSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OptimizeParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
