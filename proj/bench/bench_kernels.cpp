// Copyright 2026 The qqm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "qqm/hspace.hpp"
#include "qqm/kernels.hpp"

namespace {

std::vector<qqm::Quaternion> random_block(std::size_t count, std::uint64_t seed) {
  qqm::Rng rng(seed);
  std::vector<qqm::Quaternion> v(count);
  for (auto& q : v) q = qqm::random_quaternion(rng, false);
  return v;
}

template <auto Kernel>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_block(n * n, 1);
  const auto b = random_block(n * n, 2);
  std::vector<qqm::Quaternion> c(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, n, n, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

template <auto Kernel>
void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_block(n * n, 3);
  const auto v = random_block(n, 4);
  std::vector<qqm::Quaternion> out(n);
  for (auto _ : state) {
    Kernel(a, v, out, n, n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

void BM_Adjoint(benchmark::State& state, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_block(n * n, 5);
  std::vector<qqm::Quaternion> out(n * n);
  for (auto _ : state) {
    if (parallel) {
      qqm::kernels::parallel::adjoint(a, out, n, n);
    } else {
      qqm::kernels::serial::adjoint(a, out, n, n);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_Matmul<qqm::kernels::serial::matmul>)->Name("matmul/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Matmul<qqm::kernels::parallel::matmul>)->Name("matmul/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_Matvec<qqm::kernels::serial::matvec>)->Name("matvec/serial")->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Matvec<qqm::kernels::parallel::matvec>)->Name("matvec/parallel")->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK_CAPTURE(BM_Adjoint, serial, false)->Name("adjoint/serial")->Arg(512);
BENCHMARK_CAPTURE(BM_Adjoint, parallel, true)->Name("adjoint/parallel")->Arg(512);

BENCHMARK_MAIN();
