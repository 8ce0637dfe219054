// Copyright 2026 The Tripart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tripart/kernels.hpp"

namespace k = tripart::kernels;

namespace {

constexpr k::Word kMask = ~k::Word{0};

std::vector<k::Word> words(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<k::Word> v(n);
  for (auto& w : v) w = gen();
  return v;
}

std::vector<double> reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

template <auto Kernel>
void BM_RssMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = words(n, 1), b = words(n, 2), c = words(n, 3), d = words(n, 4),
             z = words(n, 5);
  std::vector<k::Word> out(n);
  for (auto _ : state) {
    Kernel(a, b, c, d, z, out, kMask);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

template <auto Kernel>
void BM_RssMatmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = words(n * n, 1), b = words(n * n, 2), c = words(n * n, 3),
             d = words(n * n, 4), z = words(n * n, 5);
  std::vector<k::Word> out(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, d, z, out, n, n, n, kMask);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}

template <auto Kernel>
void BM_BoolAnd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = words(n, 1), b = words(n, 2), c = words(n, 3), d = words(n, 4),
             z = words(n, 5);
  std::vector<k::Word> out(n);
  for (auto _ : state) {
    Kernel(a, b, c, d, z, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

template <auto Kernel>
void BM_MatmulF64(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = reals(n * n, 1), b = reals(n * n, 2);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(a, b, out, n, n, n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}

}  // namespace

BENCHMARK(BM_RssMul<k::serial::rss_mul_local>)->Name("rss_mul/serial")->RangeMultiplier(16)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_RssMul<k::omp::rss_mul_local>)->Name("rss_mul/omp")->RangeMultiplier(16)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_RssMatmul<k::serial::rss_matmul_local>)->Name("rss_matmul/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_RssMatmul<k::omp::rss_matmul_local>)->Name("rss_matmul/omp")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_BoolAnd<k::serial::bool_and_local>)->Name("bool_and/serial")->RangeMultiplier(16)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_BoolAnd<k::omp::bool_and_local>)->Name("bool_and/omp")->RangeMultiplier(16)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_MatmulF64<k::serial::matmul_f64>)->Name("matmul_f64/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_MatmulF64<k::omp::matmul_f64>)->Name("matmul_f64/omp")->RangeMultiplier(4)->Range(16, 256);

BENCHMARK_MAIN();
