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

// Data-parallel inner loops shared by the protocol layer.
//
// Every kernel exists twice with the same signature: `kernels::serial` is the
// plain reference loop and `kernels::omp` is the OpenMP version used by the
// protocols. Ring kernels are integer-exact, so both variants must agree bit
// for bit; the tests and the benchmark target compare them directly.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace tripart::kernels {

using Word = std::uint64_t;
using In = std::span<const Word>;
using Out = std::span<Word>;

#define TRIPART_KERNEL_DECLS                                                  \
  /* out = (a + b) & mask */                                                  \
  void add(In a, In b, Out out, Word mask);                                   \
  void sub(In a, In b, Out out, Word mask);                                   \
  /* out = (a * c) & mask for a public scalar c */                            \
  void scale(In a, Word c, Out out, Word mask);                               \
  /* out += (a * c) & mask */                                                 \
  void axpy(In a, Word c, Out out, Word mask);                                \
  /* Replicated-share cross terms:                                            \
     out = x_lo*y_lo + x_hi*y_lo + x_lo*y_hi + alpha. */                      \
  void rss_mul_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha, Out out,   \
                     Word mask);                                              \
  /* Same cross terms for (m x k) times (k x n) row-major matrices. */        \
  void rss_matmul_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha,         \
                        Out out, std::size_t m, std::size_t k, std::size_t n, \
                        Word mask);                                           \
  /* Boolean cross terms over Z_2, 64 lanes per word. */                      \
  void bool_and_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha, Out out); \
  /* Gathers bit `bit` of every word of `in` into a packed bit vector. */     \
  void gather_bit(In in, unsigned bit, Out packed);                           \
  /* (m x k) times (k x n) in double precision. */                            \
  void matmul_f64(std::span<const double> a, std::span<const double> b,       \
                  std::span<double> out, std::size_t m, std::size_t k,        \
                  std::size_t n);

namespace serial {
TRIPART_KERNEL_DECLS
}  // namespace serial

namespace omp {
TRIPART_KERNEL_DECLS
// Element count below which the OpenMP variants stay single-threaded.
inline constexpr std::size_t kParallelThreshold = 4096;
}  // namespace omp

#undef TRIPART_KERNEL_DECLS

}  // namespace tripart::kernels
