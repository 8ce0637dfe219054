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

#include "tripart/kernels.hpp"

#include <algorithm>


namespace tripart::kernels::serial {

void add(In a, In b, Out out, Word mask) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] + b[i]) & mask;
}

void sub(In a, In b, Out out, Word mask) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] - b[i]) & mask;
}

void scale(In a, Word c, Out out, Word mask) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] * c) & mask;
}

void axpy(In a, Word c, Out out, Word mask) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (out[i] + a[i] * c) & mask;
}

void rss_mul_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha, Out out,
                   Word mask) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (x_lo[i] * y_lo[i] + x_hi[i] * y_lo[i] + x_lo[i] * y_hi[i] +
              alpha[i]) &
             mask;
  }
}

// x_lo*(y_lo + y_hi) + x_hi*y_lo, accumulated row by row.
void rss_matmul_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha, Out out,
                      std::size_t m, std::size_t k, std::size_t n, Word mask) {
  const std::size_t rows = m;
  for (std::size_t i = 0; i < rows; ++i) {
    Word* row = out.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] = alpha[i * n + j];
    for (std::size_t p = 0; p < k; ++p) {
      const Word a_lo = x_lo[i * k + p];
      const Word a_hi = x_hi[i * k + p];
      const Word* b_lo = y_lo.data() + p * n;
      const Word* b_hi = y_hi.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] += a_lo * (b_lo[j] + b_hi[j]) + a_hi * b_lo[j];
      }
    }
    for (std::size_t j = 0; j < n; ++j) row[j] &= mask;
  }
}

void bool_and_local(In x_lo, In x_hi, In y_lo, In y_hi, In alpha, Out out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (x_lo[i] & y_lo[i]) ^ (x_hi[i] & y_lo[i]) ^ (x_lo[i] & y_hi[i]) ^
             alpha[i];
  }
}

void gather_bit(In in, unsigned bit, Out packed) {
  const std::size_t words = packed.size();
  const std::size_t n = in.size();
  for (std::size_t w = 0; w < words; ++w) {
    Word acc = 0;
    const std::size_t end = std::min(n, (w + 1) * 64);
    for (std::size_t i = w * 64; i < end; ++i) {
      acc |= ((in[i] >> bit) & 1) << (i - w * 64);
    }
    packed[w] = acc;
  }
}

void matmul_f64(std::span<const double> a, std::span<const double> b,
                std::span<double> out, std::size_t m, std::size_t k,
                std::size_t n) {
  const std::size_t rows = m;
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * n;
    std::fill(row, row + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
}

}  // namespace tripart::kernels::serial
