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

#include <random>
#include <vector>

#include "doctest.h"
#include "tripart/kernels.hpp"

using namespace tripart::kernels;

namespace {

std::vector<Word> random_words(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Word> v(n);
  for (auto& w : v) w = gen();
  return v;
}

constexpr Word kMask = ~Word{0};

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  for (std::size_t n : {std::size_t{1}, std::size_t{63}, std::size_t{5000},
                        std::size_t{20000}}) {
    CAPTURE(n);
    const auto a = random_words(n, 1), b = random_words(n, 2),
               c = random_words(n, 3), d = random_words(n, 4),
               e = random_words(n, 5);
    std::vector<Word> s(n), o(n);

    serial::add(a, b, s, kMask);
    omp::add(a, b, o, kMask);
    CHECK(s == o);
    serial::sub(a, b, s, 0xFFFFFFFF);
    omp::sub(a, b, o, 0xFFFFFFFF);
    CHECK(s == o);
    serial::scale(a, 12345, s, kMask);
    omp::scale(a, 12345, o, kMask);
    CHECK(s == o);
    s = c;
    o = c;
    serial::axpy(a, 777, s, kMask);
    omp::axpy(a, 777, o, kMask);
    CHECK(s == o);
    serial::rss_mul_local(a, b, c, d, e, s, kMask);
    omp::rss_mul_local(a, b, c, d, e, o, kMask);
    CHECK(s == o);
    serial::bool_and_local(a, b, c, d, e, s);
    omp::bool_and_local(a, b, c, d, e, o);
    CHECK(s == o);

    std::vector<Word> ps((n + 63) / 64), po((n + 63) / 64);
    serial::gather_bit(a, 63, ps);
    omp::gather_bit(a, 63, po);
    CHECK(ps == po);
  }
}

TEST_CASE("matrix kernels agree") {
  const std::size_t m = 17, k = 64, n = 40;
  const auto xl = random_words(m * k, 6), xh = random_words(m * k, 7),
             yl = random_words(k * n, 8), yh = random_words(k * n, 9),
             al = random_words(m * n, 10);
  std::vector<Word> s(m * n), o(m * n);
  serial::rss_matmul_local(xl, xh, yl, yh, al, s, m, k, n, kMask);
  omp::rss_matmul_local(xl, xh, yl, yh, al, o, m, k, n, kMask);
  CHECK(s == o);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  std::vector<double> a(m * k), b(k * n), fs(m * n), fo(m * n);
  for (auto& v : a) v = nd(gen);
  for (auto& v : b) v = nd(gen);
  serial::matmul_f64(a, b, fs, m, k, n);
  omp::matmul_f64(a, b, fo, m, k, n);
  CHECK(fs == fo);
}

TEST_CASE("rss_mul_local computes the replicated cross terms") {
  const std::vector<Word> xl{3}, xh{5}, yl{7}, yh{11}, al{13};
  std::vector<Word> out(1);
  serial::rss_mul_local(xl, xh, yl, yh, al, out, kMask);
  CHECK(out[0] == 3 * 7 + 5 * 7 + 3 * 11 + 13);
}

TEST_CASE("gather_bit packs one bit per element") {
  const std::vector<Word> in{1, 0, 3, 2};
  std::vector<Word> packed(1);
  serial::gather_bit(in, 0, packed);
  CHECK(packed[0] == 0b0101);
  serial::gather_bit(in, 1, packed);
  CHECK(packed[0] == 0b1100);
}
