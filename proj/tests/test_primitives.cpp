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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "tripart/primitives.hpp"
#include "tripart/rss.hpp"

using namespace tripart;
using namespace tripart::testing;

namespace {

std::array<BitShare, 3> deal_bits(const std::vector<std::uint8_t>& bits,
                                  std::uint64_t seed) {
  Prg rng = dealer(seed);
  return share_bits(bits, rng);
}

template <class F>
std::vector<std::uint8_t> secure_bits(F&& f, const Tensor& v,
                                      std::uint64_t seed = 41) {
  return reconstruct_bits(run_unary(f, v, seed).results);
}

}  // namespace

TEST_CASE("a2b_msb examples") {
  const auto bits = secure_bits(
      [](Party& p, const ShareTensor& x) { return a2b_msb(p, x); },
      encode_all({-1.0, 1.0, 0.0}));
  CHECK(bits == std::vector<std::uint8_t>{1, 0, 0});
}

TEST_CASE("a2b_msb matches the plaintext top bit on random ring values") {
  std::mt19937_64 gen(51);
  Tensor x(Shape{10000});
  for (auto& v : x.data) v = gen();
  x[0] = RingElement{1} << 63;
  x[1] = (RingElement{1} << 63) - 1;
  auto run = run_unary(
      [](Party& p, const ShareTensor& s) { return a2b_msb(p, s); }, x);
  const auto bits = reconstruct_bits(run.results);
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(bits[i] == (x[i] >> 63));
  CHECK(run.cost.rounds == 63);
}

TEST_CASE("a2b_msb on a smaller ring") {
  RunOptions opt;
  opt.enc = FixedEncoding{32, 8};
  const Ring ring = opt.enc.ring();
  std::mt19937_64 gen(52);
  Tensor x(Shape{2000});
  for (auto& v : x.data) v = ring.reduce(gen());
  auto run = run_unary(
      [](Party& p, const ShareTensor& s) { return a2b_msb(p, s); }, x, 3, opt);
  const auto bits = reconstruct_bits(run.results);
  for (std::size_t i = 0; i < x.size(); ++i) {
    REQUIRE(bits[i] == ring.msb(x[i]));
  }
}

TEST_CASE("lt examples") {
  const auto a = encode_all({-6.0, 3.0, 1.0});
  const auto b = encode_all({-2.0, 3.0, 0.5});
  const auto sa = deal(a, 1), sb = deal(b, 2);
  auto run = spawn_local_parties(
      [&](Party& p) { return lt(p, sa[p.index()], sb[p.index()]); });
  CHECK(reconstruct_bits(run.results) == std::vector<std::uint8_t>{1, 0, 0});

  // 1{T < x} for x = -20 and T = -14 is zero, so the mask drops the entry.
  const auto masked = secure_bits(
      [](Party& p, const ShareTensor& x) {
        return gt_const(p, x, encode_fixed(-14.0));
      },
      encode_all({-20.0, -13.0, -14.0}));
  CHECK(masked == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("lt is exact on random pairs including one-LSB gaps") {
  std::mt19937_64 gen(53);
  std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{100} << 18),
                                                std::int64_t{100} << 18);
  const std::size_t n = 10000;
  Tensor x(Shape{n}), y(Shape{n});
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t a = d(gen);
    std::int64_t b = d(gen);
    if (i % 4 == 0) b = a + 1;
    if (i % 4 == 1) b = a - 1;
    if (i % 8 == 2) b = a;
    x[i] = static_cast<RingElement>(a);
    y[i] = static_cast<RingElement>(b);
  }
  const auto sx = deal(x, 3), sy = deal(y, 4);
  auto run = spawn_local_parties(
      [&](Party& p) { return lt(p, sx[p.index()], sy[p.index()]); });
  const auto bits = reconstruct_bits(run.results);
  const Ring ring;
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(bits[i] == (ring.to_signed(x[i]) < ring.to_signed(y[i]) ? 1 : 0));
  }
  CHECK(run.cost.sum_prefix("lt/a2b").total_payload() > 0);
}

TEST_CASE("lt_const and gt_const against public constants") {
  const auto x = encode_all({-3.0, 2.0, 2.0 + std::ldexp(1.0, -18), 5.0});
  const RingElement c = encode_fixed(2.0);
  const auto below = secure_bits(
      [&](Party& p, const ShareTensor& s) { return lt_const(p, s, c); }, x);
  const auto above = secure_bits(
      [&](Party& p, const ShareTensor& s) { return gt_const(p, s, c); }, x);
  CHECK(below == std::vector<std::uint8_t>{1, 0, 0, 0});
  CHECK(above == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("comparison rounds do not depend on the batch size") {
  auto rounds = [](std::size_t n) {
    Tensor x(Shape{n});
    for (std::size_t i = 0; i < n; ++i) x[i] = i;
    return run_unary([](Party& p, const ShareTensor& s) { return a2b_msb(p, s); },
                     x)
        .cost.rounds;
  };
  CHECK(rounds(1) == rounds(4096));
}

TEST_CASE("mul_ba examples and exhaustive bits") {
  const auto x = encode_all({7.5, 7.5, -3.25, 0.0});
  const auto b = deal_bits({0, 1, 1, 0}, 7);
  const auto sx = deal(x, 8);
  auto run = spawn_local_parties(
      [&](Party& p) { return mul_ba(p, b[p.index()], sx[p.index()]); });
  const Tensor z = reconstruct_tensor(run.results);
  CHECK(z[0] == 0);
  CHECK(z[1] == encode_fixed(7.5));
  CHECK(z[2] == encode_fixed(-3.25));
  CHECK(z[3] == 0);
  CHECK(run.cost.rounds == 2);

  std::mt19937_64 gen(54);
  const std::size_t n = 2000;
  Tensor v(Shape{n});
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = gen();
    bits[i] = i % 2;
  }
  const auto sb = deal_bits(bits, 9);
  const auto sv = deal(v, 10);
  auto r = spawn_local_parties(
      [&](Party& p) { return mul_ba(p, sb[p.index()], sv[p.index()]); });
  const Tensor out = reconstruct_tensor(r.results);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(out[i] == (bits[i] ? v[i] : 0));
}

TEST_CASE("mul_ba masking is idempotent") {
  std::mt19937_64 gen(55);
  const std::size_t n = 500;
  Tensor v(Shape{n});
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = gen();
    bits[i] = gen() & 1;
  }
  const auto sb = deal_bits(bits, 11);
  const auto sv = deal(v, 12);
  auto run = spawn_local_parties(
      [&](Party& p) { return mul_ba(p, sb[p.index()], sv[p.index()]); });
  auto twice = spawn_local_parties([&](Party& p) {
    const ShareTensor once = mul_ba(p, sb[p.index()], sv[p.index()]);
    return mul_ba(p, sb[p.index()], once);
  });
  CHECK(reconstruct_tensor(run.results) == reconstruct_tensor(twice.results));
}

TEST_CASE("b2a converts shared bits to ring values") {
  std::vector<std::uint8_t> bits(300);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (i * 7 + 3) % 5 < 2;
  const auto sb = deal_bits(bits, 13);
  auto run = spawn_local_parties([&](Party& p) {
    return b2a(p, sb[p.index()], Shape{bits.size()});
  });
  const Tensor z = reconstruct_tensor(run.results);
  for (std::size_t i = 0; i < bits.size(); ++i) REQUIRE(z[i] == bits[i]);
}

TEST_CASE("max examples") {
  auto vmax = [](const std::vector<double>& v) {
    return secure_real(
        [](Party& p, const ShareTensor& s) { return max_last_axis(p, s); }, v);
  };
  CHECK(vmax({1, 2, 3}) == std::vector<double>{3});
  CHECK(vmax({-4.5, -4.5, -4.5, -4.5}) == std::vector<double>{-4.5});
  CHECK(vmax({9}) == std::vector<double>{9});
  CHECK(vmax({2, -1, 8, 8, 0.25}) == std::vector<double>{8});
}

TEST_CASE("max is exact on random vectors of every length up to 64") {
  std::mt19937_64 gen(56);
  std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{100} << 18),
                                                std::int64_t{100} << 18);
  const Ring ring;
  std::size_t vectors = 0;
  for (std::size_t len = 1; len <= 64; ++len) {
    const std::size_t rows = 16;
    Tensor x(Shape{rows, len});
    for (auto& v : x.data) v = static_cast<RingElement>(d(gen));
    // Adjacent near-ties.
    if (len > 1) x[1] = x[0] + 1;
    auto run = run_unary(
        [](Party& p, const ShareTensor& s) { return max_last_axis(p, s); }, x,
        len);
    const Tensor m = reconstruct_tensor(run.results);
    REQUIRE(m.shape == Shape{rows});
    for (std::size_t r = 0; r < rows; ++r) {
      std::int64_t want = ring.to_signed(x[r * len]);
      for (std::size_t j = 1; j < len; ++j) {
        want = std::max(want, ring.to_signed(x[r * len + j]));
      }
      REQUIRE(ring.to_signed(m[r]) == want);
    }
    vectors += rows;
  }
  CHECK(vectors >= 1000);
}

TEST_CASE("max is permutation invariant and logarithmic in rounds") {
  std::vector<double> v{3.5, -1.0, 7.25, 0.0, 7.0, -9.0, 2.0};
  for (int perm = 0; perm < 6; ++perm) {
    std::next_permutation(v.begin(), v.end());
    const auto m = secure_real(
        [](Party& p, const ShareTensor& s) { return max_last_axis(p, s); }, v);
    CHECK(m[0] == 7.25);
  }
  auto rounds = [](std::size_t n) {
    Tensor x(Shape{n});
    for (std::size_t i = 0; i < n; ++i) x[i] = encode_fixed(double(i % 5));
    return run_unary(
               [](Party& p, const ShareTensor& s) { return max_last_axis(p, s); },
               x)
        .cost.rounds;
  };
  // Three tournament levels against six, each comparison plus selection.
  CHECK(rounds(64) == 2 * rounds(8));
  CHECK_THROWS_AS(
      spawn_local_parties([](Party& p) {
        return max_last_axis(p, ShareTensor(Shape{0}));
      }),
      ProtocolAbort);
}

TEST_CASE("recip examples") {
  const double f = std::ldexp(1.0, -14);
  const auto r = secure_real(
      [](Party& p, const ShareTensor& z) { return recip(p, z, 0.9, 64); },
      {1.0, 4.0});
  CHECK(std::fabs(r[0] - 1.0) <= f);
  CHECK(std::fabs(r[1] - 0.25) <= f);
  CHECK(recip_iterations(0.9, 64) == 13);
  CHECK_THROWS_AS(spawn_local_parties([](Party& p) {
                    return recip(p, ShareTensor(Shape{1}), 0.0, 4.0);
                  }),
                  ProtocolAbort);
}

TEST_CASE("recip error over the softmax range") {
  // Relative error 2^{-f+4} holds while 1/z is well above the LSB; beyond
  // that the error is a few LSB of the result.
  const double lsb = std::ldexp(1.0, -18);
  const double rel_tol = std::ldexp(1.0, -14);
  const double abs_tol = 4 * lsb;
  std::vector<double> z;
  for (int i = 0; i < 4096; ++i) z.push_back(0.9 + (64 - 0.9) * i / 4095.0);
  const auto y = secure_real(
      [](Party& p, const ShareTensor& s) { return recip(p, s, 0.9, 64); }, z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zr = decode_fixed(encode_fixed(z[i]));
    REQUIRE(std::fabs(y[i] - 1.0 / zr) <= abs_tol);
    if (zr <= 4.0) REQUIRE(std::fabs(y[i] * zr - 1.0) <= rel_tol);
  }
}

TEST_CASE("square") {
  const double tol = std::ldexp(1.0, -17);
  const auto ex = secure_real(
      [](Party& p, const ShareTensor& s) { return square(p, s); }, {0.0, -3.0});
  CHECK(std::fabs(ex[0]) <= tol);
  CHECK(std::fabs(ex[1] - 9.0) <= tol);

  std::mt19937_64 gen(57);
  std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{50} << 18),
                                                std::int64_t{50} << 18);
  std::vector<double> v(5000);
  for (auto& x : v) x = std::ldexp(double(d(gen)), -18);
  const auto sq = secure_real(
      [](Party& p, const ShareTensor& s) { return square(p, s); }, v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    REQUIRE(std::fabs(sq[i] - v[i] * v[i]) <= tol);
  }
}

TEST_CASE("primitives register their labels") {
  auto run = run_unary(
      [](Party& p, const ShareTensor& s) {
        const ShareTensor m = max_last_axis(p, s);
        return recip(p, square(p, m), 0.5, 16);
      },
      encode_all({1.0, 2.0, 1.5}));
  for (const char* label : {"max", "max/a2b", "max/mul_ba", "recip", "square"}) {
    CAPTURE(label);
    CHECK(run.cost.sum_prefix(label).bytes[0] > 0);
  }
}
