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

#include "tripart/primitives.hpp"

#include <cmath>

#include "tripart/error.hpp"
#include "tripart/kernels.hpp"
#include "tripart/rss.hpp"

namespace tripart {

namespace k = kernels::omp;

namespace {

// This party's pair of components of the boolean sharing in which
// component `j` holds `value` and the other two are zero.
struct WordPair {
  std::vector<std::uint64_t> lo, hi;
};

WordPair component_share(const ShareTensor& x, int me, int j) {
  WordPair w{std::vector<std::uint64_t>(x.size(), 0),
             std::vector<std::uint64_t>(x.size(), 0)};
  if (j == me) w.lo = x.lo;
  if (j == (me + 1) % 3) w.hi = x.hi;
  return w;
}

BitShare bit_slice(const std::vector<std::uint64_t>& lo,
                   const std::vector<std::uint64_t>& hi, unsigned bit,
                   std::size_t n) {
  BitShare b(n);
  k::gather_bit(lo, bit, b.lo);
  k::gather_bit(hi, bit, b.hi);
  return b;
}

// Arithmetic sharing of component j of a bit sharing, i.e. of b_j in {0,1}.
ShareTensor bit_component(const BitShare& b, int me, int j, const Shape& shape) {
  ShareTensor r(shape);
  for (std::size_t i = 0; i < b.n; ++i) {
    if (j == me) r.lo[i] = (b.lo[i / 64] >> (i % 64)) & 1;
    if (j == (me + 1) % 3) r.hi[i] = (b.hi[i / 64] >> (i % 64)) & 1;
  }
  return r;
}

}  // namespace

BitShare a2b_msb(Party& party, const ShareTensor& x) {
  auto scope = party.scope("a2b");
  const int me = party.index();
  const Ring ring = party.ring();
  const int l = ring.bits;
  const std::size_t n = x.size();

  const WordPair x0 = component_share(x, me, 0);
  const WordPair x1 = component_share(x, me, 1);
  const WordPair x2 = component_share(x, me, 2);

  // Carry-save layer: x0 + x1 + x2 = s + c with s = x0^x1^x2 and
  // c = maj(x0, x1, x2) << 1, maj = ((x0^x2) & (x1^x2)) ^ x2.
  std::vector<std::uint64_t> s_lo(n), s_hi(n), p_lo(n), p_hi(n), q_lo(n),
      q_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    s_lo[i] = x0.lo[i] ^ x1.lo[i] ^ x2.lo[i];
    s_hi[i] = x0.hi[i] ^ x1.hi[i] ^ x2.hi[i];
    p_lo[i] = x0.lo[i] ^ x2.lo[i];
    p_hi[i] = x0.hi[i] ^ x2.hi[i];
    q_lo[i] = x1.lo[i] ^ x2.lo[i];
    q_hi[i] = x1.hi[i] ^ x2.hi[i];
  }
  std::vector<std::uint64_t> m_lo, m_hi;
  and_words(party, p_lo, p_hi, q_lo, q_hi, m_lo, m_hi);
  const std::uint64_t mask = ring.mask();
  std::vector<std::uint64_t> c_lo(n), c_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    c_lo[i] = ((m_lo[i] ^ x2.lo[i]) << 1) & mask;
    c_hi[i] = ((m_hi[i] ^ x2.hi[i]) << 1) & mask;
  }

  // Ripple carry over bits 1..l-2; bit 0 of c is zero so the carry into
  // bit 1 is zero as well.
  BitShare carry(n);
  for (int bit = 1; bit <= l - 2; ++bit) {
    const BitShare sb = bit_slice(s_lo, s_hi, bit, n);
    const BitShare cb = bit_slice(c_lo, c_hi, bit, n);
    const BitShare t = and_bits(party, xor_bits(sb, carry), xor_bits(cb, carry));
    carry = xor_bits(t, carry);
  }
  const BitShare sb = bit_slice(s_lo, s_hi, l - 1, n);
  const BitShare cb = bit_slice(c_lo, c_hi, l - 1, n);
  return xor_bits(xor_bits(sb, cb), carry);
}

BitShare lt(Party& party, const ShareTensor& x, const ShareTensor& y) {
  auto scope = party.scope("lt");
  return a2b_msb(party, sub(x, y, party.ring()));
}

BitShare lt_const(Party& party, const ShareTensor& x, RingElement c) {
  auto scope = party.scope("lt");
  const Ring ring = party.ring();
  return a2b_msb(party, add_const(x, ring.neg(c), party.id(), ring));
}

BitShare gt_const(Party& party, const ShareTensor& x, RingElement c) {
  auto scope = party.scope("lt");
  const Ring ring = party.ring();
  return a2b_msb(party, add_const(neg(x, ring), c, party.id(), ring));
}

ShareTensor b2a(Party& party, const BitShare& b, Shape shape) {
  if (numel(shape) != b.n) throw ArgumentError("b2a: shape does not match bits");
  auto scope = party.scope("b2a");
  const Ring ring = party.ring();
  const int me = party.index();
  const ShareTensor b0 = bit_component(b, me, 0, shape);
  const ShareTensor b1 = bit_component(b, me, 1, shape);
  const ShareTensor b2 = bit_component(b, me, 2, shape);
  // xor(u, v) = u + v - 2uv, applied twice.
  const ShareTensor p = mul(party, b0, b1);
  const ShareTensor c = sub(add(b0, b1, ring), scale(p, 2, ring), ring);
  const ShareTensor q = mul(party, c, b2);
  return sub(add(c, b2, ring), scale(q, 2, ring), ring);
}

ShareTensor mul_ba(Party& party, const BitShare& b, const ShareTensor& x) {
  if (b.n != x.size()) {
    throw ArgumentError("mul_ba: " + std::to_string(b.n) + " bits for " +
                        std::to_string(x.size()) + " values");
  }
  auto scope = party.scope("mul_ba");
  const Ring ring = party.ring();
  const int me = party.index();
  const ShareTensor b0 = bit_component(b, me, 0, x.shape);
  const ShareTensor b1 = bit_component(b, me, 1, x.shape);
  const ShareTensor b2 = bit_component(b, me, 2, x.shape);

  const ShareTensor left = concat_flat({&b0, &b2});
  const ShareTensor right = concat_flat({&b1, &x});
  const auto prods = split_flat(mul(party, left, right), {x.shape, x.shape});
  const ShareTensor& p = prods[0];  // b0 b1
  const ShareTensor& q = prods[1];  // b2 x
  const ShareTensor c = sub(add(b0, b1, ring), scale(p, 2, ring), ring);
  const ShareTensor w = sub(x, scale(q, 2, ring), ring);
  return add(mul(party, c, w), q, ring);
}

ShareTensor max_last_axis(Party& party, const ShareTensor& x) {
  if (x.shape.empty() || x.shape.back() == 0 || x.size() == 0) {
    throw ArgumentError("max over an empty axis");
  }
  auto scope = party.scope("max");
  const Ring ring = party.ring();
  const std::size_t m0 = x.shape.back();
  const std::size_t rows = x.size() / m0;
  ShareTensor cur = reshape(x, Shape{rows, m0});
  std::size_t m = m0;
  while (m > 1) {
    const std::size_t h = m / 2;
    std::vector<std::size_t> ia(rows * h), ib(rows * h);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < h; ++j) {
        ia[r * h + j] = r * m + 2 * j;
        ib[r * h + j] = r * m + 2 * j + 1;
      }
    }
    const ShareTensor a = gather(cur, ia, Shape{rows * h});
    const ShareTensor b = gather(cur, ib, Shape{rows * h});
    const ShareTensor d = sub(a, b, ring);
    const BitShare b_lt_a = a2b_msb(party, sub(b, a, ring));
    const ShareTensor mx = add(b, mul_ba(party, b_lt_a, d), ring);
    const std::size_t next = h + (m % 2);
    ShareTensor merged(Shape{rows, next});
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < h; ++j) {
        merged.lo[r * next + j] = mx.lo[r * h + j];
        merged.hi[r * next + j] = mx.hi[r * h + j];
      }
      if (m % 2) {
        merged.lo[r * next + h] = cur.lo[r * m + m - 1];
        merged.hi[r * next + h] = cur.hi[r * m + m - 1];
      }
    }
    cur = std::move(merged);
    m = next;
  }
  Shape out_shape(x.shape.begin(), x.shape.end() - 1);
  if (out_shape.empty()) out_shape = {1};
  return reshape(std::move(cur), out_shape);
}

int recip_iterations(double z_min, double z_max) {
  return static_cast<int>(std::ceil(std::log2(z_max / z_min))) + 6;
}

ShareTensor recip(Party& party, const ShareTensor& z, double z_min,
                  double z_max) {
  if (!(z_min > 0) || !(z_max >= z_min)) {
    throw ArgumentError("recip needs 0 < z_min <= z_max");
  }
  auto scope = party.scope("recip");
  const Ring ring = party.ring();
  const RingElement two = party.enc().encode(2.0);
  const double y0 = 1.0 / z_max;
  const int iters = recip_iterations(z_min, z_max);
  // First step from the public start needs only public scalings.
  ShareTensor e = add_const(neg(fixed_scale(party, z, y0), ring), two,
                            party.id(), ring);
  ShareTensor y = fixed_scale(party, e, y0);
  for (int i = 1; i < iters; ++i) {
    e = add_const(neg(fixed_mul(party, z, y), ring), two, party.id(), ring);
    y = fixed_mul(party, y, e);
  }
  return y;
}

ShareTensor square(Party& party, const ShareTensor& x) {
  auto scope = party.scope("square");
  return fixed_mul(party, x, x);
}

}  // namespace tripart
