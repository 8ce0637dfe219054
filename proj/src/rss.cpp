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

#include "tripart/rss.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "tripart/error.hpp"
#include "tripart/kernels.hpp"

namespace tripart {

namespace k = kernels::omp;

namespace {

// Sends this party's fresh component to P_{i-1} and receives P_{i+1}'s.
ShareTensor reshare(Party& party, Shape shape, std::vector<RingElement> z) {
  party.send_words(party.id().prev(), z);
  ShareTensor r(std::move(shape));
  r.hi = party.recv_words(party.id().next(), z.size());
  r.lo = std::move(z);
  return r;
}

Bytes pack_bits(const std::vector<std::uint64_t>& words, std::size_t nbits) {
  const Bytes full = pack_words(words);
  return Bytes(full.begin(),
               full.begin() + static_cast<std::ptrdiff_t>((nbits + 7) / 8));
}

std::vector<std::uint64_t> unpack_bits(const Bytes& b, std::size_t nbits,
                                       const Party& party, PartyId from) {
  const std::size_t nbytes = (nbits + 7) / 8;
  if (b.size() != nbytes) {
    throw TransportError("expected " + std::to_string(nbytes) +
                             " bytes of packed bits, got " +
                             std::to_string(b.size()),
                         party.index(), from.index, 0);
  }
  Bytes full((nbits + 63) / 64 * 8, 0);
  std::memcpy(full.data(), b.data(), b.size());
  return unpack_words(full);
}

}  // namespace

ShareTensor mul(Party& party, const ShareTensor& x, const ShareTensor& y) {
  check_same_shape(x.shape, y.shape, "mul");
  auto scope = party.scope("mul");
  const Ring ring = party.ring();
  const auto alpha = party.zsg().arith(x.size(), ring);
  std::vector<RingElement> z(x.size());
  k::rss_mul_local(x.lo, x.hi, y.lo, y.hi, alpha, z, ring.mask());
  return reshare(party, x.shape, std::move(z));
}

ShareTensor matmul(Party& party, const ShareTensor& x, const ShareTensor& y) {
  if (x.shape.size() != 2 || y.shape.size() != 2 ||
      x.shape[1] != y.shape[0]) {
    throw ArgumentError("matmul: cannot multiply " + shape_str(x.shape) +
                        " by " + shape_str(y.shape));
  }
  auto scope = party.scope("matmul");
  const std::size_t m = x.shape[0], kk = x.shape[1], n = y.shape[1];
  const Ring ring = party.ring();
  const auto alpha = party.zsg().arith(m * n, ring);
  std::vector<RingElement> z(m * n);
  k::rss_matmul_local(x.lo, x.hi, y.lo, y.hi, alpha, z, m, kk, n, ring.mask());
  return reshare(party, Shape{m, n}, std::move(z));
}

ShareTensor truncate(Party& party, const ShareTensor& x) {
  return truncate(party, x, party.enc().fraction_bits);
}

ShareTensor truncate(Party& party, const ShareTensor& x, int f) {
  const Ring ring = party.ring();
  const int l = ring.bits;
  if (f < 1 || f > l - 3) {
    throw ArgumentError("cannot truncate " + std::to_string(f) +
                        " bits on a " + std::to_string(l) + "-bit ring");
  }
  auto scope = party.scope("trunc");
  const std::size_t n = x.size();
  const int me = party.index();
  const RingElement bias = RingElement{1} << (l - 2);
  const RingElement top = RingElement{1} << (l - f);
  const RingElement bias_shifted = RingElement{1} << (l - 2 - f);

  // Shifted value x' = x + 2^{l-2} lies in [0, 2^{l-1}). Split it as
  // A = x'_0 + x'_1 (known to P_0) and B = x'_2 (known to P_1 and P_2).
  // [[a]], [[u]]: P_0's bit msb(A) and partial quotient, as (r, val - r, 0).
  // [[b]], [[v]]: msb(B) and B's partial quotient, placed in component 2.
  ShareTensor a_sh(x.shape), u_sh(x.shape), b_sh(x.shape), v_sh(x.shape);
  if (me == 0) {
    auto r = party.zsg().common_with_prev(2 * n);
    std::vector<RingElement> msg(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const RingElement big_a = ring.add(ring.add(x.lo[i], x.hi[i]), bias);
      const RingElement abit = ring.msb(big_a);
      const RingElement u = ring.sub(big_a >> f, abit * top);
      const RingElement ra = ring.reduce(r[2 * i]);
      const RingElement ru = ring.reduce(r[2 * i + 1]);
      a_sh.lo[i] = ra;
      u_sh.lo[i] = ru;
      a_sh.hi[i] = ring.sub(abit, ra);
      u_sh.hi[i] = ring.sub(u, ru);
      msg[2 * i] = a_sh.hi[i];
      msg[2 * i + 1] = u_sh.hi[i];
    }
    party.send_words(PartyId{1}, msg);
  } else if (me == 1) {
    const auto msg = party.recv_words(PartyId{0}, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      a_sh.lo[i] = msg[2 * i];
      u_sh.lo[i] = msg[2 * i + 1];
      const RingElement big_b = x.hi[i];
      const RingElement bbit = ring.msb(big_b);
      b_sh.hi[i] = bbit;
      v_sh.hi[i] =
          ring.sub(ring.sub(big_b >> f, bbit * top), bias_shifted);
    }
  } else {
    auto r = party.zsg().common_with_next(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      a_sh.hi[i] = ring.reduce(r[2 * i]);
      u_sh.hi[i] = ring.reduce(r[2 * i + 1]);
      const RingElement big_b = x.lo[i];
      const RingElement bbit = ring.msb(big_b);
      b_sh.lo[i] = bbit;
      v_sh.lo[i] =
          ring.sub(ring.sub(big_b >> f, bbit * top), bias_shifted);
    }
  }
  const ShareTensor ab = mul(party, a_sh, b_sh);
  // y = u + v - (a + b - ab) 2^{l-f} + a 2^{l-f} + b 2^{l-f}: the a and b
  // corrections already sit in u and v, leaving + ab 2^{l-f}.
  ShareTensor y = add(u_sh, v_sh, ring);
  k::axpy(ab.lo, top, y.lo, ring.mask());
  k::axpy(ab.hi, top, y.hi, ring.mask());
  return y;
}

int extra_coefficient_bits(const FixedEncoding& enc) {
  return std::clamp(enc.total_bits - 10 - 2 * enc.fraction_bits, 0,
                    enc.fraction_bits);
}

RingElement encode_scaled(double c, int bits, Ring ring) {
  return ring.from_signed(std::llround(std::ldexp(c, bits)));
}

ShareTensor public_combination(
    Party& party,
    const std::vector<std::pair<double, const ShareTensor*>>& terms,
    const RealTensor* offset) {
  if (terms.empty()) throw ArgumentError("public_combination needs a term");
  const Ring ring = party.ring();
  const int f = party.enc().fraction_bits;
  const int bits = f + extra_coefficient_bits(party.enc());
  const Shape& shape = terms.front().second->shape;
  ShareTensor acc(shape);
  for (const auto& [c, x] : terms) {
    check_same_shape(x->shape, shape, "public_combination");
    const RingElement ce = encode_scaled(c, bits, ring);
    k::axpy(x->lo, ce, acc.lo, ring.mask());
    k::axpy(x->hi, ce, acc.hi, ring.mask());
  }
  if (offset) {
    if (offset->size() != acc.size()) {
      throw ArgumentError("public_combination: offset has " +
                          std::to_string(offset->size()) + " elements for " +
                          std::to_string(acc.size()));
    }
    Tensor off(shape);
    for (std::size_t i = 0; i < off.size(); ++i) {
      off[i] = encode_scaled((*offset)[i], bits + f, ring);
    }
    acc = add_public(acc, off, party.id(), ring);
  }
  return truncate(party, acc, bits);
}

ShareTensor fixed_mul(Party& party, const ShareTensor& x,
                      const ShareTensor& y) {
  auto scope = party.scope("fixed_mul");
  return truncate(party, mul(party, x, y));
}

ShareTensor fixed_matmul(Party& party, const ShareTensor& x,
                         const ShareTensor& y) {
  auto scope = party.scope("fixed_matmul");
  return truncate(party, matmul(party, x, y));
}

ShareTensor fixed_scale(Party& party, const ShareTensor& x, double c) {
  return truncate(party, scale(x, party.enc().encode(c), party.ring()));
}

Tensor open(Party& party, const ShareTensor& x) {
  auto scope = party.scope("open");
  const Ring ring = party.ring();
  party.send_words(party.id().next(), x.lo);
  const auto missing = party.recv_words(party.id().prev(), x.size());
  Tensor out(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = ring.add(ring.add(x.lo[i], x.hi[i]), missing[i]);
  }
  return out;
}

void and_words(Party& party, std::span<const std::uint64_t> x_lo,
               std::span<const std::uint64_t> x_hi,
               std::span<const std::uint64_t> y_lo,
               std::span<const std::uint64_t> y_hi,
               std::vector<std::uint64_t>& z_lo,
               std::vector<std::uint64_t>& z_hi) {
  const std::size_t n = x_lo.size();
  const auto alpha = party.zsg().boolean(n);
  z_lo.assign(n, 0);
  k::bool_and_local(x_lo, x_hi, y_lo, y_hi, alpha, z_lo);
  party.send_words(party.id().prev(), z_lo);
  z_hi = party.recv_words(party.id().next(), n);
}

BitShare and_bits(Party& party, const BitShare& x, const BitShare& y) {
  if (x.n != y.n) throw ArgumentError("and_bits: length mismatch");
  auto scope = party.scope("and");
  BitShare z(x.n);
  const auto alpha = party.zsg().boolean(x.words());
  k::bool_and_local(x.lo, x.hi, y.lo, y.hi, alpha, z.lo);
  party.send_bytes(party.id().prev(), pack_bits(z.lo, x.n));
  z.hi = unpack_bits(party.recv_bytes(party.id().next()), x.n, party,
                     party.id().next());
  return z;
}

std::vector<std::uint8_t> open_bits(Party& party, const BitShare& b) {
  auto scope = party.scope("open");
  party.send_bytes(party.id().next(), pack_bits(b.lo, b.n));
  const auto missing = unpack_bits(party.recv_bytes(party.id().prev()), b.n,
                                   party, party.id().prev());
  std::vector<std::uint8_t> out(b.n);
  for (std::size_t i = 0; i < b.n; ++i) {
    const std::uint64_t w = b.lo[i / 64] ^ b.hi[i / 64] ^ missing[i / 64];
    out[i] = static_cast<std::uint8_t>((w >> (i % 64)) & 1);
  }
  return out;
}

}  // namespace tripart
