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

#include "tripart/share.hpp"

#include <algorithm>
#include <string>

#include "tripart/error.hpp"
#include "tripart/kernels.hpp"

namespace tripart {

namespace k = kernels::omp;

void check_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": shape " + shape_str(a) +
                        " does not match " + shape_str(b));
  }
}

std::array<ReplicatedShare, 3> share(RingElement secret, Prg& rng, Ring ring) {
  const RingElement x0 = ring.reduce(rng.next());
  const RingElement x1 = ring.reduce(rng.next());
  const RingElement x2 = ring.sub(ring.sub(secret, x0), x1);
  return {ReplicatedShare{x0, x1}, ReplicatedShare{x1, x2},
          ReplicatedShare{x2, x0}};
}

RingElement reconstruct(const std::array<ReplicatedShare, 3>& s, Ring ring) {
  for (int i = 0; i < 3; ++i) {
    if (ring.reduce(s[i].hi) != ring.reduce(s[(i + 1) % 3].lo)) {
      throw IntegrityError("replication mismatch between party " +
                           std::to_string(i) + " and party " +
                           std::to_string((i + 1) % 3));
    }
  }
  return ring.add(ring.add(s[0].lo, s[1].lo), s[2].lo);
}

std::array<BooleanShare, 3> share_bool(std::uint64_t secret, Prg& rng) {
  const std::uint64_t b0 = rng.next();
  const std::uint64_t b1 = rng.next();
  const std::uint64_t b2 = secret ^ b0 ^ b1;
  return {BooleanShare{b0, b1}, BooleanShare{b1, b2}, BooleanShare{b2, b0}};
}

std::uint64_t reconstruct_bool(const std::array<BooleanShare, 3>& s) {
  for (int i = 0; i < 3; ++i) {
    if (s[i].hi != s[(i + 1) % 3].lo) {
      throw IntegrityError("boolean replication mismatch between party " +
                           std::to_string(i) + " and party " +
                           std::to_string((i + 1) % 3));
    }
  }
  return s[0].lo ^ s[1].lo ^ s[2].lo;
}

ReplicatedShare add_shares(const ReplicatedShare& a, const ReplicatedShare& b,
                           Ring ring) {
  return {ring.add(a.lo, b.lo), ring.add(a.hi, b.hi)};
}

ReplicatedShare sub_shares(const ReplicatedShare& a, const ReplicatedShare& b,
                           Ring ring) {
  return {ring.sub(a.lo, b.lo), ring.sub(a.hi, b.hi)};
}

ReplicatedShare affine_const(const ReplicatedShare& a, RingElement c1,
                             RingElement c3, PartyId party, Ring ring) {
  ReplicatedShare r{ring.mul(a.lo, c1), ring.mul(a.hi, c1)};
  if (party.index == 0) r.lo = ring.add(r.lo, c3);
  if (party.index == 2) r.hi = ring.add(r.hi, c3);
  return r;
}

BooleanShare xor_shares(const BooleanShare& a, const BooleanShare& b) {
  return {a.lo ^ b.lo, a.hi ^ b.hi};
}

void ShareTensor::validate() const {
  const std::size_t n = numel(shape);
  if (lo.size() != n || hi.size() != n) {
    throw ArgumentError("share tensor of shape " + shape_str(shape) +
                        " holds " + std::to_string(lo.size()) + "/" +
                        std::to_string(hi.size()) + " elements");
  }
}

std::array<ShareTensor, 3> share_tensor(const Tensor& secret, Prg& rng,
                                        Ring ring) {
  secret.validate();
  std::array<ShareTensor, 3> out{ShareTensor(secret.shape),
                                 ShareTensor(secret.shape),
                                 ShareTensor(secret.shape)};
  for (std::size_t i = 0; i < secret.size(); ++i) {
    const auto s = share(secret[i], rng, ring);
    for (int p = 0; p < 3; ++p) out[p].set(i, s[p]);
  }
  return out;
}

Tensor reconstruct_tensor(const std::array<ShareTensor, 3>& s, Ring ring) {
  for (int p = 0; p < 3; ++p) {
    s[p].validate();
    check_same_shape(s[p].shape, s[0].shape, "reconstruct");
  }
  Tensor out(s[0].shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = reconstruct({s[0].at(i), s[1].at(i), s[2].at(i)}, ring);
  }
  return out;
}

std::array<BitShare, 3> share_bits(const std::vector<std::uint8_t>& bits,
                                   Prg& rng) {
  std::array<BitShare, 3> out{BitShare(bits.size()), BitShare(bits.size()),
                              BitShare(bits.size())};
  for (std::size_t w = 0; w < out[0].words(); ++w) {
    std::uint64_t word = 0;
    for (std::size_t b = 0; b < 64 && 64 * w + b < bits.size(); ++b) {
      word |= std::uint64_t{bits[64 * w + b] & 1u} << b;
    }
    const auto s = share_bool(word, rng);
    for (int p = 0; p < 3; ++p) {
      out[p].lo[w] = s[p].lo;
      out[p].hi[w] = s[p].hi;
    }
  }
  return out;
}

std::vector<std::uint8_t> reconstruct_bits(const std::array<BitShare, 3>& s) {
  const std::size_t n = s[0].n;
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = i / 64;
    const unsigned b = i % 64;
    std::array<BooleanShare, 3> lane;
    for (int p = 0; p < 3; ++p) {
      lane[p] = {(s[p].lo[w] >> b) & 1, (s[p].hi[w] >> b) & 1};
    }
    out[i] = static_cast<std::uint8_t>(reconstruct_bool(lane));
  }
  return out;
}

ShareTensor add(const ShareTensor& a, const ShareTensor& b, Ring ring) {
  check_same_shape(a.shape, b.shape, "add");
  ShareTensor r(a.shape);
  k::add(a.lo, b.lo, r.lo, ring.mask());
  k::add(a.hi, b.hi, r.hi, ring.mask());
  return r;
}

ShareTensor sub(const ShareTensor& a, const ShareTensor& b, Ring ring) {
  check_same_shape(a.shape, b.shape, "sub");
  ShareTensor r(a.shape);
  k::sub(a.lo, b.lo, r.lo, ring.mask());
  k::sub(a.hi, b.hi, r.hi, ring.mask());
  return r;
}

ShareTensor neg(const ShareTensor& a, Ring ring) {
  return scale(a, ring.neg(1), ring);
}

ShareTensor scale(const ShareTensor& a, RingElement c, Ring ring) {
  ShareTensor r(a.shape);
  k::scale(a.lo, c, r.lo, ring.mask());
  k::scale(a.hi, c, r.hi, ring.mask());
  return r;
}

ShareTensor add_public(const ShareTensor& a, const Tensor& c, PartyId party,
                       Ring ring) {
  check_same_shape(a.shape, c.shape, "add_public");
  ShareTensor r = a;
  if (party.index == 0) k::add(a.lo, c.data, r.lo, ring.mask());
  if (party.index == 2) k::add(a.hi, c.data, r.hi, ring.mask());
  return r;
}

ShareTensor add_const(const ShareTensor& a, RingElement c, PartyId party,
                      Ring ring) {
  ShareTensor r = a;
  if (party.index == 0) {
    for (auto& v : r.lo) v = ring.add(v, c);
  }
  if (party.index == 2) {
    for (auto& v : r.hi) v = ring.add(v, c);
  }
  return r;
}

ShareTensor affine_const(const ShareTensor& a, RingElement c1, RingElement c3,
                         PartyId party, Ring ring) {
  return add_const(scale(a, c1, ring), c3, party, ring);
}

ShareTensor mul_public(const ShareTensor& a, const Tensor& c, Ring ring) {
  check_same_shape(a.shape, c.shape, "mul_public");
  ShareTensor r(a.shape);
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.lo[i] = ring.mul(a.lo[i], c[i]);
    r.hi[i] = ring.mul(a.hi[i], c[i]);
  }
  return r;
}

ShareTensor matmul_public_left(const Tensor& a, const ShareTensor& b,
                               Ring ring) {
  if (a.rank() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0]) {
    throw ArgumentError("matmul_public_left: cannot multiply " +
                        shape_str(a.shape) + " by " + shape_str(b.shape));
  }
  const std::size_t m = a.shape[0], kk = a.shape[1], n = b.shape[1];
  ShareTensor r(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < kk; ++p) {
      const RingElement c = a[i * kk + p];
      for (std::size_t j = 0; j < n; ++j) {
        r.lo[i * n + j] += c * b.lo[p * n + j];
        r.hi[i * n + j] += c * b.hi[p * n + j];
      }
    }
  }
  for (auto& v : r.lo) v = ring.reduce(v);
  for (auto& v : r.hi) v = ring.reduce(v);
  return r;
}

ShareTensor public_share(const Tensor& v, PartyId party) {
  v.validate();
  ShareTensor r(v.shape);
  if (party.index == 0) r.lo = v.data;
  if (party.index == 2) r.hi = v.data;
  return r;
}

ShareTensor reshape(ShareTensor a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw ArgumentError("cannot reshape " + shape_str(a.shape) + " to " +
                        shape_str(shape));
  }
  a.shape = std::move(shape);
  return a;
}

ShareTensor gather(const ShareTensor& a, const std::vector<std::size_t>& index,
                   Shape shape) {
  if (numel(shape) != index.size()) {
    throw ArgumentError("gather: index count does not match shape " +
                        shape_str(shape));
  }
  ShareTensor r(std::move(shape));
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= a.size()) throw ArgumentError("gather: index out of range");
    r.lo[i] = a.lo[index[i]];
    r.hi[i] = a.hi[index[i]];
  }
  return r;
}

ShareTensor transpose2d(const ShareTensor& a) {
  if (a.shape.size() != 2) {
    throw ArgumentError("transpose2d needs a matrix, got " +
                        shape_str(a.shape));
  }
  const std::size_t m = a.shape[0], n = a.shape[1];
  std::vector<std::size_t> idx(m * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) idx[i * m + j] = j * n + i;
  }
  return gather(a, idx, Shape{n, m});
}

ShareTensor concat_flat(const std::vector<const ShareTensor*>& parts) {
  std::size_t total = 0;
  for (const auto* p : parts) total += p->size();
  ShareTensor r(Shape{total});
  std::size_t off = 0;
  for (const auto* p : parts) {
    std::copy(p->lo.begin(), p->lo.end(), r.lo.begin() + off);
    std::copy(p->hi.begin(), p->hi.end(), r.hi.begin() + off);
    off += p->size();
  }
  return r;
}

std::vector<ShareTensor> split_flat(const ShareTensor& a,
                                    const std::vector<Shape>& shapes) {
  std::size_t total = 0;
  for (const auto& s : shapes) total += numel(s);
  if (total != a.size()) {
    throw ArgumentError("split_flat: sizes do not add up to " +
                        std::to_string(a.size()));
  }
  std::vector<ShareTensor> out;
  std::size_t off = 0;
  for (const auto& s : shapes) {
    ShareTensor t(s);
    std::copy_n(a.lo.begin() + off, t.size(), t.lo.begin());
    std::copy_n(a.hi.begin() + off, t.size(), t.hi.begin());
    off += t.size();
    out.push_back(std::move(t));
  }
  return out;
}

ShareTensor sum_last_axis(const ShareTensor& a, Ring ring) {
  if (a.shape.empty()) throw ArgumentError("sum_last_axis on a scalar");
  const std::size_t n = a.shape.back();
  Shape out_shape(a.shape.begin(), a.shape.end() - 1);
  if (out_shape.empty()) out_shape = {1};
  ShareTensor r(out_shape);
  for (std::size_t row = 0; row < r.size(); ++row) {
    RingElement lo = 0, hi = 0;
    for (std::size_t j = 0; j < n; ++j) {
      lo += a.lo[row * n + j];
      hi += a.hi[row * n + j];
    }
    r.lo[row] = ring.reduce(lo);
    r.hi[row] = ring.reduce(hi);
  }
  return r;
}

ShareTensor broadcast_last(const ShareTensor& a, std::size_t n) {
  Shape shape = a.shape;
  shape.push_back(n);
  std::vector<std::size_t> idx(a.size() * n);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i / n;
  return gather(a, idx, std::move(shape));
}

BitShare xor_bits(const BitShare& a, const BitShare& b) {
  if (a.n != b.n) throw ArgumentError("xor_bits: length mismatch");
  BitShare r(a.n);
  for (std::size_t w = 0; w < a.words(); ++w) {
    r.lo[w] = a.lo[w] ^ b.lo[w];
    r.hi[w] = a.hi[w] ^ b.hi[w];
  }
  return r;
}

BitShare not_bits(const BitShare& a, PartyId party) {
  BitShare r = a;
  if (party.index == 0) {
    for (auto& w : r.lo) w = ~w;
  }
  if (party.index == 2) {
    for (auto& w : r.hi) w = ~w;
  }
  return r;
}

namespace {

bool get_bit(const std::vector<std::uint64_t>& v, std::size_t i) {
  return (v[i / 64] >> (i % 64)) & 1;
}

void set_bit(std::vector<std::uint64_t>& v, std::size_t i, bool b) {
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (b) {
    v[i / 64] |= m;
  } else {
    v[i / 64] &= ~m;
  }
}

}  // namespace

BitShare concat_bits(const std::vector<const BitShare*>& parts) {
  std::size_t total = 0;
  for (const auto* p : parts) total += p->n;
  BitShare r(total);
  std::size_t off = 0;
  for (const auto* p : parts) {
    for (std::size_t i = 0; i < p->n; ++i) {
      set_bit(r.lo, off + i, get_bit(p->lo, i));
      set_bit(r.hi, off + i, get_bit(p->hi, i));
    }
    off += p->n;
  }
  return r;
}

BitShare slice_bits(const BitShare& a, std::size_t begin, std::size_t count) {
  if (begin + count > a.n) throw ArgumentError("slice_bits out of range");
  BitShare r(count);
  for (std::size_t i = 0; i < count; ++i) {
    set_bit(r.lo, i, get_bit(a.lo, begin + i));
    set_bit(r.hi, i, get_bit(a.hi, begin + i));
  }
  return r;
}

}  // namespace tripart
