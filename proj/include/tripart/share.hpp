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

// Replicated 2-out-of-3 shares. Party P_i holds components (x_i, x_{i+1})
// of x = x_0 + x_1 + x_2, stored as (lo, hi). Public constants are absorbed
// by component x_0, i.e. by P_0.lo and P_2.hi.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tripart/party.hpp"
#include "tripart/prf.hpp"
#include "tripart/ring.hpp"

namespace tripart {

struct ReplicatedShare {
  RingElement lo = 0;
  RingElement hi = 0;
  bool operator==(const ReplicatedShare&) const = default;
};

// 64 independent boolean lanes shared by XOR.
struct BooleanShare {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  bool operator==(const BooleanShare&) const = default;
};

std::array<ReplicatedShare, 3> share(RingElement secret, Prg& rng,
                                     Ring ring = {});
// Throws IntegrityError when P_i.hi != P_{i+1}.lo for some i.
RingElement reconstruct(const std::array<ReplicatedShare, 3>& shares,
                        Ring ring = {});

std::array<BooleanShare, 3> share_bool(std::uint64_t secret, Prg& rng);
std::uint64_t reconstruct_bool(const std::array<BooleanShare, 3>& shares);

ReplicatedShare add_shares(const ReplicatedShare& a, const ReplicatedShare& b,
                           Ring ring = {});
ReplicatedShare sub_shares(const ReplicatedShare& a, const ReplicatedShare& b,
                           Ring ring = {});
// Share of c1*x + c3 held by `party`.
ReplicatedShare affine_const(const ReplicatedShare& a, RingElement c1,
                             RingElement c3, PartyId party, Ring ring = {});
BooleanShare xor_shares(const BooleanShare& a, const BooleanShare& b);

// One party's view of a shared tensor.
struct ShareTensor {
  Shape shape;
  std::vector<RingElement> lo;
  std::vector<RingElement> hi;

  ShareTensor() = default;
  explicit ShareTensor(Shape s)
      : shape(std::move(s)), lo(numel(shape)), hi(numel(shape)) {}

  std::size_t size() const { return lo.size(); }
  void validate() const;
  ReplicatedShare at(std::size_t i) const { return {lo[i], hi[i]}; }
  void set(std::size_t i, const ReplicatedShare& s) {
    lo[i] = s.lo;
    hi[i] = s.hi;
  }
  bool operator==(const ShareTensor&) const = default;
};

// One party's view of n shared bits, packed 64 per word (bit i of the vector
// is bit i%64 of word i/64). Padding bits are unspecified.
struct BitShare {
  std::size_t n = 0;
  std::vector<std::uint64_t> lo;
  std::vector<std::uint64_t> hi;

  BitShare() = default;
  explicit BitShare(std::size_t bits)
      : n(bits), lo(words_for(bits)), hi(words_for(bits)) {}

  static std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }
  std::size_t words() const { return lo.size(); }
};

std::array<ShareTensor, 3> share_tensor(const Tensor& secret, Prg& rng,
                                        Ring ring = {});
Tensor reconstruct_tensor(const std::array<ShareTensor, 3>& shares,
                          Ring ring = {});
std::array<BitShare, 3> share_bits(const std::vector<std::uint8_t>& bits,
                                   Prg& rng);
std::vector<std::uint8_t> reconstruct_bits(const std::array<BitShare, 3>& s);

// Local linear algebra on one party's shares.
ShareTensor add(const ShareTensor& a, const ShareTensor& b, Ring ring);
ShareTensor sub(const ShareTensor& a, const ShareTensor& b, Ring ring);
ShareTensor neg(const ShareTensor& a, Ring ring);
ShareTensor scale(const ShareTensor& a, RingElement c, Ring ring);
// a + c elementwise for a public tensor of the same shape.
ShareTensor add_public(const ShareTensor& a, const Tensor& c, PartyId party,
                       Ring ring);
ShareTensor add_const(const ShareTensor& a, RingElement c, PartyId party,
                      Ring ring);
ShareTensor affine_const(const ShareTensor& a, RingElement c1, RingElement c3,
                         PartyId party, Ring ring);
// Elementwise product with a public tensor, no truncation.
ShareTensor mul_public(const ShareTensor& a, const Tensor& c, Ring ring);
// (m x k) public times (k x n) shared, no truncation.
ShareTensor matmul_public_left(const Tensor& a, const ShareTensor& b,
                               Ring ring);
// The trivial sharing of a public tensor.
ShareTensor public_share(const Tensor& v, PartyId party);

ShareTensor reshape(ShareTensor a, Shape shape);
// out[i] = a[index[i]]
ShareTensor gather(const ShareTensor& a, const std::vector<std::size_t>& index,
                   Shape shape);
ShareTensor transpose2d(const ShareTensor& a);
// Concatenates flattened tensors; the result is one-dimensional.
ShareTensor concat_flat(const std::vector<const ShareTensor*>& parts);
// Inverse of concat_flat for the given shapes.
std::vector<ShareTensor> split_flat(const ShareTensor& a,
                                    const std::vector<Shape>& shapes);
// Sum over the last axis; result drops that axis (a scalar row becomes [rows]).
ShareTensor sum_last_axis(const ShareTensor& a, Ring ring);
// Repeats each element of `a` n times along a new last axis.
ShareTensor broadcast_last(const ShareTensor& a, std::size_t n);

BitShare xor_bits(const BitShare& a, const BitShare& b);
// a xor 1 on every lane.
BitShare not_bits(const BitShare& a, PartyId party);
BitShare concat_bits(const std::vector<const BitShare*>& parts);
BitShare slice_bits(const BitShare& a, std::size_t begin, std::size_t count);

void check_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace tripart
