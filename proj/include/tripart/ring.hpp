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

#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tripart/error.hpp"

namespace tripart {

using RingElement = std::uint64_t;
using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

std::string shape_str(const Shape& shape);

// Z_{2^bits}. Elements are stored in the low `bits` bits of a uint64_t; every
// operation reduces with `mask()`.
struct Ring {
  int bits = 64;

  constexpr RingElement mask() const {
    return bits == 64 ? ~RingElement{0} : ((RingElement{1} << bits) - 1);
  }
  constexpr RingElement reduce(RingElement a) const { return a & mask(); }
  constexpr RingElement add(RingElement a, RingElement b) const {
    return (a + b) & mask();
  }
  constexpr RingElement sub(RingElement a, RingElement b) const {
    return (a - b) & mask();
  }
  constexpr RingElement mul(RingElement a, RingElement b) const {
    return (a * b) & mask();
  }
  constexpr RingElement neg(RingElement a) const { return (0 - a) & mask(); }
  constexpr RingElement msb(RingElement a) const {
    return (a >> (bits - 1)) & 1;
  }
  constexpr std::int64_t to_signed(RingElement a) const {
    a &= mask();
    if (msb(a)) a |= ~mask();  // sign-extend
    return static_cast<std::int64_t>(a);
  }
  constexpr RingElement from_signed(std::int64_t v) const {
    return static_cast<RingElement>(v) & mask();
  }

  bool operator==(const Ring&) const = default;
};

RingElement ring_add(RingElement a, RingElement b, Ring ring = {});
RingElement ring_sub(RingElement a, RingElement b, Ring ring = {});
RingElement ring_mul(RingElement a, RingElement b, Ring ring = {});
RingElement ring_neg(RingElement a, Ring ring = {});

// Arithmetic right shift of the two's-complement interpretation.
RingElement truncate_local(RingElement x, int fraction_bits, Ring ring = {});

// Fixed-point view of the ring: a real r is stored as round(r * 2^f).
struct FixedEncoding {
  int total_bits = 64;
  int fraction_bits = 18;

  // Throws ArgumentError unless 1 <= f, 2f < total_bits <= 64.
  void validate() const;

  Ring ring() const { return Ring{total_bits}; }
  double scale() const;
  // Largest magnitude accepted by encode (exclusive): 2^{l-f-1}.
  double max_magnitude() const;

  // Round half away from zero. Throws RangeError when |r| >= max_magnitude().
  RingElement encode(double r) const;
  double decode(RingElement x) const;

  std::vector<RingElement> encode(const std::vector<double>& r) const;
  std::vector<double> decode(const std::vector<RingElement>& x) const;

  bool operator==(const FixedEncoding&) const = default;
};

RingElement encode_fixed(double r, const FixedEncoding& enc = {});
double decode_fixed(RingElement x, const FixedEncoding& enc = {});

// Row-major dense array. `data.size() == numel(shape)` is checked at
// construction and at every operation boundary that accepts one.
template <class T>
struct NdArray {
  Shape shape;
  std::vector<T> data;

  NdArray() = default;
  explicit NdArray(Shape s) : shape(std::move(s)), data(numel(shape)) {}
  NdArray(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
    validate();
  }

  void validate() const {
    if (numel(shape) != data.size()) {
      throw ArgumentError("tensor shape " + shape_str(shape) + " holds " +
                          std::to_string(numel(shape)) + " elements, got " +
                          std::to_string(data.size()));
    }
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  bool operator==(const NdArray&) const = default;
};

using Tensor = NdArray<RingElement>;
using RealTensor = NdArray<double>;

Tensor encode_tensor(const RealTensor& t, const FixedEncoding& enc);
RealTensor decode_tensor(const Tensor& t, const FixedEncoding& enc);

}  // namespace tripart
