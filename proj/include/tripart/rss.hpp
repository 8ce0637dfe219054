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

// Interactive protocols on replicated shares. Every function here must be
// called by all three parties in the same order with same-shaped inputs.

#pragma once

#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

// Elementwise ring product. P_i sends one element per entry to P_{i-1}.
ShareTensor mul(Party& party, const ShareTensor& x, const ShareTensor& y);

// (m x k) times (k x n) ring product; m*n elements per party.
ShareTensor matmul(Party& party, const ShareTensor& x, const ShareTensor& y);

// Divides by 2^f. Output is floor(x / 2^f) or one less, for every
// |x| < 2^{l-2}. P_0 reshares its half of the value to P_1, then one
// multiplication resolves the wrap-around of the two halves.
ShareTensor truncate(Party& party, const ShareTensor& x);
// Same for an arbitrary shift 1 <= bits <= l - 3.
ShareTensor truncate(Party& party, const ShareTensor& x, int bits);

ShareTensor fixed_mul(Party& party, const ShareTensor& x,
                      const ShareTensor& y);
ShareTensor fixed_matmul(Party& party, const ShareTensor& x,
                         const ShareTensor& y);
// x * c for a public real c, truncated.
ShareTensor fixed_scale(Party& party, const ShareTensor& x, double c);

// Fraction bits beyond f that a public coefficient can carry while
// |coefficient * value| < 2^7 stays inside the truncation range.
int extra_coefficient_bits(const FixedEncoding& enc);
// round(c * 2^bits) as a ring element.
RingElement encode_scaled(double c, int bits, Ring ring);

// sum_i c_i x_i + offset for public reals c_i and an optional public
// offset, with the coefficients at f + extra bits and a single truncation.
ShareTensor public_combination(
    Party& party,
    const std::vector<std::pair<double, const ShareTensor*>>& terms,
    const RealTensor* offset = nullptr);

// Reveals x to every party.
Tensor open(Party& party, const ShareTensor& x);

// Bitwise AND of packed bit vectors; ceil(n/8) bytes per party.
BitShare and_bits(Party& party, const BitShare& x, const BitShare& y);

// Word-level AND of 64-lane boolean shares stored in ring words.
void and_words(Party& party, std::span<const std::uint64_t> x_lo,
               std::span<const std::uint64_t> x_hi,
               std::span<const std::uint64_t> y_lo,
               std::span<const std::uint64_t> y_hi,
               std::vector<std::uint64_t>& z_lo,
               std::vector<std::uint64_t>& z_hi);

std::vector<std::uint8_t> open_bits(Party& party, const BitShare& b);

}  // namespace tripart
