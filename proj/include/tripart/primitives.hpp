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

// Comparison, selection, maximum and reciprocal on shares.

#pragma once

#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

// Boolean sharing of the most significant bit of every element.
// One word-level AND layer reduces the three components to two, then a
// bit-sliced ripple-carry chain yields the top bit: l-1 rounds in total.
BitShare a2b_msb(Party& party, const ShareTensor& x);

// 1{x < y}, elementwise, via the sign of x - y.
BitShare lt(Party& party, const ShareTensor& x, const ShareTensor& y);
// 1{x < c} for a public ring constant c.
BitShare lt_const(Party& party, const ShareTensor& x, RingElement c);
// 1{c < x} for a public ring constant c.
BitShare gt_const(Party& party, const ShareTensor& x, RingElement c);

// b * x for a shared bit b and a shared ring value x, exact.
// Two rounds: b0*b1 together with b2*x, then (b0 xor b1) * (x - 2*b2*x).
ShareTensor mul_ba(Party& party, const BitShare& b, const ShareTensor& x);

// Maximum along the last axis by a pairwise tournament, all rows at once.
// The result drops the last axis; a vector yields shape [1].
ShareTensor max_last_axis(Party& party, const ShareTensor& x);

// 1/z for z in [z_min, z_max]: Newton iteration y <- y(2 - zy) from the
// public start 1/z_max, ceil(log2(z_max/z_min)) + 6 iterations.
ShareTensor recip(Party& party, const ShareTensor& z, double z_min,
                  double z_max);

int recip_iterations(double z_min, double z_max);

ShareTensor square(Party& party, const ShareTensor& x);

// Arithmetic sharing of shared bits (values 0/1 in the ring).
ShareTensor b2a(Party& party, const BitShare& b, Shape shape);

}  // namespace tripart
