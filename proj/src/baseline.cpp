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

#include "tripart/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "tripart/error.hpp"
#include "tripart/primitives.hpp"
#include "tripart/rss.hpp"

namespace tripart {
namespace {

constexpr double kLimitBase = 256.0;

// Sign bit s = [x < 0], |x| and w = exp(-|x|) in limit form.
struct SignSplit {
  BitShare s;
  ShareTensor w;
};

SignSplit split_sign(Party& party, const ShareTensor& x) {
  const Ring ring = party.ring();
  BitShare s = a2b_msb(party, x);
  const ShareTensor sx = mul_ba(party, s, x);
  const ShareTensor abs_x = sub(x, scale(sx, 2, ring), ring);
  return {std::move(s), secure_limit_exp(party, neg(abs_x, ring))};
}

// a + s (b - a)
ShareTensor select(Party& party, const BitShare& s, const ShareTensor& a,
                   const ShareTensor& b) {
  const Ring ring = party.ring();
  return add(a, mul_ba(party, s, sub(b, a, ring)), ring);
}

}  // namespace

double limit_exp(double x) {
  double y = 1.0 + x / kLimitBase;
  for (int i = 0; i < kLimitExpSquarings; ++i) y *= y;
  return y;
}

std::vector<double> baseline_softmax_plain(const std::vector<double>& x) {
  if (x.empty()) throw ArgumentError("softmax over an empty axis");
  const double m = *std::max_element(x.begin(), x.end());
  std::vector<double> e(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    e[i] = limit_exp(x[i] - m);
    s += e[i];
  }
  for (auto& v : e) v /= s;
  return e;
}

double baseline_silu_plain(double x) {
  const double w = limit_exp(-std::abs(x));
  const double num = x < 0 ? w : 1.0;
  return x * num / (1.0 + w);
}

double baseline_mish_plain(double x) {
  const double w = limit_exp(-std::abs(x));
  const double num = x < 0 ? w * w + 2 * w : 1 + 2 * w;
  const double den = x < 0 ? num + 2 : num + 2 * w * w;
  return x * num / den;
}

ShareTensor secure_limit_exp(Party& party, const ShareTensor& x) {
  auto scope = party.scope("limit_exp");
  const Ring ring = party.ring();
  ShareTensor y = add_const(fixed_scale(party, x, 1.0 / kLimitBase),
                            party.enc().encode(1.0), party.id(), ring);
  for (int i = 0; i < kLimitExpSquarings; ++i) y = square(party, y);
  return y;
}

ShareTensor baseline_softmax(Party& party, const ShareTensor& x) {
  if (x.shape.empty() || x.shape.back() == 0) {
    throw ArgumentError("softmax over an empty axis");
  }
  auto scope = party.scope("baseline_softmax");
  const Ring ring = party.ring();
  const std::size_t n = x.shape.back();
  const ShareTensor m = reshape(broadcast_last(max_last_axis(party, x), n),
                                x.shape);
  const ShareTensor e = secure_limit_exp(party, sub(x, m, ring));
  const ShareTensor s =
      reshape(broadcast_last(sum_last_axis(e, ring), n), x.shape);
  return fixed_mul(party, e, recip(party, s, 1.0, static_cast<double>(n)));
}

ShareTensor baseline_silu(Party& party, const ShareTensor& x) {
  auto scope = party.scope("baseline_silu");
  const Ring ring = party.ring();
  const PartyId me = party.id();
  const FixedEncoding& enc = party.enc();
  const auto [s, w] = split_sign(party, x);
  const ShareTensor one = add_const(ShareTensor(x.shape), enc.encode(1.0), me,
                                    ring);
  const ShareTensor num = select(party, s, one, w);
  const ShareTensor den = add_const(w, enc.encode(1.0), me, ring);
  const ShareTensor sig = fixed_mul(party, num, recip(party, den, 1.0, 2.0));
  return fixed_mul(party, x, sig);
}

ShareTensor baseline_mish(Party& party, const ShareTensor& x) {
  auto scope = party.scope("baseline_mish");
  const Ring ring = party.ring();
  const PartyId me = party.id();
  const FixedEncoding& enc = party.enc();
  const auto [s, w] = split_sign(party, x);
  const ShareTensor w2 = square(party, w);
  const ShareTensor two_w = scale(w, 2, ring);
  const ShareTensor num_pos = add_const(two_w, enc.encode(1.0), me, ring);
  const ShareTensor den_pos = add(num_pos, scale(w2, 2, ring), ring);
  const ShareTensor num_neg = add(w2, two_w, ring);
  const ShareTensor den_neg = add_const(num_neg, enc.encode(2.0), me, ring);
  const ShareTensor pos = concat_flat({&num_pos, &den_pos});
  const ShareTensor negs = concat_flat({&num_neg, &den_neg});
  const ShareTensor both =
      select(party, concat_bits({&s, &s}), pos, negs);
  const auto parts = split_flat(both, {x.shape, x.shape});
  const ShareTensor& num = parts[0];
  const ShareTensor& den = parts[1];
  const ShareTensor t = fixed_mul(party, num, recip(party, den, 1.0, 5.0));
  return fixed_mul(party, x, t);
}

}  // namespace tripart
