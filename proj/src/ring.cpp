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

#include "tripart/ring.hpp"

#include <cmath>
#include <sstream>

namespace tripart {

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

RingElement ring_add(RingElement a, RingElement b, Ring ring) {
  return ring.add(a, b);
}
RingElement ring_sub(RingElement a, RingElement b, Ring ring) {
  return ring.sub(a, b);
}
RingElement ring_mul(RingElement a, RingElement b, Ring ring) {
  return ring.mul(a, b);
}
RingElement ring_neg(RingElement a, Ring ring) { return ring.neg(a); }

RingElement truncate_local(RingElement x, int fraction_bits, Ring ring) {
  return ring.from_signed(ring.to_signed(x) >> fraction_bits);
}

void FixedEncoding::validate() const {
  if (total_bits < 2 || total_bits > 64) {
    throw ArgumentError("ring_bits must lie in [2, 64], got " +
                        std::to_string(total_bits));
  }
  if (fraction_bits < 1 || 2 * fraction_bits >= total_bits) {
    throw ArgumentError("fraction_bits must satisfy 1 <= f < ring_bits/2, got f=" +
                        std::to_string(fraction_bits) + ", l=" +
                        std::to_string(total_bits));
  }
}

double FixedEncoding::scale() const { return std::ldexp(1.0, fraction_bits); }

double FixedEncoding::max_magnitude() const {
  return std::ldexp(1.0, total_bits - fraction_bits - 1);
}

RingElement FixedEncoding::encode(double r) const {
  if (!std::isfinite(r) || std::fabs(r) >= max_magnitude()) {
    std::ostringstream os;
    os << "value " << r << " outside fixed-point range (|r| < "
       << max_magnitude() << ")";
    throw RangeError(os.str());
  }
  // std::round is half-away-from-zero.
  const double scaled = std::round(std::ldexp(r, fraction_bits));
  return ring().from_signed(static_cast<std::int64_t>(scaled));
}

double FixedEncoding::decode(RingElement x) const {
  return std::ldexp(static_cast<double>(ring().to_signed(x)), -fraction_bits);
}

std::vector<RingElement> FixedEncoding::encode(const std::vector<double>& r) const {
  std::vector<RingElement> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = encode(r[i]);
  return out;
}

std::vector<double> FixedEncoding::decode(const std::vector<RingElement>& x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = decode(x[i]);
  return out;
}

RingElement encode_fixed(double r, const FixedEncoding& enc) {
  return enc.encode(r);
}

double decode_fixed(RingElement x, const FixedEncoding& enc) {
  return enc.decode(x);
}

Tensor encode_tensor(const RealTensor& t, const FixedEncoding& enc) {
  t.validate();
  return Tensor(t.shape, enc.encode(t.data));
}

RealTensor decode_tensor(const Tensor& t, const FixedEncoding& enc) {
  t.validate();
  return RealTensor(t.shape, enc.decode(t.data));
}

}  // namespace tripart
