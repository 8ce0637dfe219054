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

// Comparison baselines for the communication benchmark. The exponential is
// the limit form (1 + x/256)^256 by eight squarings and every division is a
// Newton reciprocal.

#pragma once

#include <vector>

#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

inline constexpr int kLimitExpSquarings = 8;

// Plaintext forms of the same arithmetic.
double limit_exp(double x);
std::vector<double> baseline_softmax_plain(const std::vector<double>& x);
double baseline_silu_plain(double x);
double baseline_mish_plain(double x);

ShareTensor secure_limit_exp(Party& party, const ShareTensor& x);
// Inputs are expected within a few hundred of the row maximum. The
// denominator is reciprocated once per element.
ShareTensor baseline_softmax(Party& party, const ShareTensor& x);
ShareTensor baseline_silu(Party& party, const ShareTensor& x);
ShareTensor baseline_mish(Party& party, const ShareTensor& x);

}  // namespace tripart
