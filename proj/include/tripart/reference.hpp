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

// Exact double-precision versions of every approximated function.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tripart/diffusion.hpp"

namespace tripart::reference {

double exact_exp(double x);
double exact_sigmoid(double x);
double exact_softplus(double x);
double exact_tanh(double x);
double exact_silu(double x);
double exact_mish(double x);
double exact_relu(double x);
double exact_recip(double x);
// Max-subtracted softmax of one vector.
std::vector<double> exact_softmax(const std::vector<double>& x);

struct GridError {
  double mse = 0;
  double max_abs = 0;
  double worst_x = 0;
};

// Compares `approx` against `exact` on n evenly spaced points of [lo, hi].
GridError grid_error(const std::function<double(double)>& approx,
                     const std::function<double(double)>& exact, double lo,
                     double hi, std::size_t n);

enum class Flavor { kExact, kApproximated };
std::string flavor_name(Flavor f);

// Exact nonlinearities, or the plaintext twins of the shared ones (with the
// epsilon the encoding actually subtracts).
PlainOps plain_ops(Flavor flavor, const DenoiserConfig& cfg,
                   const FixedEncoding& enc = {});

// The sampling loop of sample_secure in double precision.
RealTensor run_plain_pipeline(const DenoiserParams& params,
                              const SamplerConfig& cfg, Flavor flavor,
                              const FixedEncoding& enc = {});

}  // namespace tripart::reference
