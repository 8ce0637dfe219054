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

#include "tripart/reference.hpp"

#include <algorithm>
#include <cmath>

#include "tripart/error.hpp"

namespace tripart::reference {

double exact_exp(double x) { return std::exp(x); }

double exact_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double exact_softplus(double x) {
  return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0);
}

double exact_tanh(double x) { return std::tanh(x); }

double exact_silu(double x) { return x * exact_sigmoid(x); }

double exact_mish(double x) { return x * std::tanh(exact_softplus(x)); }

double exact_relu(double x) { return x > 0 ? x : 0.0; }

double exact_recip(double x) { return 1.0 / x; }

std::vector<double> exact_softmax(const std::vector<double>& x) {
  if (x.empty()) throw ArgumentError("softmax of an empty vector");
  const double m = *std::max_element(x.begin(), x.end());
  std::vector<double> y(x.size());
  double sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - m);
    sum += y[i];
  }
  for (auto& v : y) v /= sum;
  return y;
}

GridError grid_error(const std::function<double(double)>& approx,
                     const std::function<double(double)>& exact, double lo,
                     double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw ArgumentError("grid needs n >= 2 and lo < hi");
  GridError g;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    const double d = approx(x) - exact(x);
    g.mse += d * d;
    if (std::fabs(d) > g.max_abs) {
      g.max_abs = std::fabs(d);
      g.worst_x = x;
    }
  }
  g.mse /= static_cast<double>(n);
  return g;
}

std::string flavor_name(Flavor f) {
  return f == Flavor::kExact ? "exact" : "approximated";
}

PlainOps plain_ops(Flavor flavor, const DenoiserConfig& cfg,
                   const FixedEncoding& enc) {
  PlainOps ops;
  if (flavor == Flavor::kExact) {
    switch (cfg.activation) {
      case Activation::kReLU:
        ops.activation = exact_relu;
        break;
      case Activation::kSiLU:
        ops.activation = exact_silu;
        break;
      case Activation::kMish:
        ops.activation = exact_mish;
        break;
    }
    ops.time_activation = exact_silu;
    ops.softmax = exact_softmax;
    return ops;
  }
  if (cfg.activation == Activation::kReLU) {
    ops.activation = approx_relu;
  } else {
    const auto fit = PiecewiseActivationFit::for_activation(cfg.activation);
    ops.activation = [fit](double x) { return approx_activation(x, fit); };
  }
  ops.time_activation = approx_silu;
  SoftMaxConfig sm = cfg.softmax;
  sm.epsilon = effective_epsilon(sm.epsilon, enc);
  ops.softmax = [sm](const std::vector<double>& x) {
    return approx_softmax(x, sm);
  };
  return ops;
}

RealTensor run_plain_pipeline(const DenoiserParams& params,
                              const SamplerConfig& cfg, Flavor flavor,
                              const FixedEncoding& enc) {
  return sample_plain(params, cfg, plain_ops(flavor, cfg.denoiser, enc));
}

}  // namespace tripart::reference
