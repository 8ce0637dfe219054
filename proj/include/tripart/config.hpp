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

// Run configuration shared by the client and the three parties.
//
// The file is flat UTF-8 "key = value" lines; blank lines and lines starting
// with '#' are ignored. Unknown keys are errors. The canonical text lists
// every key in sorted order and its CRC-32 is the handshake config hash.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>

#include "tripart/diffusion.hpp"
#include "tripart/net.hpp"
#include "tripart/nonlinear.hpp"
#include "tripart/ring.hpp"

namespace tripart {

struct Config {
  int ring_bits = 64;
  int fraction_bits = 18;
  double t_exp = -14.0;
  // Coefficient file for neg_exp; required when t_exp is not -14.
  std::string exp_coefficients;
  Activation activation = Activation::kSiLU;
  SamplerKind sampler = SamplerKind::kDDIM;
  int steps = 50;
  int schedule_steps = 1000;
  std::uint64_t seed = 7;
  std::size_t image_w = 28;
  std::size_t image_h = 28;
  std::array<std::string, 3> parties{"127.0.0.1:7301", "127.0.0.1:7302",
                                     "127.0.0.1:7303"};
  bool masked_denominator = true;
  int timeout_ms = 30000;

  // Throw ArgumentError naming the key (and `origin`) on a bad line.
  static Config parse(const std::string& text,
                      const std::string& origin = "<config>");
  // IoError when the file cannot be read.
  static Config load(const std::string& path);

  // Applies one key=value assignment with the file's validation rules.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  std::string canonical_text() const;
  std::uint32_t hash() const;

  FixedEncoding encoding() const;
  SoftMaxConfig softmax() const;
  SamplerConfig sampler_config() const;
  std::array<Endpoint, 3> endpoints() const;
  std::chrono::milliseconds timeout() const {
    return std::chrono::milliseconds(timeout_ms);
  }
};

}  // namespace tripart
