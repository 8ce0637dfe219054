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

// Noise schedule, reverse-process steps, the toy denoiser and the sampling
// loop, each in a plaintext and a shared version.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tripart/nonlinear.hpp"
#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

// Index t runs over 1..T; entry 0 holds alpha_bar_0 = 1 and zero betas.
struct NoiseSchedule {
  int steps = 0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  std::vector<double> beta_tilde;

  void check_step(int t) const;
};

// beta linear from 1e-4 to 0.02 inclusive.
NoiseSchedule make_linear_schedule(int steps);

// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise.
RealTensor q_sample(const RealTensor& x0, int t, const RealTensor& noise,
                    const NoiseSchedule& sched);

// Plaintext reverse steps. `noise` is ignored at t = 1.
RealTensor ddpm_step_plain(const RealTensor& x_t, const RealTensor& eps,
                           int t, const RealTensor& noise,
                           const NoiseSchedule& sched);
// Deterministic (eta = 0) step from t to t_prev, 0 <= t_prev < t.
RealTensor ddim_step_plain(const RealTensor& x_t, const RealTensor& eps,
                           int t, int t_prev, const NoiseSchedule& sched);

// Shared reverse steps; the schedule factors and the noise are public and
// the whole update costs one truncation.
ShareTensor ddpm_step(Party& party, const ShareTensor& x_t,
                      const ShareTensor& eps, int t, const RealTensor& noise,
                      const NoiseSchedule& sched);
ShareTensor ddim_step(Party& party, const ShareTensor& x_t,
                      const ShareTensor& eps, int t, int t_prev,
                      const NoiseSchedule& sched);

// Evenly spaced DDIM timesteps 1 + floor(k T / S), k = 0..S-1, ascending.
std::vector<int> ddim_timesteps(int schedule_steps, int sample_steps);

struct DenoiserShape {
  std::size_t pixels = 784;
  std::size_t hidden = 64;
  std::size_t t_dim = 32;
  std::size_t tokens = 4;
  int res_blocks = 2;

  std::size_t token_dim() const { return hidden / tokens; }
  // Expected shape of every named tensor.
  std::map<std::string, Shape> layout() const;
};

// Named float32 tensors as stored in the parameter file.
struct DenoiserParams {
  DenoiserShape shape;
  std::map<std::string, RealTensor> tensors;

  const RealTensor& at(const std::string& name) const;
  // Infers `shape` from the tensors and checks every name and dimension.
  void validate_and_infer();
};

// Seeded small random weights; output layer scaled down.
DenoiserParams init_params(const DenoiserShape& shape, std::uint64_t seed);
DenoiserParams zero_params(const DenoiserShape& shape);

// Parameter file: "CDM1", u32 tensor count, then per tensor u16 name
// length, name, u8 rank, u32 dims, float32 data; trailing CRC-32 of all
// preceding bytes. Little endian throughout.
void save_params(const std::string& path, const DenoiserParams& p);
DenoiserParams load_params(const std::string& path);
std::vector<std::uint8_t> encode_params(const DenoiserParams& p);
DenoiserParams decode_params(const std::vector<std::uint8_t>& bytes,
                             const std::string& origin = "<memory>");

// The nonlinearities a plaintext forward pass uses.
struct PlainOps {
  std::function<double(double)> activation;
  // The time-embedding MLP always uses SiLU.
  std::function<double(double)> time_activation;
  std::function<std::vector<double>(const std::vector<double>&)> softmax;
};

// Plaintext forward pass, x of shape [1, pixels].
RealTensor denoiser_forward_plain(const RealTensor& x, int t,
                                  const DenoiserParams& params,
                                  const PlainOps& ops);

struct SecureParams {
  DenoiserShape shape;
  std::map<std::string, ShareTensor> tensors;

  const ShareTensor& at(const std::string& name) const;
};

struct DenoiserConfig {
  Activation activation = Activation::kSiLU;
  SoftMaxConfig softmax;
};

ShareTensor denoiser_forward(Party& party, const ShareTensor& x, int t,
                             const SecureParams& params,
                             const DenoiserConfig& cfg);

// The model owner's sharing of the parameters, deterministic in `seed`.
std::array<SecureParams, 3> share_params(const DenoiserParams& params,
                                         const FixedEncoding& enc,
                                         std::uint64_t seed);

enum class SamplerKind { kDDPM, kDDIM };
std::string sampler_name(SamplerKind k);
SamplerKind parse_sampler(const std::string& s);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kDDIM;
  int steps = 50;
  // Length of the underlying schedule for DDIM; DDPM uses `steps`.
  int schedule_steps = 1000;
  std::size_t image_w = 28;
  std::size_t image_h = 28;
  std::uint64_t seed = 7;
  DenoiserConfig denoiser;

  void validate() const;
  NoiseSchedule schedule() const;
  // (t, t_prev) pairs in execution order.
  std::vector<std::pair<int, int>> plan() const;
};

// Public randomness of a run: x_T and one noise tensor per DDPM step.
class PublicNoise {
 public:
  PublicNoise(std::uint64_t seed, std::size_t n);
  RealTensor next();

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> dist_;
  std::size_t n_;
};

// Called after each step with the step index (1-based) and the total.
using StepCallback = std::function<void(int, int)>;

RealTensor sample_plain(const DenoiserParams& params, const SamplerConfig& cfg,
                        const PlainOps& ops, const StepCallback& cb = {});

// Returns this party's shares of x_0 (shape [1, pixels]). Failures inside a
// step surface as ProtocolAbort carrying the step index.
ShareTensor sample_secure(Party& party, const SecureParams& params,
                          const SamplerConfig& cfg,
                          const StepCallback& cb = {});

// Clamps to [-1, 1] and maps to 0..255.
std::vector<std::uint8_t> to_grayscale(const std::vector<double>& x);
// Binary P5 image.
void save_pgm(const std::string& path, std::size_t w, std::size_t h,
              const std::vector<std::uint8_t>& pixels);
std::vector<std::uint8_t> load_pgm(const std::string& path, std::size_t& w,
                                   std::size_t& h);
// Raw little-endian float32 values.
void save_raw(const std::string& path, const std::vector<double>& x);
std::vector<double> load_raw(const std::string& path);

}  // namespace tripart
