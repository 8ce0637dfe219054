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

// Jobs: the party programs the command line tool runs, executed either on
// the in-process backend or by three TCP party daemons driven by a client.
//
// Client to party, after the handshake: a JSON header frame naming the job
// and its tensors, then one frame per share tensor. Party to client: any
// number of progress frames, then a JSON status frame and, on success, the
// result share tensor.

#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tripart/config.hpp"
#include "tripart/cost.hpp"
#include "tripart/diffusion.hpp"
#include "tripart/net.hpp"
#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

struct OpSpec {
  int arity = 1;
  std::function<ShareTensor(Party&, const std::vector<ShareTensor>&,
                            const Config&)>
      run;
};

// mul, fixed_mul, softmax, silu, mish, relu, neg_exp, baseline-softmax,
// baseline-silu, baseline-mish.
const std::map<std::string, OpSpec>& op_registry();
// Throws ArgumentError listing the known names.
const OpSpec& find_op(const std::string& name);

// One party's part of a job.
struct PartyJob {
  std::string kind;  // "op" or "sample"
  std::string op;
  std::vector<ShareTensor> inputs;
  SecureParams params;
};

struct Job {
  std::array<PartyJob, 3> parts;
};

// Inputs are fixed-point encoded and dealt from `seed`.
Job make_op_job(const Config& cfg, const std::string& op,
                const std::vector<RealTensor>& inputs);
Job make_sample_job(const Config& cfg, const DenoiserParams& params);

ShareTensor execute_job(Party& party, const PartyJob& job, const Config& cfg,
                        const StepCallback& progress = {});

struct JobOutput {
  std::array<ShareTensor, 3> shares;
  Tensor value;
  CostReport cost;
};

JobOutput run_local_job(const Config& cfg, const Job& job,
                        const StepCallback& progress = {});

// Runs party `id` until its one job completes. `listener` may be pre-bound
// (tests use port 0). Returns the party's traffic.
LabelCosts run_tcp_party(int id, const Config& cfg,
                         Listener* listener = nullptr,
                         const StepCallback& progress = {});
JobOutput run_tcp_client(const Config& cfg, const Job& job,
                         const StepCallback& progress = {});

struct BenchResult {
  std::string protocol;
  std::size_t size = 0;
  int trials = 0;
  // Means over the trials.
  double bytes = 0;
  double payload = 0;
  double messages = 0;
  double rounds = 0;
  double wall_ms = 0;
};

// Seeded uniform inputs in [-5, 5]: one row of n for the softmax variants,
// n values (two tensors for the multiplications) otherwise.
std::vector<RealTensor> bench_inputs(const std::string& protocol,
                                     std::size_t n, std::uint64_t seed);
// Runs `trials` local jobs; ArgumentError for trials < 1 or n < 1.
BenchResult bench_protocol(const Config& cfg, const std::string& protocol,
                           std::size_t n, int trials);

Bytes encode_share_tensor(const ShareTensor& t);
ShareTensor decode_share_tensor(const Bytes& b);

}  // namespace tripart
