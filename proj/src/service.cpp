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

#include "tripart/service.hpp"

#include <chrono>
#include <random>

#include "json.hpp"
#include "tripart/baseline.hpp"
#include "tripart/error.hpp"
#include "tripart/harness.hpp"
#include "tripart/nonlinear.hpp"
#include "tripart/prf.hpp"
#include "tripart/rss.hpp"

namespace tripart {
namespace {

using nlohmann::json;

OpSpec unary(std::function<ShareTensor(Party&, const ShareTensor&,
                                       const Config&)> f) {
  return {1, [f](Party& p, const std::vector<ShareTensor>& in,
                 const Config& c) { return f(p, in[0], c); }};
}

OpSpec binary(std::function<ShareTensor(Party&, const ShareTensor&,
                                        const ShareTensor&)> f) {
  return {2, [f](Party& p, const std::vector<ShareTensor>& in,
                 const Config&) { return f(p, in[0], in[1]); }};
}

Bytes text_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
std::string bytes_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

json parse_header(const Bytes& frame, const std::string& what) {
  try {
    return json::parse(bytes_text(frame));
  } catch (const json::exception& e) {
    throw TransportError("malformed " + what + ": " + e.what());
  }
}

Handshake handshake_for(const Config& cfg, std::uint8_t role) {
  Handshake h;
  h.role = role;
  h.config_text = cfg.canonical_text();
  return h;
}

Clock::time_point deadline_from(const Config& cfg) {
  return Clock::now() + cfg.timeout();
}

void send_job(Socket& s, const PartyJob& job, const Config& cfg) {
  json head{{"kind", job.kind}, {"op", job.op}};
  std::vector<const ShareTensor*> frames;
  if (job.kind == "op") {
    head["inputs"] = job.inputs.size();
    for (const auto& t : job.inputs) frames.push_back(&t);
  } else {
    json names = json::array();
    for (const auto& [name, t] : job.params.tensors) {
      names.push_back(name);
      frames.push_back(&t);
    }
    head["params"] = names;
  }
  s.write_frame(text_bytes(head.dump()), deadline_from(cfg));
  for (const auto* t : frames) {
    s.write_frame(encode_share_tensor(*t), deadline_from(cfg));
  }
}

PartyJob receive_job(Socket& s, const Config& cfg) {
  const json head = parse_header(s.read_frame(deadline_from(cfg)), "job");
  PartyJob job;
  try {
    job.kind = head.at("kind").get<std::string>();
    job.op = head.at("op").get<std::string>();
    if (job.kind == "op") {
      const auto n = head.at("inputs").get<std::size_t>();
      for (std::size_t i = 0; i < n; ++i) {
        job.inputs.push_back(
            decode_share_tensor(s.read_frame(deadline_from(cfg))));
      }
    } else if (job.kind == "sample") {
      for (const auto& name : head.at("params")) {
        job.params.tensors[name.get<std::string>()] =
            decode_share_tensor(s.read_frame(deadline_from(cfg)));
      }
    } else {
      throw ArgumentError("unknown job kind '" + job.kind + "'");
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed job header: ") + e.what());
  }
  return job;
}

// The receiving side rebuilds the denoiser shape from the tensor shapes.
void infer_secure_shape(SecureParams& p) {
  DenoiserParams probe;
  for (const auto& [name, t] : p.tensors) probe.tensors[name] = RealTensor(t.shape);
  probe.validate_and_infer();
  p.shape = probe.shape;
}

}  // namespace

const std::map<std::string, OpSpec>& op_registry() {
  static const std::map<std::string, OpSpec> table{
      {"mul", binary([](Party& p, const ShareTensor& a, const ShareTensor& b) {
         return mul(p, a, b);
       })},
      {"fixed_mul",
       binary([](Party& p, const ShareTensor& a, const ShareTensor& b) {
         return fixed_mul(p, a, b);
       })},
      {"softmax", unary([](Party& p, const ShareTensor& x, const Config& c) {
         return secure_softmax(p, x, c.softmax());
       })},
      {"silu", unary([](Party& p, const ShareTensor& x, const Config&) {
         return secure_silu(p, x);
       })},
      {"mish", unary([](Party& p, const ShareTensor& x, const Config&) {
         return secure_mish(p, x);
       })},
      {"relu", unary([](Party& p, const ShareTensor& x, const Config&) {
         return secure_relu(p, x);
       })},
      {"neg_exp", unary([](Party& p, const ShareTensor& x, const Config& c) {
         return neg_exp(p, x, c.softmax().fit);
       })},
      {"baseline-softmax",
       unary([](Party& p, const ShareTensor& x, const Config&) {
         return baseline_softmax(p, x);
       })},
      {"baseline-silu", unary([](Party& p, const ShareTensor& x, const Config&) {
         return baseline_silu(p, x);
       })},
      {"baseline-mish", unary([](Party& p, const ShareTensor& x, const Config&) {
         return baseline_mish(p, x);
       })},
  };
  return table;
}

const OpSpec& find_op(const std::string& name) {
  const auto& reg = op_registry();
  const auto it = reg.find(name);
  if (it == reg.end()) {
    std::string known;
    for (const auto& [k, v] : reg) known += (known.empty() ? "" : ", ") + k;
    throw ArgumentError("unknown protocol '" + name + "' (known: " + known +
                        ")");
  }
  return it->second;
}

Job make_op_job(const Config& cfg, const std::string& op,
                const std::vector<RealTensor>& inputs) {
  const OpSpec& spec = find_op(op);
  if (static_cast<int>(inputs.size()) != spec.arity) {
    throw ArgumentError(op + " takes " + std::to_string(spec.arity) +
                        " inputs, got " + std::to_string(inputs.size()));
  }
  const FixedEncoding enc = cfg.encoding();
  Prg rng(derive_key(cfg.seed, "client-input"));
  Job job;
  for (auto& part : job.parts) {
    part.kind = "op";
    part.op = op;
  }
  for (const auto& in : inputs) {
    auto s = share_tensor(encode_tensor(in, enc), rng, enc.ring());
    for (int i = 0; i < 3; ++i) job.parts[i].inputs.push_back(std::move(s[i]));
  }
  return job;
}

Job make_sample_job(const Config& cfg, const DenoiserParams& params) {
  if (params.shape.pixels != cfg.image_w * cfg.image_h) {
    throw ArgumentError("model has " + std::to_string(params.shape.pixels) +
                        " pixels, image is " + std::to_string(cfg.image_w) +
                        "x" + std::to_string(cfg.image_h));
  }
  auto shared = share_params(params, cfg.encoding(), cfg.seed);
  Job job;
  for (int i = 0; i < 3; ++i) {
    job.parts[i].kind = "sample";
    job.parts[i].params = std::move(shared[i]);
  }
  return job;
}

ShareTensor execute_job(Party& party, const PartyJob& job, const Config& cfg,
                        const StepCallback& progress) {
  if (job.kind == "sample") {
    return sample_secure(party, job.params, cfg.sampler_config(), progress);
  }
  if (job.kind != "op") throw ArgumentError("unknown job kind '" + job.kind + "'");
  const OpSpec& spec = find_op(job.op);
  if (static_cast<int>(job.inputs.size()) != spec.arity) {
    throw ArgumentError(job.op + ": wrong number of inputs");
  }
  return spec.run(party, job.inputs, cfg);
}

JobOutput run_local_job(const Config& cfg, const Job& job,
                        const StepCallback& progress) {
  RunOptions opt{cfg.encoding(), cfg.seed, cfg.timeout()};
  auto run = spawn_local_parties(
      [&](Party& p) {
        StepCallback cb;
        if (p.index() == 0) cb = progress;
        return execute_job(p, job.parts[p.index()], cfg, cb);
      },
      opt);
  JobOutput out;
  out.shares = std::move(run.results);
  out.value = reconstruct_tensor(out.shares, cfg.encoding().ring());
  out.cost = std::move(run.cost);
  return out;
}

LabelCosts run_tcp_party(int id, const Config& cfg, Listener* listener,
                         const StepCallback& progress) {
  PartyLinks links =
      establish_party_links(id, cfg.endpoints(),
                            handshake_for(cfg, static_cast<std::uint8_t>(id)),
                            true, cfg.timeout(), listener);
  Party party(PartyId{id}, cfg.encoding(), *links.channel, cfg.seed);
  party.setup();
  party.meter().reset();
  PartyJob job = receive_job(links.client, cfg);
  if (job.kind == "sample") infer_secure_shape(job.params);
  ShareTensor result;
  try {
    result = execute_job(party, job, cfg, [&](int step, int total) {
      links.client.write_frame(
          text_bytes(json{{"progress", step}, {"total", total}}.dump()),
          deadline_from(cfg));
      if (progress) progress(step, total);
    });
  } catch (const std::exception& e) {
    json status{{"ok", false}, {"error", e.what()}, {"step", -1}};
    if (const auto* pa = dynamic_cast<const ProtocolAbort*>(&e)) {
      status["step"] = pa->step();
    }
    try {
      links.client.write_frame(text_bytes(status.dump()), deadline_from(cfg));
    } catch (const std::exception&) {
    }
    throw;
  }
  const LabelCosts costs = party.meter().by_label();
  links.client.write_frame(
      text_bytes(json{{"ok", true}, {"cost", label_costs_to_json(costs)}}.dump()),
      deadline_from(cfg));
  links.client.write_frame(encode_share_tensor(result), deadline_from(cfg));
  return costs;
}

JobOutput run_tcp_client(const Config& cfg, const Job& job,
                         const StepCallback& progress) {
  std::array<Socket, 3> socks =
      connect_client(cfg.endpoints(), handshake_for(cfg, kClientRole),
                     cfg.timeout());
  for (int i = 0; i < 3; ++i) send_job(socks[i], job.parts[i], cfg);

  JobOutput out;
  std::array<LabelCosts, 3> costs;
  for (int i = 0; i < 3; ++i) {
    for (;;) {
      const json head =
          parse_header(socks[i].read_frame(deadline_from(cfg)), "status");
      if (head.contains("progress")) {
        if (i == 0 && progress) {
          progress(head["progress"].get<int>(), head["total"].get<int>());
        }
        continue;
      }
      if (!head.value("ok", false)) {
        throw ProtocolAbort(i, head.value("error", std::string("unknown")),
                            head.value("step", -1));
      }
      costs[i] = label_costs_from_json(head.at("cost"));
      break;
    }
    out.shares[i] = decode_share_tensor(socks[i].read_frame(deadline_from(cfg)));
  }
  out.value = reconstruct_tensor(out.shares, cfg.encoding().ring());
  out.cost = CostReport::merge(costs);
  return out;
}

std::vector<RealTensor> bench_inputs(const std::string& protocol,
                                     std::size_t n, std::uint64_t seed) {
  const OpSpec& spec = find_op(protocol);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  const bool row = protocol.find("softmax") != std::string::npos;
  std::vector<RealTensor> out;
  for (int k = 0; k < spec.arity; ++k) {
    RealTensor t(row ? Shape{1, n} : Shape{n});
    for (auto& v : t.data) v = d(gen);
    out.push_back(std::move(t));
  }
  return out;
}

BenchResult bench_protocol(const Config& cfg, const std::string& protocol,
                           std::size_t n, int trials) {
  if (trials < 1) throw ArgumentError("trials must be at least 1");
  if (n < 1) throw ArgumentError("size must be at least 1");
  BenchResult r;
  r.protocol = protocol;
  r.size = n;
  r.trials = trials;
  const Job job = make_op_job(cfg, protocol, bench_inputs(protocol, n, cfg.seed));
  for (int k = 0; k < trials; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const JobOutput out = run_local_job(cfg, job);
    const std::chrono::duration<double, std::milli> dt =
        std::chrono::steady_clock::now() - t0;
    r.bytes += static_cast<double>(out.cost.total_bytes());
    r.payload += static_cast<double>(out.cost.total_payload());
    r.messages += static_cast<double>(out.cost.total_messages());
    r.rounds += static_cast<double>(out.cost.rounds);
    r.wall_ms += dt.count();
  }
  for (double* v : {&r.bytes, &r.payload, &r.messages, &r.rounds, &r.wall_ms}) {
    *v /= trials;
  }
  return r;
}

Bytes encode_share_tensor(const ShareTensor& t) {
  t.validate();
  Bytes out(1 + 4 * t.shape.size() + 16 * t.size());
  std::uint8_t* p = out.data();
  *p++ = static_cast<std::uint8_t>(t.shape.size());
  for (auto d : t.shape) {
    put_u32_le(p, static_cast<std::uint32_t>(d));
    p += 4;
  }
  for (auto v : t.lo) {
    put_u64_le(p, v);
    p += 8;
  }
  for (auto v : t.hi) {
    put_u64_le(p, v);
    p += 8;
  }
  return out;
}

ShareTensor decode_share_tensor(const Bytes& b) {
  if (b.empty()) throw TransportError("empty share tensor frame");
  const std::size_t rank = b[0];
  if (b.size() < 1 + 4 * rank) throw TransportError("truncated share tensor");
  Shape shape(rank);
  for (std::size_t i = 0; i < rank; ++i) shape[i] = get_u32_le(&b[1 + 4 * i]);
  const std::size_t n = numel(shape);
  const std::size_t head = 1 + 4 * rank;
  if (b.size() != head + 16 * n) {
    throw TransportError("share tensor frame has " + std::to_string(b.size()) +
                         " bytes, expected " + std::to_string(head + 16 * n));
  }
  ShareTensor t(shape);
  for (std::size_t i = 0; i < n; ++i) {
    t.lo[i] = get_u64_le(&b[head + 8 * i]);
    t.hi[i] = get_u64_le(&b[head + 8 * (n + i)]);
  }
  return t;
}

}  // namespace tripart
