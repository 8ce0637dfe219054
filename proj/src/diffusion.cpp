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

#include "tripart/diffusion.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tripart/error.hpp"
#include "tripart/kernels.hpp"
#include "tripart/prf.hpp"
#include "tripart/rss.hpp"
#include "tripart/transport.hpp"

namespace tripart {

namespace {

void check_same(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": shape " + shape_str(a) +
                        " does not match " + shape_str(b));
  }
}

}  // namespace

void NoiseSchedule::check_step(int t) const {
  if (t < 1 || t > steps) {
    throw ArgumentError("timestep " + std::to_string(t) + " outside 1.." +
                        std::to_string(steps));
  }
}

NoiseSchedule make_linear_schedule(int steps) {
  if (steps < 1) throw ArgumentError("schedule needs at least one step");
  NoiseSchedule s;
  s.steps = steps;
  s.beta.assign(steps + 1, 0.0);
  s.alpha.assign(steps + 1, 1.0);
  s.alpha_bar.assign(steps + 1, 1.0);
  s.beta_tilde.assign(steps + 1, 0.0);
  const double lo = 1e-4, hi = 0.02;
  for (int t = 1; t <= steps; ++t) {
    s.beta[t] = steps == 1 ? lo : lo + (hi - lo) * (t - 1) / (steps - 1);
    s.alpha[t] = 1.0 - s.beta[t];
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
    s.beta_tilde[t] =
        (1.0 - s.alpha_bar[t - 1]) / (1.0 - s.alpha_bar[t]) * s.beta[t];
  }
  return s;
}

RealTensor q_sample(const RealTensor& x0, int t, const RealTensor& noise,
                    const NoiseSchedule& sched) {
  sched.check_step(t);
  check_same(x0.shape, noise.shape, "q_sample");
  const double a = std::sqrt(sched.alpha_bar[t]);
  const double b = std::sqrt(1.0 - sched.alpha_bar[t]);
  RealTensor out(x0.shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a * x0[i] + b * noise[i];
  }
  return out;
}

namespace {

struct DdpmCoef {
  double x, eps, noise;
};

DdpmCoef ddpm_coef(int t, const NoiseSchedule& sched) {
  sched.check_step(t);
  const double inv = 1.0 / std::sqrt(sched.alpha[t]);
  return {inv, -inv * sched.beta[t] / std::sqrt(1.0 - sched.alpha_bar[t]),
          t > 1 ? std::sqrt(sched.beta_tilde[t]) : 0.0};
}

struct DdimCoef {
  double x, eps;
};

DdimCoef ddim_coef(int t, int t_prev, const NoiseSchedule& sched) {
  sched.check_step(t);
  if (t_prev < 0 || t_prev >= t) {
    throw ArgumentError("DDIM needs 0 <= t_prev < t, got t=" +
                        std::to_string(t) + " t_prev=" +
                        std::to_string(t_prev));
  }
  const double ab = sched.alpha_bar[t];
  const double ap = sched.alpha_bar[t_prev];
  // x0 = (x - sqrt(1-ab) eps) / sqrt(ab); x' = sqrt(ap) x0 + sqrt(1-ap) eps
  const double x = std::sqrt(ap / ab);
  const double eps = std::sqrt(1.0 - ap) - std::sqrt(ap) * std::sqrt(1.0 - ab) /
                                               std::sqrt(ab);
  return {x, eps};
}

}  // namespace

RealTensor ddpm_step_plain(const RealTensor& x_t, const RealTensor& eps,
                           int t, const RealTensor& noise,
                           const NoiseSchedule& sched) {
  check_same(x_t.shape, eps.shape, "ddpm_step");
  const DdpmCoef c = ddpm_coef(t, sched);
  if (t > 1) check_same(x_t.shape, noise.shape, "ddpm_step noise");
  RealTensor out(x_t.shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c.x * x_t[i] + c.eps * eps[i] + (t > 1 ? c.noise * noise[i] : 0.0);
  }
  return out;
}

RealTensor ddim_step_plain(const RealTensor& x_t, const RealTensor& eps,
                           int t, int t_prev, const NoiseSchedule& sched) {
  check_same(x_t.shape, eps.shape, "ddim_step");
  const DdimCoef c = ddim_coef(t, t_prev, sched);
  RealTensor out(x_t.shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c.x * x_t[i] + c.eps * eps[i];
  }
  return out;
}

ShareTensor ddpm_step(Party& party, const ShareTensor& x_t,
                      const ShareTensor& eps, int t, const RealTensor& noise,
                      const NoiseSchedule& sched) {
  check_same(x_t.shape, eps.shape, "ddpm_step");
  auto scope = party.scope("ddpm_step");
  const DdpmCoef c = ddpm_coef(t, sched);
  if (t == 1) return public_combination(party, {{c.x, &x_t}, {c.eps, &eps}});
  check_same(x_t.shape, noise.shape, "ddpm_step noise");
  RealTensor offset(noise.shape);
  for (std::size_t i = 0; i < offset.size(); ++i) {
    offset[i] = c.noise * noise[i];
  }
  return public_combination(party, {{c.x, &x_t}, {c.eps, &eps}}, &offset);
}

ShareTensor ddim_step(Party& party, const ShareTensor& x_t,
                      const ShareTensor& eps, int t, int t_prev,
                      const NoiseSchedule& sched) {
  check_same(x_t.shape, eps.shape, "ddim_step");
  auto scope = party.scope("ddim_step");
  const DdimCoef c = ddim_coef(t, t_prev, sched);
  return public_combination(party, {{c.x, &x_t}, {c.eps, &eps}});
}

std::vector<int> ddim_timesteps(int schedule_steps, int sample_steps) {
  if (sample_steps < 1 || sample_steps > schedule_steps) {
    throw ArgumentError("DDIM needs 1 <= steps <= schedule_steps, got " +
                        std::to_string(sample_steps) + " of " +
                        std::to_string(schedule_steps));
  }
  std::vector<int> ts(sample_steps);
  for (int k = 0; k < sample_steps; ++k) {
    ts[k] = 1 + static_cast<int>(static_cast<long long>(k) * schedule_steps /
                                 sample_steps);
  }
  return ts;
}

std::map<std::string, Shape> DenoiserShape::layout() const {
  const std::size_t h = hidden, d = token_dim();
  std::map<std::string, Shape> m{
      {"in.w", {pixels, h}},   {"in.b", {h}},
      {"temb.w1", {t_dim, h}}, {"temb.b1", {h}},
      {"temb.w2", {h, h}},     {"temb.b2", {h}},
      {"attn.wq", {d, d}},     {"attn.wk", {d, d}},
      {"attn.wv", {d, d}},     {"attn.wo", {d, d}},
      {"out.w", {h, pixels}},  {"out.b", {pixels}}};
  for (int r = 0; r < res_blocks; ++r) {
    const std::string p = "res" + std::to_string(r) + ".";
    m[p + "w1"] = {h, h};
    m[p + "b1"] = {h};
    m[p + "w2"] = {h, h};
    m[p + "b2"] = {h};
  }
  return m;
}

const RealTensor& DenoiserParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ArgumentError("missing parameter '" + name + "'");
  return it->second;
}

void DenoiserParams::validate_and_infer() {
  const auto& in_w = at("in.w");
  const auto& temb = at("temb.w1");
  const auto& wq = at("attn.wq");
  if (in_w.rank() != 2 || temb.rank() != 2 || wq.rank() != 2) {
    throw ArgumentError("in.w, temb.w1 and attn.wq must be matrices");
  }
  DenoiserShape s;
  s.pixels = in_w.shape[0];
  s.hidden = in_w.shape[1];
  s.t_dim = temb.shape[0];
  const std::size_t d = wq.shape[0];
  if (d == 0 || s.hidden % d != 0) {
    throw ArgumentError("attention width " + std::to_string(d) +
                        " does not divide hidden width " +
                        std::to_string(s.hidden));
  }
  s.tokens = s.hidden / d;
  s.res_blocks = 0;
  while (tensors.count("res" + std::to_string(s.res_blocks) + ".w1")) {
    ++s.res_blocks;
  }
  if (s.t_dim % 2 != 0) throw ArgumentError("temb.w1 needs an even input width");
  const auto layout = s.layout();
  for (const auto& [name, t] : tensors) {
    auto it = layout.find(name);
    if (it == layout.end()) throw ArgumentError("unexpected parameter '" + name + "'");
    if (t.shape != it->second) {
      throw ArgumentError("parameter '" + name + "' has shape " +
                          shape_str(t.shape) + ", expected " +
                          shape_str(it->second));
    }
    t.validate();
  }
  for (const auto& [name, shape] : layout) {
    if (!tensors.count(name)) throw ArgumentError("missing parameter '" + name + "'");
  }
  shape = s;
}

namespace {

RealTensor random_tensor(const Shape& shape, double bound, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(-bound, bound);
  RealTensor t(shape);
  for (auto& v : t.data) v = static_cast<float>(d(gen));
  return t;
}

}  // namespace

DenoiserParams init_params(const DenoiserShape& shape, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  DenoiserParams p;
  for (const auto& [name, s] : shape.layout()) {
    double bound;
    if (s.size() == 1) {
      bound = 0.02;
    } else {
      bound = 1.0 / std::sqrt(static_cast<double>(s[0]));
      if (name == "out.w") bound *= 0.1;
    }
    p.tensors[name] = random_tensor(s, bound, gen);
  }
  p.validate_and_infer();
  return p;
}

DenoiserParams zero_params(const DenoiserShape& shape) {
  DenoiserParams p;
  for (const auto& [name, s] : shape.layout()) p.tensors[name] = RealTensor(s);
  p.validate_and_infer();
  return p;
}

std::vector<std::uint8_t> encode_params(const DenoiserParams& p) {
  std::vector<std::uint8_t> out{'C', 'D', 'M', '1'};
  auto u32 = [&](std::uint32_t v) {
    std::uint8_t b[4];
    put_u32_le(b, v);
    out.insert(out.end(), b, b + 4);
  };
  u32(static_cast<std::uint32_t>(p.tensors.size()));
  for (const auto& [name, t] : p.tensors) {
    if (name.size() > 0xffff) throw ArgumentError("parameter name too long");
    out.push_back(name.size() & 0xff);
    out.push_back(name.size() >> 8);
    out.insert(out.end(), name.begin(), name.end());
    if (t.rank() > 0xff) throw ArgumentError("tensor rank too large");
    out.push_back(static_cast<std::uint8_t>(t.rank()));
    for (auto d : t.shape) u32(static_cast<std::uint32_t>(d));
    for (double v : t.data) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      u32(bits);
    }
  }
  const auto crc = ::crc32(0L, out.data(), static_cast<uInt>(out.size()));
  u32(static_cast<std::uint32_t>(crc));
  return out;
}

DenoiserParams decode_params(const std::vector<std::uint8_t>& b,
                             const std::string& origin) {
  auto malformed = [&](const std::string& why) {
    return IoError("malformed parameter file '" + origin + "': " + why);
  };
  if (b.size() < 12 || std::memcmp(b.data(), "CDM1", 4) != 0) {
    throw malformed("bad magic");
  }
  const std::size_t body = b.size() - 4;
  const auto want = get_u32_le(b.data() + body);
  const auto got = static_cast<std::uint32_t>(
      ::crc32(0L, b.data(), static_cast<uInt>(body)));
  if (want != got) {
    throw ChecksumError("checksum mismatch in parameter file '" + origin + "'");
  }
  std::size_t pos = 4;
  auto need = [&](std::size_t n) {
    if (pos + n > body) throw malformed("truncated");
  };
  auto u32 = [&] {
    need(4);
    const auto v = get_u32_le(b.data() + pos);
    pos += 4;
    return v;
  };
  DenoiserParams p;
  const std::uint32_t count = u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    need(2);
    const std::size_t len = b[pos] | (b[pos + 1] << 8);
    pos += 2;
    need(len);
    std::string name(b.begin() + pos, b.begin() + pos + len);
    pos += len;
    need(1);
    const int rank = b[pos++];
    Shape shape(rank);
    for (auto& d : shape) d = u32();
    const std::size_t n = numel(shape);
    need(4 * n);
    RealTensor t(shape);
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t bits = u32();
      float f;
      std::memcpy(&f, &bits, 4);
      t[j] = f;
    }
    if (!p.tensors.emplace(name, std::move(t)).second) {
      throw malformed("duplicate tensor '" + name + "'");
    }
  }
  if (pos != body) throw malformed("trailing bytes");
  p.validate_and_infer();
  return p;
}

void save_params(const std::string& path, const DenoiserParams& p) {
  const auto bytes = encode_params(p);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write parameter file '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

DenoiserParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parameter file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_params(bytes, path);
}

namespace {

namespace k = kernels::omp;

RealTensor matmul_plain(const RealTensor& a, const RealTensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape[1] != b.shape[0]) {
    throw ArgumentError("matmul of " + shape_str(a.shape) + " and " +
                        shape_str(b.shape));
  }
  RealTensor out(Shape{a.shape[0], b.shape[1]});
  k::matmul_f64(a.data, b.data, out.data, a.shape[0], a.shape[1], b.shape[1]);
  return out;
}

RealTensor linear_plain(const RealTensor& x, const RealTensor& w,
                        const RealTensor& b) {
  RealTensor y = matmul_plain(x, w);
  const std::size_t n = y.shape[1];
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i % n];
  return y;
}

void add_into(RealTensor& a, const RealTensor& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

RealTensor transpose_plain(const RealTensor& a) {
  RealTensor t(Shape{a.shape[1], a.shape[0]});
  for (std::size_t i = 0; i < a.shape[0]; ++i) {
    for (std::size_t j = 0; j < a.shape[1]; ++j) {
      t[j * a.shape[0] + i] = a[i * a.shape[1] + j];
    }
  }
  return t;
}

// Power-of-two attention scale 1/sqrt(d) as a shift, or -1.
int scale_shift(std::size_t d) {
  for (int s = 0; s < 31; ++s) {
    if ((std::size_t{1} << (2 * s)) == d) return s;
  }
  return -1;
}

}  // namespace

RealTensor denoiser_forward_plain(const RealTensor& x, int t,
                                  const DenoiserParams& p, const PlainOps& ops) {
  const DenoiserShape& s = p.shape;
  check_same(x.shape, Shape{1, s.pixels}, "denoiser input");
  const auto e = timestep_embedding(t, static_cast<int>(s.t_dim));
  RealTensor temb = linear_plain(RealTensor(Shape{1, s.t_dim}, e),
                                 p.at("temb.w1"), p.at("temb.b1"));
  for (auto& v : temb.data) v = ops.time_activation(v);
  temb = linear_plain(temb, p.at("temb.w2"), p.at("temb.b2"));

  RealTensor h = linear_plain(x, p.at("in.w"), p.at("in.b"));
  for (int r = 0; r < s.res_blocks; ++r) {
    const std::string pre = "res" + std::to_string(r) + ".";
    RealTensor u = h;
    add_into(u, temb);
    u = linear_plain(u, p.at(pre + "w1"), p.at(pre + "b1"));
    for (auto& v : u.data) v = ops.activation(v);
    add_into(h, linear_plain(u, p.at(pre + "w2"), p.at(pre + "b2")));
  }

  const std::size_t d = s.token_dim();
  const RealTensor tok(Shape{s.tokens, d}, h.data);
  const RealTensor q = matmul_plain(tok, p.at("attn.wq"));
  const RealTensor kk = matmul_plain(tok, p.at("attn.wk"));
  const RealTensor v = matmul_plain(tok, p.at("attn.wv"));
  RealTensor scores = matmul_plain(q, transpose_plain(kk));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < s.tokens; ++i) {
    std::vector<double> row(s.tokens);
    for (std::size_t j = 0; j < s.tokens; ++j) {
      row[j] = scores[i * s.tokens + j] * scale;
    }
    const auto a = ops.softmax(row);
    std::copy(a.begin(), a.end(), scores.data.begin() + i * s.tokens);
  }
  const RealTensor o = matmul_plain(matmul_plain(scores, v), p.at("attn.wo"));
  add_into(h, RealTensor(Shape{1, s.hidden}, o.data));

  RealTensor eps = linear_plain(h, p.at("out.w"), p.at("out.b"));
  add_into(eps, x);
  return eps;
}

const ShareTensor& SecureParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ArgumentError("missing parameter '" + name + "'");
  return it->second;
}

ShareTensor denoiser_forward(Party& party, const ShareTensor& x, int t,
                             const SecureParams& p, const DenoiserConfig& cfg) {
  const DenoiserShape& s = p.shape;
  check_same(x.shape, Shape{1, s.pixels}, "denoiser input");
  auto scope = party.scope("denoiser");
  const Ring ring = party.ring();
  const FixedEncoding& enc = party.enc();

  const auto e = timestep_embedding(t, static_cast<int>(s.t_dim));
  const Tensor emb(Shape{1, s.t_dim}, enc.encode(e));
  const ShareTensor temb =
      secure_time_embedding(party, emb, p.at("temb.w1"), p.at("temb.b1"),
                            p.at("temb.w2"), p.at("temb.b2"));

  ShareTensor h = secure_linear(party, x, p.at("in.w"), p.at("in.b"));
  for (int r = 0; r < s.res_blocks; ++r) {
    auto block = party.scope("res");
    const std::string pre = "res" + std::to_string(r) + ".";
    ShareTensor u = secure_linear(party, add(h, temb, ring), p.at(pre + "w1"),
                                  p.at(pre + "b1"));
    u = secure_activation(party, u, cfg.activation);
    h = add(h, secure_linear(party, u, p.at(pre + "w2"), p.at(pre + "b2")),
            ring);
  }

  {
    auto attn = party.scope("attention");
    const std::size_t d = s.token_dim();
    const ShareTensor tok = reshape(h, Shape{s.tokens, d});
    const ShareTensor q = fixed_matmul(party, tok, p.at("attn.wq"));
    const ShareTensor kk = fixed_matmul(party, tok, p.at("attn.wk"));
    const ShareTensor v = fixed_matmul(party, tok, p.at("attn.wv"));
    const int shift = scale_shift(d);
    ShareTensor scores;
    if (shift >= 0) {
      scores = truncate(party, matmul(party, q, transpose2d(kk)),
                        enc.fraction_bits + shift);
    } else {
      scores = fixed_scale(party, fixed_matmul(party, q, transpose2d(kk)),
                           1.0 / std::sqrt(static_cast<double>(d)));
    }
    const ShareTensor a = secure_softmax(party, scores, cfg.softmax);
    const ShareTensor o =
        fixed_matmul(party, fixed_matmul(party, a, v), p.at("attn.wo"));
    h = add(h, reshape(o, Shape{1, s.hidden}), ring);
  }

  return add(x, secure_linear(party, h, p.at("out.w"), p.at("out.b")), ring);
}

std::array<SecureParams, 3> share_params(const DenoiserParams& params,
                                         const FixedEncoding& enc,
                                         std::uint64_t seed) {
  Prg rng(derive_key(seed, "model-owner"));
  std::array<SecureParams, 3> out;
  for (auto& o : out) o.shape = params.shape;
  for (const auto& [name, t] : params.tensors) {
    auto s = share_tensor(encode_tensor(t, enc), rng, enc.ring());
    for (int i = 0; i < 3; ++i) out[i].tensors[name] = std::move(s[i]);
  }
  return out;
}

std::string sampler_name(SamplerKind k) {
  return k == SamplerKind::kDDPM ? "ddpm" : "ddim";
}

SamplerKind parse_sampler(const std::string& s) {
  if (s == "ddpm") return SamplerKind::kDDPM;
  if (s == "ddim") return SamplerKind::kDDIM;
  throw ArgumentError("unknown sampler '" + s + "'");
}

void SamplerConfig::validate() const {
  if (steps < 1) throw ArgumentError("steps must be at least 1");
  if (kind == SamplerKind::kDDIM && steps > schedule_steps) {
    throw ArgumentError("DDIM steps exceed schedule_steps");
  }
  if (image_w == 0 || image_h == 0) throw ArgumentError("empty image");
}

NoiseSchedule SamplerConfig::schedule() const {
  return make_linear_schedule(kind == SamplerKind::kDDIM ? schedule_steps
                                                         : steps);
}

std::vector<std::pair<int, int>> SamplerConfig::plan() const {
  validate();
  std::vector<std::pair<int, int>> out;
  if (kind == SamplerKind::kDDPM) {
    for (int t = steps; t >= 1; --t) out.emplace_back(t, t - 1);
  } else {
    const auto ts = ddim_timesteps(schedule_steps, steps);
    for (int k = steps - 1; k >= 0; --k) {
      out.emplace_back(ts[k], k > 0 ? ts[k - 1] : 0);
    }
  }
  return out;
}

PublicNoise::PublicNoise(std::uint64_t seed, std::size_t n)
    : gen_(seed), dist_(0.0, 1.0), n_(n) {}

RealTensor PublicNoise::next() {
  RealTensor t(Shape{1, n_});
  for (auto& v : t.data) v = dist_(gen_);
  return t;
}

namespace {

void check_pixels(const DenoiserShape& s, const SamplerConfig& cfg) {
  if (s.pixels != cfg.image_w * cfg.image_h) {
    throw ArgumentError("model takes " + std::to_string(s.pixels) +
                        " pixels, image is " + std::to_string(cfg.image_w) +
                        "x" + std::to_string(cfg.image_h));
  }
}

}  // namespace

RealTensor sample_plain(const DenoiserParams& params, const SamplerConfig& cfg,
                        const PlainOps& ops, const StepCallback& cb) {
  check_pixels(params.shape, cfg);
  const auto sched = cfg.schedule();
  const auto plan = cfg.plan();
  PublicNoise noise(cfg.seed, params.shape.pixels);
  RealTensor x = noise.next();
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto [t, t_prev] = plan[k];
    const RealTensor eps = denoiser_forward_plain(x, t, params, ops);
    if (cfg.kind == SamplerKind::kDDIM) {
      x = ddim_step_plain(x, eps, t, t_prev, sched);
    } else {
      x = ddpm_step_plain(x, eps, t, noise.next(), sched);
    }
    if (cb) cb(static_cast<int>(k) + 1, static_cast<int>(plan.size()));
  }
  return x;
}

ShareTensor sample_secure(Party& party, const SecureParams& params,
                          const SamplerConfig& cfg, const StepCallback& cb) {
  check_pixels(params.shape, cfg);
  const auto sched = cfg.schedule();
  const auto plan = cfg.plan();
  PublicNoise noise(cfg.seed, params.shape.pixels);
  ShareTensor x =
      public_share(encode_tensor(noise.next(), party.enc()), party.id());
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto [t, t_prev] = plan[k];
    const int step = static_cast<int>(k) + 1;
    const RealTensor z =
        cfg.kind == SamplerKind::kDDPM ? noise.next() : RealTensor();
    try {
      const ShareTensor eps =
          denoiser_forward(party, x, t, params, cfg.denoiser);
      if (cfg.kind == SamplerKind::kDDIM) {
        x = ddim_step(party, x, eps, t, t_prev, sched);
      } else {
        x = ddpm_step(party, x, eps, t, z, sched);
      }
    } catch (const ProtocolAbort&) {
      throw;
    } catch (const std::exception& e) {
      throw ProtocolAbort(party.index(), e.what(), step);
    }
    if (cb) cb(step, static_cast<int>(plan.size()));
  }
  return x;
}

std::vector<std::uint8_t> to_grayscale(const std::vector<double>& x) {
  std::vector<std::uint8_t> px(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = std::clamp(x[i], -1.0, 1.0);
    px[i] = static_cast<std::uint8_t>(std::lround((c + 1.0) * 127.5));
  }
  return px;
}

void save_pgm(const std::string& path, std::size_t w, std::size_t h,
              const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != w * h) throw ArgumentError("pixel count does not match image size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image '" + path + "'");
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::uint8_t> load_pgm(const std::string& path, std::size_t& w,
                                   std::size_t& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path + "'");
  std::string magic;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 255 || in.get() != '\n') {
    throw IoError("'" + path + "' is not an 8-bit binary PGM");
  }
  std::vector<std::uint8_t> px(w * h);
  in.read(reinterpret_cast<char*>(px.data()),
          static_cast<std::streamsize>(px.size()));
  if (!in) throw IoError("truncated image '" + path + "'");
  return px;
}

void save_raw(const std::string& path, const std::vector<double>& x) {
  std::vector<std::uint8_t> bytes(4 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float f = static_cast<float>(x[i]);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32_le(bytes.data() + 4 * i, bits);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write raw dump '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<double> load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open raw dump '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() % 4) throw IoError("raw dump '" + path + "' is not float32");
  std::vector<double> x(bytes.size() / 4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::uint32_t bits = get_u32_le(bytes.data() + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    x[i] = f;
  }
  return x;
}

}  // namespace tripart
