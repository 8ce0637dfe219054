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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_util.hpp"
#include "tripart/diffusion.hpp"
#include "tripart/reference.hpp"
#include "tripart/rss.hpp"

using namespace tripart;
using namespace tripart::testing;

namespace {

constexpr double kScheduleTol = 1e-12;
// alpha_bar_1000 of the linear 1e-4..0.02 schedule, exact rational product.
constexpr double kAlphaBar1000 = 4.0358297653756835e-05;
// Secure step vs plaintext step on the same decoded inputs.
constexpr double kStepTol = 4.0 / (1 << 18);
// One forward pass, secure vs plaintext twin (measured about 2.5e-5).
constexpr double kForwardTol = 1e-3;
// End-to-end bound and the per-step growth allowance (measured 1.5e-4 at 50
// steps, about 1e-5 per step at 5).
constexpr double kSampleTol = 1e-2;
constexpr double kGrowthPerStep = 2e-5;

DenoiserShape small_shape() {
  DenoiserShape s;
  s.pixels = 16;
  s.hidden = 16;
  s.t_dim = 8;
  s.tokens = 4;
  s.res_blocks = 1;
  return s;
}

SamplerConfig small_sampler(SamplerKind kind, int steps) {
  SamplerConfig c;
  c.kind = kind;
  c.steps = steps;
  c.schedule_steps = 100;
  c.image_w = 4;
  c.image_h = 4;
  return c;
}

RealTensor row(const std::vector<double>& v) {
  return RealTensor(Shape{1, v.size()}, v);
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tripart_test_" + name);
}

std::vector<double> run_secure_sample(const DenoiserParams& params,
                                      const SamplerConfig& cfg,
                                      CostReport* cost = nullptr) {
  const FixedEncoding enc;
  const auto shared = share_params(params, enc, 5);
  auto run = spawn_local_parties([&](Party& p) {
    return sample_secure(p, shared[p.index()], cfg);
  });
  if (cost) *cost = run.cost;
  return open_real(run.results);
}

}  // namespace

TEST_CASE("linear schedule identities") {
  const auto s = make_linear_schedule(1000);
  CHECK(s.steps == 1000);
  CHECK(s.beta[1] == doctest::Approx(1e-4).epsilon(kScheduleTol));
  CHECK(s.beta[1000] == doctest::Approx(0.02).epsilon(kScheduleTol));
  CHECK(s.alpha_bar[0] == 1.0);
  for (int t = 1; t <= 1000; ++t) {
    CHECK(std::abs(s.alpha[t] - (1.0 - s.beta[t])) <= kScheduleTol);
    CHECK(std::abs(s.alpha_bar[t] - s.alpha_bar[t - 1] * s.alpha[t]) <=
          kScheduleTol);
    const double bt =
        (1.0 - s.alpha_bar[t - 1]) / (1.0 - s.alpha_bar[t]) * s.beta[t];
    CHECK(std::abs(s.beta_tilde[t] - bt) <= kScheduleTol);
    if (t > 1) {
      CHECK(s.beta[t] - s.beta[t - 1] ==
            doctest::Approx((0.02 - 1e-4) / 999).epsilon(1e-9));
    }
  }
  CHECK(s.alpha_bar[1] == doctest::Approx(0.9999).epsilon(kScheduleTol));
  CHECK(s.alpha_bar[1000] == doctest::Approx(kAlphaBar1000).epsilon(1e-10));
  CHECK(s.beta_tilde[1] == 0.0);
  CHECK_THROWS_AS(make_linear_schedule(0), ArgumentError);
  CHECK_THROWS_AS(s.check_step(1001), ArgumentError);
}

TEST_CASE("q_sample matches its closed form") {
  const auto s = make_linear_schedule(1000);
  const auto x0 = uniform_reals(64, -1, 1, 1);
  const auto e = uniform_reals(64, -3, 3, 2);
  for (int t : {1, 2, 500, 1000}) {
    const auto xt = q_sample(row(x0), t, row(e), s);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double want = std::sqrt(s.alpha_bar[t]) * x0[i] +
                          std::sqrt(1.0 - s.alpha_bar[t]) * e[i];
      CHECK(std::abs(xt[i] - want) <= kScheduleTol);
    }
  }
  CHECK_THROWS_AS(q_sample(row(x0), 0, row(e), s), ArgumentError);
}

TEST_CASE("reverse steps with the true noise recover the clean sample") {
  const auto s = make_linear_schedule(1000);
  const auto x0 = uniform_reals(32, -1, 1, 3);
  const auto e = uniform_reals(32, -2, 2, 4);
  const RealTensor unused;

  // DDPM at t = 1 inverts q_sample exactly.
  const auto x1 = q_sample(row(x0), 1, row(e), s);
  CHECK(max_diff(ddpm_step_plain(x1, row(e), 1, unused, s).data, x0) <= 1e-12);

  // Deterministic DDIM maps q_sample(t) onto q_sample(t_prev).
  for (auto [t, tp] : std::vector<std::pair<int, int>>{
           {1000, 0}, {1000, 980}, {500, 499}, {21, 1}, {1, 0}}) {
    const auto xt = q_sample(row(x0), t, row(e), s);
    const auto got = ddim_step_plain(xt, row(e), t, tp, s);
    const auto want = tp == 0 ? row(x0) : q_sample(row(x0), tp, row(e), s);
    CHECK(max_diff(got.data, want.data) <= 1e-10);
  }
  CHECK_THROWS_AS(ddim_step_plain(row(x0), row(e), 10, 10, s), ArgumentError);
}

TEST_CASE("DDPM adds scaled noise above t = 1 and none at t = 1") {
  const auto s = make_linear_schedule(1000);
  const auto x = uniform_reals(8, -1, 1, 5);
  const auto eps = uniform_reals(8, -1, 1, 6);
  const auto z = uniform_reals(8, -1, 1, 7);
  const std::vector<double> zero(8, 0.0);
  for (int t : {2, 300, 1000}) {
    const auto with = ddpm_step_plain(row(x), row(eps), t, row(z), s);
    const auto without = ddpm_step_plain(row(x), row(eps), t, row(zero), s);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(with[i] - without[i] ==
            doctest::Approx(std::sqrt(s.beta_tilde[t]) * z[i]).epsilon(1e-9));
      const double mean = (x[i] - s.beta[t] / std::sqrt(1 - s.alpha_bar[t]) *
                                      eps[i]) /
                          std::sqrt(s.alpha[t]);
      CHECK(without[i] == doctest::Approx(mean).epsilon(1e-12));
    }
  }
  const auto a = ddpm_step_plain(row(x), row(eps), 1, row(z), s);
  const auto b = ddpm_step_plain(row(x), row(eps), 1, row(zero), s);
  CHECK(a.data == b.data);
}

TEST_CASE("secure reverse steps match the plaintext steps") {
  const FixedEncoding enc;
  const auto s = make_linear_schedule(1000);
  const auto x = uniform_reals(256, -3, 3, 8);
  const auto eps = uniform_reals(256, -3, 3, 9);
  const auto z = uniform_reals(256, -3, 3, 10);
  const Tensor xe(Shape{1, 256}, enc.encode(x));
  const Tensor ee(Shape{1, 256}, enc.encode(eps));
  const auto xs = deal(xe, 11);
  const auto es = deal(ee, 12);
  const auto xd = enc.decode(xe.data);
  const auto ed = enc.decode(ee.data);

  for (int t : {1, 2, 999, 1000}) {
    auto run = spawn_local_parties([&](Party& p) {
      return ddpm_step(p, xs[p.index()], es[p.index()], t, row(z), s);
    });
    const auto want = ddpm_step_plain(row(xd), row(ed), t, row(z), s);
    CHECK(max_diff(open_real(run.results), want.data) <= kStepTol);
    const auto e = run.cost.sum_prefix("ddpm_step");
    CHECK(e.rounds == 1);
  }
  for (auto [t, tp] : std::vector<std::pair<int, int>>{{1000, 980}, {21, 1}, {1, 0}}) {
    auto run = spawn_local_parties([&](Party& p) {
      return ddim_step(p, xs[p.index()], es[p.index()], t, tp, s);
    });
    const auto want = ddim_step_plain(row(xd), row(ed), t, tp, s);
    CHECK(max_diff(open_real(run.results), want.data) <= kStepTol);
    CHECK(run.cost.sum_prefix("ddim_step").rounds == 1);
  }
}

TEST_CASE("DDIM timesteps and sampler plans") {
  const auto ts = ddim_timesteps(1000, 50);
  REQUIRE(ts.size() == 50);
  CHECK(ts.front() == 1);
  CHECK(ts.back() == 981);
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(ts[k] - ts[k - 1] == 20);
  const auto all = ddim_timesteps(10, 10);
  for (int k = 0; k < 10; ++k) CHECK(all[k] == k + 1);
  CHECK(ddim_timesteps(1000, 1) == std::vector<int>{1});
  CHECK_THROWS_AS(ddim_timesteps(10, 11), ArgumentError);
  CHECK_THROWS_AS(ddim_timesteps(10, 0), ArgumentError);

  SamplerConfig c;
  const auto plan = c.plan();
  REQUIRE(plan.size() == 50);
  CHECK(plan.front() == std::pair<int, int>{981, 961});
  CHECK(plan.back() == std::pair<int, int>{1, 0});
  c.kind = SamplerKind::kDDPM;
  c.steps = 4;
  CHECK(c.plan() == std::vector<std::pair<int, int>>{{4, 3}, {3, 2}, {2, 1}, {1, 0}});
  CHECK(c.schedule().steps == 4);
  CHECK(parse_sampler("ddim") == SamplerKind::kDDIM);
  CHECK_THROWS_AS(parse_sampler("euler"), ArgumentError);
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("parameter file roundtrip and corruption") {
  const auto p = init_params(small_shape(), 3);
  const auto path = temp_path("params.bin").string();
  save_params(path, p);
  const auto q = load_params(path);
  CHECK(q.shape.pixels == 16);
  CHECK(q.shape.res_blocks == 1);
  CHECK(q.shape.tokens == 4);
  REQUIRE(q.tensors.size() == p.tensors.size());
  for (const auto& [name, t] : p.tensors) {
    CHECK(q.at(name).shape == t.shape);
    CHECK(q.at(name).data == t.data);
  }

  auto bytes = encode_params(p);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK_THROWS_AS(decode_params(flipped), ChecksumError);
  auto cut = bytes;
  cut.resize(bytes.size() - 7);
  CHECK_THROWS_AS(decode_params(cut), ChecksumError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_params(magic), IoError);
  CHECK_THROWS_AS(decode_params({1, 2, 3}), IoError);

  const std::string missing = temp_path("does_not_exist.bin").string();
  try {
    load_params(missing);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(missing) != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("parameter shapes are validated") {
  auto p = init_params(small_shape(), 3);
  p.tensors["res0.w1"] = RealTensor(Shape{16, 15});
  CHECK_THROWS_AS(p.validate_and_infer(), ArgumentError);
  auto q = init_params(small_shape(), 3);
  q.tensors.erase("out.b");
  CHECK_THROWS_AS(q.validate_and_infer(), ArgumentError);
  auto r = init_params(small_shape(), 3);
  r.tensors["extra"] = RealTensor(Shape{1});
  CHECK_THROWS_AS(r.validate_and_infer(), ArgumentError);
  CHECK_THROWS_AS(decode_params(encode_params(p)), ArgumentError);
}

TEST_CASE("init_params is seeded and stores float values") {
  const auto a = init_params(small_shape(), 3);
  const auto b = init_params(small_shape(), 3);
  const auto c = init_params(small_shape(), 4);
  CHECK(a.at("in.w").data == b.at("in.w").data);
  CHECK(a.at("in.w").data != c.at("in.w").data);
  for (double v : a.at("in.w").data) {
    CHECK(static_cast<double>(static_cast<float>(v)) == v);
    CHECK(std::abs(v) <= 0.25);
  }
  for (double v : a.at("out.w").data) CHECK(std::abs(v) <= 0.025);
}

TEST_CASE("a zero model predicts the input as noise") {
  const auto p = zero_params(small_shape());
  const auto x = uniform_reals(16, -2, 2, 13);
  const auto ops = reference::plain_ops(reference::Flavor::kApproximated, {},
                                        FixedEncoding{});
  CHECK(denoiser_forward_plain(row(x), 10, p, ops).data == x);

  const FixedEncoding enc;
  const auto shared = share_params(p, enc, 5);
  const Tensor xe(Shape{1, 16}, enc.encode(x));
  const auto xs = deal(xe, 14);
  auto run = spawn_local_parties([&](Party& pp) {
    return denoiser_forward(pp, xs[pp.index()], 10, shared[pp.index()], {});
  });
  CHECK(max_diff(open_real(run.results), enc.decode(xe.data)) <= 1.0 / (1 << 18));
}

TEST_CASE("equal attention logits make the key weights irrelevant") {
  auto p = init_params(small_shape(), 21);
  for (auto& v : p.tensors["attn.wq"].data) v = 0.0;
  auto q = p;
  for (auto& v : q.tensors["attn.wk"].data) v *= -3.0;
  const auto x = uniform_reals(16, -1, 1, 15);
  const auto ops =
      reference::plain_ops(reference::Flavor::kExact, {}, FixedEncoding{});
  CHECK(max_diff(denoiser_forward_plain(row(x), 5, p, ops).data,
                 denoiser_forward_plain(row(x), 5, q, ops).data) <= 1e-15);
}

TEST_CASE("secure forward pass matches its plaintext twin") {
  const DenoiserShape shape;
  const auto p = init_params(shape, 11);
  const FixedEncoding enc;
  const auto shared = share_params(p, enc, 5);
  const auto x = uniform_reals(shape.pixels, -2, 2, 16);
  const Tensor xe(Shape{1, shape.pixels}, enc.encode(x));
  const auto xs = deal(xe, 17);
  for (Activation a : {Activation::kSiLU, Activation::kMish, Activation::kReLU}) {
    CAPTURE(activation_name(a));
    DenoiserConfig dc;
    dc.activation = a;
    auto run = spawn_local_parties([&](Party& pp) {
      return denoiser_forward(pp, xs[pp.index()], 500, shared[pp.index()], dc);
    });
    const auto ops =
        reference::plain_ops(reference::Flavor::kApproximated, dc, enc);
    const auto want =
        denoiser_forward_plain(row(enc.decode(xe.data)), 500, p, ops);
    CHECK(max_diff(open_real(run.results), want.data) <= kForwardTol);
    const auto d = run.cost.sum_prefix("denoiser");
    CHECK(d.total_bytes() == run.cost.total_bytes());
    CHECK(run.cost.sum_prefix("denoiser/attention").rounds > 0);
    CHECK(run.cost.consistent());
  }
}

TEST_CASE("secure sampling is deterministic and tracks the plaintext pipeline") {
  const auto p = init_params(small_shape(), 31);
  for (SamplerKind kind : {SamplerKind::kDDIM, SamplerKind::kDDPM}) {
    CAPTURE(sampler_name(kind));
    const auto cfg = small_sampler(kind, 10);
    const auto a = run_secure_sample(p, cfg);
    const auto b = run_secure_sample(p, cfg);
    CHECK(a == b);
    const auto ops = reference::plain_ops(reference::Flavor::kApproximated,
                                          cfg.denoiser, FixedEncoding{});
    const auto plain = sample_plain(p, cfg, ops);
    CHECK(max_diff(a, plain.data) <= kSampleTol);
    CHECK(sample_plain(p, cfg, ops).data == plain.data);
  }
}

TEST_CASE("sampling error grows at most linearly and cost is linear in steps") {
  const DenoiserShape shape;
  const auto p = init_params(shape, 11);
  std::uint64_t bytes_per_step = 0;
  std::uint64_t rounds_per_step = 0;
  for (int steps : {5, 10, 25, 50}) {
    CAPTURE(steps);
    SamplerConfig cfg;
    cfg.steps = steps;
    CostReport cost;
    const auto secure = run_secure_sample(p, cfg, &cost);
    const auto ops = reference::plain_ops(reference::Flavor::kApproximated,
                                          cfg.denoiser, FixedEncoding{});
    const double err = max_diff(secure, sample_plain(p, cfg, ops).data);
    CHECK(err <= kSampleTol);
    CHECK(err <= kGrowthPerStep * steps);
    if (steps == 5) {
      bytes_per_step = cost.total_bytes() / 5;
      rounds_per_step = cost.rounds / 5;
    }
    CHECK(cost.total_bytes() == bytes_per_step * steps);
    CHECK(cost.rounds == rounds_per_step * steps);
  }
}

TEST_CASE("a failing step aborts with its index") {
  auto p = init_params(small_shape(), 3);
  const FixedEncoding enc;
  auto shared = share_params(p, enc, 5);
  for (auto& s : shared) s.tensors["res0.w1"] = ShareTensor(Shape{16, 15});
  const auto cfg = small_sampler(SamplerKind::kDDIM, 3);
  try {
    spawn_local_parties([&](Party& pp) {
      return sample_secure(pp, shared[pp.index()], cfg);
    });
    FAIL("expected ProtocolAbort");
  } catch (const ProtocolAbort& e) {
    CHECK(e.step() == 1);
  }
  SamplerConfig wrong = cfg;
  wrong.image_w = 5;
  CHECK_THROWS_AS(sample_plain(p, wrong, reference::plain_ops(
                                             reference::Flavor::kExact, {}, enc)),
                  ArgumentError);
}

TEST_CASE("grayscale mapping and image files") {
  CHECK(to_grayscale({-1.0, 0.0, 1.0, -5.0, 5.0}) ==
        std::vector<std::uint8_t>{0, 128, 255, 0, 255});
  const std::vector<std::uint8_t> px{0, 10, 20, 30, 40, 50};
  const auto pgm = temp_path("img.pgm").string();
  save_pgm(pgm, 3, 2, px);
  std::size_t w = 0, h = 0;
  CHECK(load_pgm(pgm, w, h) == px);
  CHECK(w == 3);
  CHECK(h == 2);
  {
    std::ifstream in(pgm, std::ios::binary);
    std::string head(11, '\0');
    in.read(head.data(), 11);
    CHECK(head == "P5\n3 2\n255\n");
  }
  CHECK_THROWS_AS(save_pgm(pgm, 4, 2, px), ArgumentError);

  const auto raw = temp_path("img.raw").string();
  const std::vector<double> v{0.5, -0.25, 1.0 / 3.0};
  save_raw(raw, v);
  CHECK(std::filesystem::file_size(raw) == 12);
  const auto back = load_raw(raw);
  CHECK(back[0] == 0.5);
  CHECK(back[1] == -0.25);
  CHECK(back[2] == static_cast<double>(static_cast<float>(1.0 / 3.0)));
  CHECK_THROWS_AS(load_raw(temp_path("nope.raw").string()), IoError);
  std::filesystem::remove(pgm);
  std::filesystem::remove(raw);
}
