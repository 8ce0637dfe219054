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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is a named constant below.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "tripart/config.hpp"
#include "tripart/diffusion.hpp"
#include "tripart/harness.hpp"
#include "tripart/net.hpp"
#include "tripart/nonlinear.hpp"
#include "tripart/primitives.hpp"
#include "tripart/reference.hpp"
#include "tripart/rss.hpp"
#include "tripart/service.hpp"
#include "tripart/share.hpp"

using namespace tripart;

namespace {

constexpr int kF = 18;
const double kLsb = std::ldexp(1.0, -kF);

// 1: sharing soundness
constexpr std::size_t kShareCount = 100000;
constexpr double kChiAlpha = 0.01;  // family-wise, Bonferroni over 24 tests
constexpr double kShareSeconds = 10.0;
// 2: multiplication
constexpr std::size_t kMulPairs = 10000;
// 3: fixed point
constexpr std::size_t kFixedPairs = 10000;
const double kFixedMulTol = std::ldexp(1.0, -kF + 1);
// 4: neg_exp
constexpr std::size_t kExpGrid = 4096;
constexpr double kEpsFit = 0.04848381;  // grid oracle, shipped coefficients
constexpr double kNegExpLsb = 32;
// 5: activation accuracy
constexpr std::size_t kActGrid = 100001;
constexpr double kMseLo = 1e-6;
constexpr double kMseHi = 1e-3;
constexpr double kAccuracySeconds = 5.0;
// 6: secure vs twin
constexpr std::size_t kVectors = 1000;
constexpr std::size_t kSoftmaxLen = 8;
constexpr std::size_t kActLen = 16;
constexpr double kSoftmaxLsb = 32;
constexpr double kActivationLsb = 8;
constexpr double kRowSumLsbPerEntry = 4;
// 7: end to end
constexpr double kSampleTol = 1e-2;
constexpr double kSampleSeconds = 15 * 60;
// 9: schedule
constexpr double kScheduleTol = 1e-12;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& f) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL",
              id, name.c_str(), o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::vector<double> uniform(std::size_t n, double lo, double hi,
                            std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

std::array<ShareTensor, 3> deal(const Tensor& t, std::uint64_t seed,
                                Ring ring = {}) {
  Prg rng(derive_key(seed, "acceptance-dealer"));
  return share_tensor(t, rng, ring);
}

template <class F>
auto run_unary(F&& f, const Tensor& t, std::uint64_t seed) {
  const auto s = deal(t, seed);
  return spawn_local_parties([&](Party& p) { return f(p, s[p.index()]); });
}

Outcome sharing_soundness() {
  const auto t0 = Clock::now();
  const FixedEncoding enc;
  // Low-entropy secrets: small fixed-point values.
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> d(-100, 100);
  Tensor secret(Shape{kShareCount});
  for (auto& v : secret.data) v = enc.encode(d(gen) / 4.0);
  const auto shares = deal(secret, 2);
  const Tensor back = reconstruct_tensor(shares, enc.ring());
  if (back.data != secret.data) return {false, "reconstruction mismatch"};

  // Component c is held by P_c (lo) and P_{c-1} (hi); test its 8 bytes.
  const int tests = 3 * 8;
  const boost::math::chi_squared chi(255);
  double min_p = 1.0;
  for (int c = 0; c < 3; ++c) {
    for (int byte = 0; byte < 8; ++byte) {
      std::array<double, 256> hist{};
      for (auto v : shares[c].lo) hist[(v >> (8 * byte)) & 0xff] += 1;
      const double expect = static_cast<double>(kShareCount) / 256;
      double stat = 0;
      for (double h : hist) stat += (h - expect) * (h - expect) / expect;
      min_p = std::min(min_p, boost::math::cdf(boost::math::complement(chi, stat)));
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool uniform_ok = min_p > kChiAlpha / tests;
  return {uniform_ok && secs < kShareSeconds,
          "1e5 values exact; min chi-square p = " + fmt("%.4f", min_p) +
              " over 24 byte tests (threshold " +
              fmt("%.5f", kChiAlpha / tests) + ")"};
}

Outcome mul_exactness() {
  const Ring ring;
  std::mt19937_64 gen(3);
  Tensor a(Shape{kMulPairs}), b(Shape{kMulPairs});
  for (std::size_t i = 0; i < kMulPairs; ++i) {
    a[i] = gen();
    b[i] = gen();
  }
  const auto sa = deal(a, 4), sb = deal(b, 5);
  auto run = spawn_local_parties(
      [&](Party& p) { return mul(p, sa[p.index()], sb[p.index()]); });
  const Tensor c = reconstruct_tensor(run.results, ring);
  for (std::size_t i = 0; i < kMulPairs; ++i) {
    if (c[i] != ring.mul(a[i], b[i])) return {false, "product mismatch"};
  }
  const bool batch_ok = run.cost.total_payload() == 3 * 8 * kMulPairs &&
                        run.cost.rounds == 1;
  const Tensor one_a(Shape{1}, {a[0]}), one_b(Shape{1}, {b[0]});
  const auto s1 = deal(one_a, 6), s2 = deal(one_b, 7);
  auto single = spawn_local_parties(
      [&](Party& p) { return mul(p, s1[p.index()], s2[p.index()]); });
  const bool single_ok =
      single.cost.total_payload() == 3 * 8 && single.cost.rounds == 1;
  return {batch_ok && single_ok,
          "1e4 products exact; payload " +
              std::to_string(run.cost.total_payload()) + " B in " +
              std::to_string(run.cost.rounds) + " round; single pair " +
              std::to_string(single.cost.total_payload() / 8) + " elements"};
}

Outcome fixed_point() {
  const FixedEncoding enc;
  const Ring ring;
  const auto x = uniform(kFixedPairs, -100, 100, 8);
  const auto y = uniform(kFixedPairs, -100, 100, 9);
  const Tensor xe(Shape{kFixedPairs}, enc.encode(x));
  const Tensor ye(Shape{kFixedPairs}, enc.encode(y));
  const auto sx = deal(xe, 10), sy = deal(ye, 11);
  auto run = spawn_local_parties(
      [&](Party& p) { return fixed_mul(p, sx[p.index()], sy[p.index()]); });
  const auto got = enc.decode(reconstruct_tensor(run.results, ring).data);
  double worst = 0;
  for (std::size_t i = 0; i < kFixedPairs; ++i) {
    const double want = enc.decode(xe[i]) * enc.decode(ye[i]);
    worst = std::max(worst, std::abs(got[i] - want));
  }

  // Comparison and max on pairs with one-LSB gaps mixed in.
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{100} << kF),
                                                std::int64_t{100} << kF);
  Tensor a(Shape{kFixedPairs}), b(Shape{kFixedPairs}), pairs(Shape{kFixedPairs, 2});
  for (std::size_t i = 0; i < kFixedPairs; ++i) {
    const std::int64_t u = d(gen);
    std::int64_t v = d(gen);
    if (i % 4 == 0) v = u + 1;
    if (i % 4 == 1) v = u - 1;
    if (i % 8 == 2) v = u;
    a[i] = static_cast<RingElement>(u);
    b[i] = static_cast<RingElement>(v);
    pairs[2 * i] = a[i];
    pairs[2 * i + 1] = b[i];
  }
  const auto sa = deal(a, 13), sb = deal(b, 14), sp = deal(pairs, 15);
  auto lt_run = spawn_local_parties(
      [&](Party& p) { return lt(p, sa[p.index()], sb[p.index()]); });
  const auto bits = reconstruct_bits(lt_run.results);
  auto max_run = spawn_local_parties(
      [&](Party& p) { return max_last_axis(p, sp[p.index()]); });
  const Tensor mx = reconstruct_tensor(max_run.results, ring);
  std::size_t lt_bad = 0, max_bad = 0;
  for (std::size_t i = 0; i < kFixedPairs; ++i) {
    const auto u = ring.to_signed(a[i]), v = ring.to_signed(b[i]);
    if (bits[i] != (u < v ? 1 : 0)) ++lt_bad;
    if (ring.to_signed(mx[i]) != std::max(u, v)) ++max_bad;
  }
  return {worst <= kFixedMulTol && lt_bad == 0 && max_bad == 0,
          "fixed_mul max error " + fmt("%.3g", worst) + " (bound " +
              fmt("%.3g", kFixedMulTol) + "); lt mismatches " +
              std::to_string(lt_bad) + ", max mismatches " +
              std::to_string(max_bad)};
}

Outcome negexp_fidelity() {
  const FixedEncoding enc;
  std::vector<double> x(kExpGrid);
  for (std::size_t i = 0; i < kExpGrid; ++i) {
    x[i] = -14.0 + 14.0 * static_cast<double>(i) / (kExpGrid - 1);
  }
  const Tensor xe(Shape{kExpGrid}, enc.encode(x));
  auto run = run_unary(
      [](Party& p, const ShareTensor& s) { return neg_exp(p, s); }, xe, 16);
  const auto y = enc.decode(reconstruct_tensor(run.results, enc.ring()).data);
  double vs_exact = 0, vs_twin = 0;
  for (std::size_t i = 0; i < kExpGrid; ++i) {
    const double xi = enc.decode(xe[i]);
    vs_exact = std::max(vs_exact, std::abs(y[i] - std::exp(xi)));
    vs_twin = std::max(vs_twin, std::abs(y[i] - approx_negexp(xi)));
  }
  const bool threshold = std::exp(-14.0) < std::ldexp(1.0, -18);
  const double exact_bound = kEpsFit + kNegExpLsb * kLsb;
  return {threshold && vs_exact <= exact_bound && vs_twin <= kNegExpLsb * kLsb,
          "vs exact " + fmt("%.6f", vs_exact) + " (eps_fit " +
              fmt("%.8f", kEpsFit) + " + 32 LSB), vs twin " +
              fmt("%.1f", vs_twin / kLsb) + " LSB (bound 32); exp(-14) = " +
              fmt("%.3g", std::exp(-14.0)) + " < 2^-18"};
}

Outcome activation_accuracy() {
  const auto t0 = Clock::now();
  const auto silu = reference::grid_error(approx_silu, reference::exact_silu,
                                          -8.0, 8.0, kActGrid);
  const auto mish = reference::grid_error(approx_mish, reference::exact_mish,
                                          -8.0, 8.0, kActGrid);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  auto in_range = [](double m) { return m >= kMseLo && m <= kMseHi; };
  return {in_range(silu.mse) && in_range(mish.mse) && secs < kAccuracySeconds,
          "MSE on [-8, 8]: silu " + fmt("%.4e", silu.mse) + ", mish " +
              fmt("%.4e", mish.mse) + " (required range [1e-6, 1e-3])"};
}

Outcome twin_equivalence() {
  const FixedEncoding enc;
  std::ostringstream detail;
  bool ok = true;

  // Softmax, masked denominator, 1000 rows of 8.
  {
    const auto v = uniform(kVectors * kSoftmaxLen, -5, 5, 17);
    const Tensor xe(Shape{kVectors, kSoftmaxLen}, enc.encode(v));
    auto run = run_unary(
        [](Party& p, const ShareTensor& s) { return secure_softmax(p, s); }, xe,
        18);
    const auto y = enc.decode(reconstruct_tensor(run.results, enc.ring()).data);
    SoftMaxConfig twin;
    twin.epsilon = effective_epsilon(twin.epsilon, enc);
    double worst = 0, worst_sum = 0;
    for (std::size_t r = 0; r < kVectors; ++r) {
      std::vector<double> row(kSoftmaxLen);
      for (std::size_t j = 0; j < kSoftmaxLen; ++j) {
        row[j] = enc.decode(xe[r * kSoftmaxLen + j]);
      }
      const auto t = approx_softmax(row, twin);
      double sum = 0;
      for (std::size_t j = 0; j < kSoftmaxLen; ++j) {
        worst = std::max(worst, std::abs(y[r * kSoftmaxLen + j] - t[j]));
        sum += y[r * kSoftmaxLen + j];
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    const double sum_tol = kRowSumLsbPerEntry * kSoftmaxLen * kLsb;
    ok &= worst <= kSoftmaxLsb * kLsb && worst_sum <= sum_tol;
    detail << "softmax " << fmt("%.1f", worst / kLsb) << " LSB (32), row sum "
           << fmt("%.1f", worst_sum / kLsb) << " LSB ("
           << fmt("%.0f", sum_tol / kLsb) << ")";

    const Tensor ue(Shape{1, kSoftmaxLen},
                    enc.encode(std::vector<double>(kSoftmaxLen, 0.7)));
    auto urun = run_unary(
        [](Party& p, const ShareTensor& s) { return secure_softmax(p, s); }, ue,
        19);
    const auto u = enc.decode(reconstruct_tensor(urun.results, enc.ring()).data);
    double uworst = 0;
    for (double vv : u) uworst = std::max(uworst, std::abs(vv - 1.0 / kSoftmaxLen));
    ok &= uworst <= kSoftmaxLsb * kLsb;
    detail << ", uniform " << fmt("%.1f", uworst / kLsb) << " LSB";
  }

  // Activations, 1000 vectors of 16.
  const auto v = uniform(kVectors * kActLen, -8, 8, 20);
  const Tensor xe(Shape{kVectors, kActLen}, enc.encode(v));
  const std::pair<Activation, double (*)(double)> acts[] = {
      {Activation::kSiLU, approx_silu},
      {Activation::kMish, approx_mish},
      {Activation::kReLU, approx_relu}};
  for (const auto& [a, twin] : acts) {
    auto run = run_unary(
        [a = a](Party& p, const ShareTensor& s) {
          return secure_activation(p, s, a);
        },
        xe, 21);
    const auto y = enc.decode(reconstruct_tensor(run.results, enc.ring()).data);
    double worst = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      worst = std::max(worst, std::abs(y[i] - twin(enc.decode(xe[i]))));
    }
    ok &= worst <= kActivationLsb * kLsb;
    detail << ", " << activation_name(a) << " " << fmt("%.1f", worst / kLsb)
           << " LSB (8)";
  }
  return {ok, detail.str()};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  Config cfg;  // DDIM, 50 steps, 28x28, seed 7
  cfg.timeout_ms = 60000;
  const auto params = init_params(DenoiserShape{}, 11);
  const Job job = make_sample_job(cfg, params);
  const auto a = run_local_job(cfg, job);
  const auto b = run_local_job(cfg, job);

  // TCP on loopback, ports picked by the kernel.
  std::array<std::unique_ptr<Listener>, 3> listeners;
  for (int i = 0; i < 3; ++i) {
    listeners[i] = std::make_unique<Listener>(Endpoint{"127.0.0.1", 0});
    cfg.parties[i] = "127.0.0.1:" + std::to_string(listeners[i]->port());
  }
  std::array<std::future<LabelCosts>, 3> parties;
  for (int i = 0; i < 3; ++i) {
    parties[i] = std::async(std::launch::async, [&, i] {
      return run_tcp_party(i, cfg, listeners[i].get());
    });
  }
  const auto tcp = run_tcp_client(cfg, job);
  for (auto& p : parties) p.get();

  const FixedEncoding enc = cfg.encoding();
  const auto secure = enc.decode(a.value.data);
  // The raw dump is float32.
  const auto plain = reference::run_plain_pipeline(
      params, cfg.sampler_config(), reference::Flavor::kApproximated, enc);
  double worst = 0;
  for (std::size_t i = 0; i < secure.size(); ++i) {
    const double s = static_cast<float>(secure[i]);
    const double p = static_cast<float>(plain[i]);
    worst = std::max(worst, std::abs(s - p));
  }
  const bool rerun = a.value.data == b.value.data;
  const bool backends = a.value.data == tcp.value.data &&
                        a.cost.bytes_sent == tcp.cost.bytes_sent;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {worst <= kSampleTol && rerun && backends && secs < kSampleSeconds,
          "max pixel gap " + fmt("%.3e", worst) + " (bound 1e-2); rerun " +
              (rerun ? "identical" : "DIFFERS") + "; local vs TCP " +
              (backends ? "identical" : "DIFFER") + "; " +
              std::to_string(a.cost.total_bytes()) + " B, " +
              std::to_string(a.cost.rounds) + " rounds"};
}

Outcome communication() {
  const Config cfg;
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t n : {16, 64, 256}) {
    for (const char* op : {"softmax", "silu", "mish"}) {
      const auto ours = bench_protocol(cfg, op, n, 1);
      const auto base = bench_protocol(cfg, std::string("baseline-") + op, n, 1);
      ok &= ours.bytes < base.bytes;
      detail << (detail.tellp() > 0 ? ", " : "") << op << "@" << n << " x"
             << fmt("%.2f", base.bytes / ours.bytes);
    }
  }
  return {ok, "baseline/ours bytes: " + detail.str()};
}

Outcome schedule_identities() {
  const auto s = make_linear_schedule(1000);
  double worst = 0;
  for (int t = 1; t <= 1000; ++t) {
    worst = std::max(worst, std::abs(s.alpha[t] - (1.0 - s.beta[t])));
    worst = std::max(worst, std::abs(s.alpha_bar[t] - s.alpha_bar[t - 1] * s.alpha[t]));
    const double bt =
        (1.0 - s.alpha_bar[t - 1]) / (1.0 - s.alpha_bar[t]) * s.beta[t];
    worst = std::max(worst, std::abs(s.beta_tilde[t] - bt));
  }
  const auto x0 = uniform(784, -1, 1, 22);
  const auto e = uniform(784, -3, 3, 23);
  double q = 0;
  for (int t : {1, 10, 500, 1000}) {
    const auto xt = q_sample(RealTensor(Shape{1, 784}, x0), t,
                             RealTensor(Shape{1, 784}, e), s);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double want = std::sqrt(s.alpha_bar[t]) * x0[i] +
                          std::sqrt(1.0 - s.alpha_bar[t]) * e[i];
      q = std::max(q, std::abs(xt[i] - want));
    }
  }
  const bool ends = s.beta[1] == 1e-4 && std::abs(s.beta[1000] - 0.02) < kScheduleTol;
  return {worst <= kScheduleTol && q <= kScheduleTol && ends,
          "identity residual " + fmt("%.2e", worst) + ", q_sample residual " +
              fmt("%.2e", q)};
}

}  // namespace

int main() {
  report(1, "sharing soundness", sharing_soundness);
  report(2, "multiplication exactness", mul_exactness);
  report(3, "fixed-point tolerance", fixed_point);
  report(4, "neg_exp fidelity", negexp_fidelity);
  report(5, "activation accuracy", activation_accuracy);
  report(6, "twin equivalence", twin_equivalence);
  report(7, "end-to-end sampling", end_to_end);
  report(8, "communication direction", communication);
  report(9, "schedule identities", schedule_identities);
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
