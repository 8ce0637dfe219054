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
#include <numeric>

#include "doctest.h"
#include "test_util.hpp"
#include "tripart/baseline.hpp"
#include "tripart/fit.hpp"
#include "tripart/reference.hpp"

using namespace tripart;
using namespace tripart::reference;

namespace {

// Exact vs approximated plaintext pipelines, DDIM 50 steps, seed 7,
// init_params seed 11. Regression values.
constexpr double kPipelineGapSilu = 1.633670e-2;
constexpr double kPipelineGapMish = 3.579092e-2;
constexpr double kPipelineGapRelu = 3.223630e-3;
constexpr double kPipelineGapRel = 1e-4;

// Least-squares exp refit, degree 7 on [-14, 0].
constexpr double kRefitC0 = 0.15302092;
constexpr double kRefitMaxAbs = 0.0135026;
constexpr double kCoeffTol = 1e-2;

}  // namespace

TEST_CASE("exact functions at known points") {
  CHECK(exact_silu(0.0) == 0.0);
  CHECK(exact_mish(0.0) == 0.0);
  CHECK(exact_relu(-2.0) == 0.0);
  CHECK(exact_relu(2.5) == 2.5);
  CHECK(exact_sigmoid(0.0) == 0.5);
  CHECK(exact_softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(exact_tanh(0.0) == 0.0);
  CHECK(exact_recip(4.0) == 0.25);
  CHECK(exact_silu(2.0) == doctest::Approx(2.0 / (1.0 + std::exp(-2.0))));
  CHECK(exact_mish(1.0) ==
        doctest::Approx(std::tanh(std::log1p(std::exp(1.0)))));
  // Large arguments stay finite.
  CHECK(exact_softplus(800.0) == doctest::Approx(800.0));
  CHECK(exact_mish(800.0) == doctest::Approx(800.0));
  CHECK(exact_silu(-800.0) == doctest::Approx(0.0));
}

TEST_CASE("exact softmax") {
  const auto u = exact_softmax({3.0, 3.0, 3.0, 3.0});
  for (double v : u) CHECK(v == doctest::Approx(0.25));
  const auto s = exact_softmax({1000.0, 0.0});
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));
  const auto r = exact_softmax({0.1, -2.0, 0.7});
  CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0));
  CHECK(r[1] / r[0] == doctest::Approx(std::exp(-2.1)));
}

TEST_CASE("grid error reports the worst point") {
  const auto g = grid_error([](double x) { return x; },
                            [](double x) { return x * x; }, 0.0, 2.0, 3);
  CHECK(g.max_abs == doctest::Approx(2.0));
  CHECK(g.worst_x == 2.0);
  CHECK(g.mse == doctest::Approx((0.0 + 0.0 + 4.0) / 3.0));
  CHECK_THROWS_AS(grid_error(exact_exp, exact_exp, 1.0, 0.0, 10), ArgumentError);
}

TEST_CASE("plain ops flavors") {
  DenoiserConfig mish;
  mish.activation = Activation::kMish;
  const auto ex = plain_ops(Flavor::kExact, mish);
  const auto ap = plain_ops(Flavor::kApproximated, mish);
  CHECK(ex.activation(1.3) == exact_mish(1.3));
  CHECK(ap.activation(1.3) == approx_mish(1.3));
  CHECK(ex.time_activation(1.3) == exact_silu(1.3));
  CHECK(ap.time_activation(1.3) == approx_silu(1.3));
  const std::vector<double> v{0.2, -1.0, 0.5};
  CHECK(ex.softmax(v) == exact_softmax(v));
  SoftMaxConfig sm;
  sm.epsilon = effective_epsilon(sm.epsilon, FixedEncoding{});
  CHECK(ap.softmax(v) == approx_softmax(v, sm));
  CHECK(flavor_name(Flavor::kExact) != flavor_name(Flavor::kApproximated));
}

TEST_CASE("exact and approximated pipelines stay close") {
  const auto p = init_params(DenoiserShape{}, 11);
  const std::pair<Activation, double> cases[] = {
      {Activation::kSiLU, kPipelineGapSilu},
      {Activation::kMish, kPipelineGapMish},
      {Activation::kReLU, kPipelineGapRelu}};
  for (const auto& [a, gap] : cases) {
    CAPTURE(activation_name(a));
    SamplerConfig cfg;
    cfg.denoiser.activation = a;
    const auto ex = run_plain_pipeline(p, cfg, Flavor::kExact);
    const auto ap = run_plain_pipeline(p, cfg, Flavor::kApproximated);
    double m = 0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      m = std::max(m, std::abs(ex[i] - ap[i]));
    }
    CHECK(m == doctest::Approx(gap).epsilon(kPipelineGapRel));
    CHECK(run_plain_pipeline(p, cfg, Flavor::kExact).data == ex.data);
  }
}

TEST_CASE("the exp threshold is below one LSB") {
  CHECK(exact_exp(-14.0) < std::ldexp(1.0, -18));
}

TEST_CASE("exp refit against the shipped coefficients") {
  const auto refit = fit_exp_chebyshev(-14.0, 7);
  const auto shipped = ChebyshevExpFit::standard();
  REQUIRE(refit.coeffs.size() == 8);
  CHECK(refit.coeffs[0] == doctest::Approx(kRefitC0).epsilon(1e-6));
  for (int j = 1; j < 8; ++j) {
    CAPTURE(j);
    CHECK(std::abs(refit.coeffs[j] - shipped.coeffs[j]) <= kCoeffTol);
  }
  const auto r = fit_report([&](double x) { return approx_chebyshev(x, refit); },
                            exact_exp, -14.0, 0.0, 4096);
  CHECK(r.max_abs == doctest::Approx(kRefitMaxAbs).epsilon(1e-4));
  CHECK(r.max_abs < 0.04848381);
}

TEST_CASE("a degree 12 fit on a short interval is near exact") {
  const auto fit = fit_exp_chebyshev(-2.0, 12, 2000);
  const auto r = fit_report([&](double x) { return approx_chebyshev(x, fit); },
                            exact_exp, -2.0, 0.0, 1000);
  CHECK(r.max_abs < 1e-12);
}

TEST_CASE("piecewise refits reproduce the shipped activations") {
  for (Activation a : {Activation::kSiLU, Activation::kMish}) {
    CAPTURE(activation_name(a));
    const auto refit = fit_piecewise(a);
    const auto shipped = PiecewiseActivationFit::for_activation(a);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(refit.f0[j] - shipped.f0[j]) <= 1e-3);
    }
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(refit.f1[j] - shipped.f1[j]) <= 1e-3);
    }
  }
  CHECK(piece_powers(2) == std::vector<int>{0, 1, 2});
  CHECK(piece_powers(6) == std::vector<int>{0, 1, 2, 4, 6});
  CHECK(piece_powers(0) == std::vector<int>{0});
  CHECK_THROWS_AS(fit_piecewise(Activation::kReLU), ArgumentError);
}

TEST_CASE("single-piece fits and degenerate inputs") {
  const auto pw = piece_powers(2);
  const auto c = fit_monomials(exact_silu, -6.0, -2.0, pw);
  const auto r = fit_report([&](double x) { return eval_monomials(x, c, pw); },
                            exact_silu, -6.0, -2.0);
  CHECK(r.mse < 1e-3);
  const auto c0 = fit_monomials(exact_silu, -6.0, 6.0, piece_powers(0));
  const auto r0 = fit_report(
      [&](double x) { return eval_monomials(x, c0, piece_powers(0)); },
      exact_silu, -6.0, 6.0);
  CHECK(std::isfinite(r0.max_abs));
  CHECK(r0.max_abs > 1.0);
  CHECK_THROWS_AS(fit_monomials(exact_silu, 1.0, 1.0, pw), ArgumentError);
  CHECK_THROWS_AS(fit_exp_chebyshev(0.0, 7), ArgumentError);
  CHECK_THROWS_AS(fit_exp_chebyshev(-14.0, -1), ArgumentError);
}

TEST_CASE("limit-form baselines") {
  CHECK(limit_exp(0.0) == 1.0);
  CHECK(limit_exp(-1.0) == doctest::Approx(std::pow(1.0 - 1.0 / 256, 256)));
  CHECK(std::abs(limit_exp(-1.0) - std::exp(-1.0)) < 1e-3);
  const auto s = baseline_softmax_plain({1.0, 1.0, 1.0, 1.0});
  for (double v : s) CHECK(v == doctest::Approx(0.25));
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    CHECK(std::abs(baseline_silu_plain(x) - exact_silu(x)) < 5e-3);
    CHECK(std::abs(baseline_mish_plain(x) - exact_mish(x)) < 5e-3);
  }
  CHECK(baseline_silu_plain(0.0) == 0.0);
  CHECK_THROWS_AS(baseline_softmax_plain({}), ArgumentError);
}
