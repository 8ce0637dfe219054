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

// Polynomial approximations of exp, SoftMax, SiLU and Mish, evaluated on
// shares, together with their plaintext twins in double precision.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "tripart/party.hpp"
#include "tripart/share.hpp"

namespace tripart {

// exp(x) on [t_exp, 0] as sum_j C_j T_j(t), t = -2x/t_exp + 1, and zero
// below t_exp.
struct ChebyshevExpFit {
  double t_exp = -14.0;
  std::vector<double> coeffs;  // C_0 .. C_d

  // Default degree-7 coefficients.
  static ChebyshevExpFit standard();

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  void validate() const;
};

// Power-basis integer coefficients of T_0..T_degree:
// result[j][k] is the coefficient of t^k in T_j.
std::vector<std::vector<long long>> chebyshev_basis(int degree);

enum class Activation { kReLU, kSiLU, kMish };

std::string activation_name(Activation a);
// Throws ArgumentError for anything but relu, silu, mish.
Activation parse_activation(const std::string& name);

// Zero below `lo`, F0 on [lo, mid), F1 on [mid, hi], identity above `hi`.
// F0 = c0 + c1 x + c2 x^2; F1 = c0 + c1 x + c2 x^2 + c4 x^4 + c6 x^6.
struct PiecewiseActivationFit {
  Activation kind = Activation::kSiLU;
  double lo = -6.0;
  double mid = -2.0;
  double hi = 6.0;
  std::array<double, 3> f0{};  // c0, c1, c2
  std::array<double, 5> f1{};  // c0, c1, c2, c4, c6

  static PiecewiseActivationFit silu();
  static PiecewiseActivationFit mish();
  static PiecewiseActivationFit for_activation(Activation a);

  double eval_f0(double x) const;
  double eval_f1(double x) const;
};

struct SoftMaxConfig {
  // Subtracted after the maximum so that the largest entry sits strictly
  // inside the fitted interval. Under shares it is at least one LSB.
  double epsilon = 1e-6;
  // Masks the numerators before summing them into the denominator.
  bool masked_denominator = true;
  ChebyshevExpFit fit = ChebyshevExpFit::standard();
};

// The epsilon actually subtracted under fixed-point encoding.
double effective_epsilon(double epsilon, const FixedEncoding& enc);

// Coefficient files: one number per line, '#' starts a comment.
// Exp files list C_0..C_d. Activation files list F0 c0 c1 c2 then
// F1 c0 c1 c2 c4 c6.
ChebyshevExpFit load_exp_coefficients(const std::string& path,
                                      double t_exp = -14.0);
void save_exp_coefficients(const std::string& path, const ChebyshevExpFit& fit);
PiecewiseActivationFit load_activation_coefficients(const std::string& path,
                                                    Activation kind);
void save_activation_coefficients(const std::string& path,
                                  const PiecewiseActivationFit& fit);

// Plaintext twins.
double approx_chebyshev(double x, const ChebyshevExpFit& fit);
double approx_negexp(double x, const ChebyshevExpFit& fit = ChebyshevExpFit::standard());
std::vector<double> approx_softmax(const std::vector<double>& x,
                                   const SoftMaxConfig& cfg);
double approx_silu(double x);
double approx_mish(double x);
double approx_activation(double x, const PiecewiseActivationFit& fit);
double approx_relu(double x);

// Sinusoidal embedding of a public timestep: [sin(t f_j)..., cos(t f_j)...]
// with f_j = exp(-ln(10000) j / half), half = dim / 2.
std::vector<double> timestep_embedding(int t, int dim);
std::vector<double> embedding_frequencies(int half);

// Secure versions. All operate elementwise except softmax (last axis).
// Fit without the mask below t_exp.
ShareTensor chebyshev_exp(Party& party, const ShareTensor& x,
                          const ChebyshevExpFit& fit);
ShareTensor neg_exp(Party& party, const ShareTensor& x,
                    const ChebyshevExpFit& fit = ChebyshevExpFit::standard());
ShareTensor secure_softmax(Party& party, const ShareTensor& x,
                           const SoftMaxConfig& cfg = {});
ShareTensor secure_piecewise(Party& party, const ShareTensor& x,
                             const PiecewiseActivationFit& fit);
ShareTensor secure_silu(Party& party, const ShareTensor& x);
ShareTensor secure_mish(Party& party, const ShareTensor& x);
ShareTensor secure_relu(Party& party, const ShareTensor& x);
ShareTensor secure_activation(Party& party, const ShareTensor& x,
                              Activation kind);

// x [m, in] times W [in, out] plus b [out], truncated once.
ShareTensor secure_linear(Party& party, const ShareTensor& x,
                          const ShareTensor& w, const ShareTensor& b);
// Same with a public left operand; only the truncation communicates.
ShareTensor secure_linear_public_input(Party& party, const Tensor& x,
                                       const ShareTensor& w,
                                       const ShareTensor& b);

// Linear -> SiLU -> Linear on a public embedding row [1, d].
ShareTensor secure_time_embedding(Party& party, const Tensor& t_emb_public,
                                  const ShareTensor& w1, const ShareTensor& b1,
                                  const ShareTensor& w2, const ShareTensor& b2);

// Shares of f_j = exp(-ln(10000) j / half) computed with neg_exp.
ShareTensor secure_embedding_frequencies(
    Party& party, int half,
    const ChebyshevExpFit& fit = ChebyshevExpFit::standard());

}  // namespace tripart
