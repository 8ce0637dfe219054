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

#include "tripart/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tripart/error.hpp"
#include "tripart/kernels.hpp"
#include "tripart/primitives.hpp"
#include "tripart/rss.hpp"

namespace tripart {

namespace k = kernels::omp;

ChebyshevExpFit ChebyshevExpFit::standard() {
  return ChebyshevExpFit{-14.0,
                         {0.14021878, 0.27541278, 0.22122865, 0.14934221,
                          0.09077360, 0.04369614, 0.02087868, 0.00996535}};
}

void ChebyshevExpFit::validate() const {
  if (coeffs.empty()) throw ArgumentError("exp fit has no coefficients");
  if (!(t_exp < 0)) throw ArgumentError("exp fit threshold must be negative");
}

std::vector<std::vector<long long>> chebyshev_basis(int degree) {
  if (degree < 0) throw ArgumentError("negative Chebyshev degree");
  std::vector<std::vector<long long>> t(degree + 1,
                                        std::vector<long long>(degree + 1, 0));
  t[0][0] = 1;
  if (degree >= 1) t[1][1] = 1;
  for (int n = 1; n < degree; ++n) {
    // T_{n+1} = 2 t T_n - T_{n-1}
    for (int kk = 0; kk <= degree; ++kk) {
      long long v = -t[n - 1][kk];
      if (kk > 0) v += 2 * t[n][kk - 1];
      t[n + 1][kk] = v;
    }
  }
  return t;
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kReLU:
      return "relu";
    case Activation::kSiLU:
      return "silu";
    case Activation::kMish:
      return "mish";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kReLU;
  if (name == "silu") return Activation::kSiLU;
  if (name == "mish") return Activation::kMish;
  throw ArgumentError("unknown activation '" + name + "'");
}

PiecewiseActivationFit PiecewiseActivationFit::silu() {
  PiecewiseActivationFit f;
  f.kind = Activation::kSiLU;
  f.f0 = {-0.52212664, -0.16910363, -0.01420163};
  f.f1 = {0.03453821, 0.49379432, 0.19784596, -0.00602401, 0.00008032};
  return f;
}

PiecewiseActivationFit PiecewiseActivationFit::mish() {
  PiecewiseActivationFit f;
  f.kind = Activation::kMish;
  f.f0 = {-0.55684445, -0.18375535, -0.01572019};
  f.f1 = {0.07559242, 0.54902050, 0.20152583, -0.00735309, 0.00010786};
  return f;
}

PiecewiseActivationFit PiecewiseActivationFit::for_activation(Activation a) {
  if (a == Activation::kSiLU) return silu();
  if (a == Activation::kMish) return mish();
  throw ArgumentError("relu has no polynomial fit");
}

double PiecewiseActivationFit::eval_f0(double x) const {
  return f0[0] + f0[1] * x + f0[2] * x * x;
}

double PiecewiseActivationFit::eval_f1(double x) const {
  const double x2 = x * x;
  const double x4 = x2 * x2;
  return f1[0] + f1[1] * x + f1[2] * x2 + f1[3] * x4 + f1[4] * x4 * x2;
}

double effective_epsilon(double epsilon, const FixedEncoding& enc) {
  if (epsilon <= 0) return 0.0;
  const double lsb = std::ldexp(1.0, -enc.fraction_bits);
  return std::max(enc.decode(enc.encode(epsilon)), lsb);
}

namespace {

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open coefficient file '" + path + "'");
  std::vector<double> v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    double x;
    if (!(is >> x)) {
      std::string rest;
      is.clear();
      if (is >> rest) {
        throw ArgumentError(path + ":" + std::to_string(lineno) +
                            ": not a number");
      }
      continue;
    }
    std::string extra;
    if (is >> extra) {
      throw ArgumentError(path + ":" + std::to_string(lineno) +
                          ": one coefficient per line");
    }
    v.push_back(x);
  }
  return v;
}

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write coefficient file '" + path + "'");
  out << header;
  out << std::setprecision(17);
  for (const auto& [name, value] : rows) out << value << "  # " << name << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

ChebyshevExpFit load_exp_coefficients(const std::string& path, double t_exp) {
  ChebyshevExpFit fit{t_exp, read_numbers(path)};
  fit.validate();
  return fit;
}

void save_exp_coefficients(const std::string& path, const ChebyshevExpFit& fit) {
  std::vector<std::pair<std::string, double>> rows;
  for (std::size_t j = 0; j < fit.coeffs.size(); ++j) {
    rows.emplace_back("C_" + std::to_string(j), fit.coeffs[j]);
  }
  std::ostringstream head;
  head << "# exp on [" << fit.t_exp << ", 0], Chebyshev coefficients C_0..C_"
       << fit.degree() << "\n";
  write_lines(path, head.str(), rows);
}

PiecewiseActivationFit load_activation_coefficients(const std::string& path,
                                                    Activation kind) {
  const auto v = read_numbers(path);
  if (v.size() != 8) {
    throw ArgumentError("activation coefficient file '" + path +
                        "' needs 8 values, found " + std::to_string(v.size()));
  }
  PiecewiseActivationFit fit;
  fit.kind = kind;
  std::copy_n(v.begin(), 3, fit.f0.begin());
  std::copy_n(v.begin() + 3, 5, fit.f1.begin());
  return fit;
}

void save_activation_coefficients(const std::string& path,
                                  const PiecewiseActivationFit& fit) {
  write_lines(path,
              "# " + activation_name(fit.kind) +
                  ": F0 c0 c1 c2, then F1 c0 c1 c2 c4 c6\n",
              {{"F0 c0", fit.f0[0]},
               {"F0 c1", fit.f0[1]},
               {"F0 c2", fit.f0[2]},
               {"F1 c0", fit.f1[0]},
               {"F1 c1", fit.f1[1]},
               {"F1 c2", fit.f1[2]},
               {"F1 c4", fit.f1[3]},
               {"F1 c6", fit.f1[4]}});
}

double approx_chebyshev(double x, const ChebyshevExpFit& fit) {
  const double t = -2.0 * x / fit.t_exp + 1.0;
  double prev = 1.0, cur = t;
  double sum = fit.coeffs[0];
  for (int j = 1; j <= fit.degree(); ++j) {
    sum += fit.coeffs[j] * cur;
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return sum;
}

double approx_negexp(double x, const ChebyshevExpFit& fit) {
  return x < fit.t_exp ? 0.0 : approx_chebyshev(x, fit);
}

std::vector<double> approx_softmax(const std::vector<double>& x,
                                   const SoftMaxConfig& cfg) {
  if (x.empty()) throw ArgumentError("softmax of an empty vector");
  const double m = *std::max_element(x.begin(), x.end());
  std::vector<double> z(x.size()), mask(x.size());
  double sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xh = x[i] - m - cfg.epsilon;
    mask[i] = xh > cfg.fit.t_exp ? 1.0 : 0.0;
    z[i] = approx_chebyshev(xh, cfg.fit);
    if (cfg.masked_denominator) z[i] *= mask[i];
    sum += z[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = z[i] / sum;
    if (!cfg.masked_denominator) z[i] *= mask[i];
  }
  return z;
}

double approx_activation(double x, const PiecewiseActivationFit& fit) {
  if (x < fit.lo) return 0.0;
  if (x < fit.mid) return fit.eval_f0(x);
  if (x <= fit.hi) return fit.eval_f1(x);
  return x;
}

double approx_silu(double x) {
  return approx_activation(x, PiecewiseActivationFit::silu());
}

double approx_mish(double x) {
  return approx_activation(x, PiecewiseActivationFit::mish());
}

double approx_relu(double x) { return x > 0 ? x : 0.0; }

std::vector<double> embedding_frequencies(int half) {
  if (half < 1) throw ArgumentError("embedding needs at least two dimensions");
  std::vector<double> f(half);
  for (int j = 0; j < half; ++j) {
    f[j] = std::exp(-std::log(10000.0) * j / half);
  }
  return f;
}

std::vector<double> timestep_embedding(int t, int dim) {
  if (dim % 2 != 0) throw ArgumentError("embedding dimension must be even");
  const auto f = embedding_frequencies(dim / 2);
  std::vector<double> e(dim);
  for (int j = 0; j < dim / 2; ++j) {
    e[j] = std::sin(t * f[j]);
    e[j + dim / 2] = std::cos(t * f[j]);
  }
  return e;
}

ShareTensor chebyshev_exp(Party& party, const ShareTensor& x,
                          const ChebyshevExpFit& fit) {
  fit.validate();
  auto scope = party.scope("chebyshev");
  const Ring ring = party.ring();
  const FixedEncoding& enc = party.enc();
  const int d = fit.degree();
  const RingElement one = enc.encode(1.0);

  // t = -2x / t_exp + 1, then t^2..t^d by repeated multiplication.
  std::vector<ShareTensor> pw(d + 1);
  if (d >= 1) {
    pw[1] = add_const(fixed_scale(party, x, -2.0 / fit.t_exp), one, party.id(),
                      ring);
  }
  for (int i = 2; i <= d; ++i) pw[i] = fixed_mul(party, pw[i - 1], pw[1]);

  // sum_{j>=1} C_j T_j(t) with T_j an integer combination of the powers;
  // one truncation, then C_0 as a constant.
  const auto basis = chebyshev_basis(d);
  ShareTensor acc(x.shape);
  for (int j = 1; j <= d; ++j) {
    ShareTensor tj(x.shape);
    for (int kk = 1; kk <= j; ++kk) {
      if (basis[j][kk] == 0) continue;
      k::axpy(pw[kk].lo, static_cast<RingElement>(basis[j][kk]), tj.lo,
              ring.mask());
      k::axpy(pw[kk].hi, static_cast<RingElement>(basis[j][kk]), tj.hi,
              ring.mask());
    }
    tj = add_const(tj, ring.mul(static_cast<RingElement>(basis[j][0]), one),
                   party.id(), ring);
    const RingElement cj = enc.encode(fit.coeffs[j]);
    k::axpy(tj.lo, cj, acc.lo, ring.mask());
    k::axpy(tj.hi, cj, acc.hi, ring.mask());
  }
  ShareTensor z = d >= 1 ? truncate(party, acc) : acc;
  return add_const(z, enc.encode(fit.coeffs[0]), party.id(), ring);
}

ShareTensor neg_exp(Party& party, const ShareTensor& x,
                    const ChebyshevExpFit& fit) {
  auto scope = party.scope("neg_exp");
  // Zero strictly below t_exp, the fit from t_exp upwards.
  const BitShare inside =
      not_bits(lt_const(party, x, party.enc().encode(fit.t_exp)), party.id());
  return mul_ba(party, inside, chebyshev_exp(party, x, fit));
}

ShareTensor secure_softmax(Party& party, const ShareTensor& x,
                           const SoftMaxConfig& cfg) {
  if (x.shape.empty() || x.shape.back() == 0) {
    throw ArgumentError("softmax over an empty axis");
  }
  auto scope = party.scope("softmax");
  const Ring ring = party.ring();
  const FixedEncoding& enc = party.enc();
  const std::size_t n = x.shape.back();

  const ShareTensor m = max_last_axis(party, x);
  const ShareTensor mb = reshape(broadcast_last(m, n), x.shape);
  const RingElement eps = enc.encode(effective_epsilon(cfg.epsilon, enc));
  const ShareTensor xh =
      add_const(sub(x, mb, ring), ring.neg(eps), party.id(), ring);

  const BitShare inside = gt_const(party, xh, enc.encode(cfg.fit.t_exp));
  ShareTensor z = chebyshev_exp(party, xh, cfg.fit);
  if (cfg.masked_denominator) z = mul_ba(party, inside, z);

  const ShareTensor s = sum_last_axis(z, ring);
  const ShareTensor r = recip(party, s, 0.9, static_cast<double>(n));
  const ShareTensor out =
      fixed_mul(party, z, reshape(broadcast_last(r, n), x.shape));
  return mul_ba(party, inside, out);
}

ShareTensor secure_piecewise(Party& party, const ShareTensor& x,
                             const PiecewiseActivationFit& fit) {
  auto scope = party.scope(activation_name(fit.kind));
  const Ring ring = party.ring();
  const FixedEncoding& enc = party.enc();
  const PartyId me = party.id();
  const std::size_t n = x.size();

  // b0 = [x < lo], b1 = [x < mid], b2 = [hi < x], one conversion for all.
  const ShareTensor c0 = add_const(x, ring.neg(enc.encode(fit.lo)), me, ring);
  const ShareTensor c1 = add_const(x, ring.neg(enc.encode(fit.mid)), me, ring);
  const ShareTensor c2 = add_const(neg(x, ring), enc.encode(fit.hi), me, ring);
  const BitShare bits = a2b_msb(party, concat_flat({&c0, &c1, &c2}));
  const BitShare b0 = slice_bits(bits, 0, n);
  const BitShare b1 = slice_bits(bits, n, n);
  const BitShare b2 = slice_bits(bits, 2 * n, n);
  const BitShare z0 = xor_bits(b0, b1);
  const BitShare z1 = not_bits(xor_bits(b1, b2), me);

  const ShareTensor x2 = square(party, x);
  const ShareTensor x4 = square(party, x2);
  const ShareTensor x6 = fixed_mul(party, x2, x4);

  // Coefficients carry `extra` more fraction bits than the encoding so that
  // small ones such as the x^6 term keep their precision; both branches are
  // then truncated together by f + extra.
  const int f = enc.fraction_bits;
  const int extra = extra_coefficient_bits(enc);
  auto coef = [&](double c, int bits) { return encode_scaled(c, bits, ring); };
  auto raw = [&](std::initializer_list<std::pair<double, const ShareTensor*>>
                     terms,
                 double c0v) {
    ShareTensor acc(x.shape);
    for (const auto& [c, t] : terms) {
      const RingElement ce = coef(c, f + extra);
      k::axpy(t->lo, ce, acc.lo, ring.mask());
      k::axpy(t->hi, ce, acc.hi, ring.mask());
    }
    return add_const(acc, coef(c0v, 2 * f + extra), me, ring);
  };
  const ShareTensor f0 =
      raw({{fit.f0[1], &x}, {fit.f0[2], &x2}}, fit.f0[0]);
  const ShareTensor f1 = raw(
      {{fit.f1[1], &x}, {fit.f1[2], &x2}, {fit.f1[3], &x4}, {fit.f1[4], &x6}},
      fit.f1[0]);
  const auto branches = split_flat(
      truncate(party, concat_flat({&f0, &f1}), f + extra), {x.shape, x.shape});

  const BitShare sel = concat_bits({&z0, &z1, &b2});
  const ShareTensor vals = concat_flat({&branches[0], &branches[1], &x});
  const auto parts = split_flat(mul_ba(party, sel, vals),
                                {x.shape, x.shape, x.shape});
  return add(add(parts[0], parts[1], ring), parts[2], ring);
}

ShareTensor secure_silu(Party& party, const ShareTensor& x) {
  return secure_piecewise(party, x, PiecewiseActivationFit::silu());
}

ShareTensor secure_mish(Party& party, const ShareTensor& x) {
  return secure_piecewise(party, x, PiecewiseActivationFit::mish());
}

ShareTensor secure_relu(Party& party, const ShareTensor& x) {
  auto scope = party.scope("relu");
  const BitShare positive = not_bits(a2b_msb(party, x), party.id());
  return mul_ba(party, positive, x);
}

ShareTensor secure_activation(Party& party, const ShareTensor& x,
                              Activation kind) {
  if (kind == Activation::kReLU) return secure_relu(party, x);
  return secure_piecewise(party, x, PiecewiseActivationFit::for_activation(kind));
}

namespace {

ShareTensor add_row_bias(const ShareTensor& y, const ShareTensor& b,
                         Ring ring) {
  const std::size_t out = y.shape.back();
  if (b.size() != out) {
    throw ArgumentError("bias of " + std::to_string(b.size()) +
                        " entries for " + std::to_string(out) + " outputs");
  }
  std::vector<std::size_t> idx(y.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i % out;
  return add(y, gather(b, idx, y.shape), ring);
}

}  // namespace

ShareTensor secure_linear(Party& party, const ShareTensor& x,
                          const ShareTensor& w, const ShareTensor& b) {
  auto scope = party.scope("linear");
  return add_row_bias(fixed_matmul(party, x, w), b, party.ring());
}

ShareTensor secure_linear_public_input(Party& party, const Tensor& x,
                                       const ShareTensor& w,
                                       const ShareTensor& b) {
  auto scope = party.scope("linear");
  const ShareTensor y = truncate(party, matmul_public_left(x, w, party.ring()));
  return add_row_bias(y, b, party.ring());
}

ShareTensor secure_time_embedding(Party& party, const Tensor& t_emb_public,
                                  const ShareTensor& w1, const ShareTensor& b1,
                                  const ShareTensor& w2, const ShareTensor& b2) {
  auto scope = party.scope("time_embedding");
  if (t_emb_public.rank() != 2 || w1.shape.size() != 2 ||
      t_emb_public.shape[1] != w1.shape[0] || w2.shape.size() != 2 ||
      w1.shape[1] != w2.shape[0]) {
    throw ArgumentError("time embedding shapes do not chain: " +
                        shape_str(t_emb_public.shape) + " x " +
                        shape_str(w1.shape) + " x " + shape_str(w2.shape));
  }
  const ShareTensor h = secure_linear_public_input(party, t_emb_public, w1, b1);
  return secure_linear(party, secure_silu(party, h), w2, b2);
}

ShareTensor secure_embedding_frequencies(Party& party, int half,
                                         const ChebyshevExpFit& fit) {
  auto scope = party.scope("embedding_frequencies");
  Tensor exps(Shape{static_cast<std::size_t>(half)});
  for (int j = 0; j < half; ++j) {
    exps[j] = party.enc().encode(-std::log(10000.0) * j / half);
  }
  return neg_exp(party, public_share(exps, party.id()), fit);
}

}  // namespace tripart
