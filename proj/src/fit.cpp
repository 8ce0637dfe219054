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

#include "tripart/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "tripart/error.hpp"
#include "tripart/reference.hpp"

namespace tripart {
namespace {

std::vector<double> solve_least_squares(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b) {
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + c.size());
}

void check_degree(int degree) {
  if (degree < 0) throw ArgumentError("fit degree must be non-negative");
}

}  // namespace

std::vector<double> fit_grid(double lo, double hi, int n) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ArgumentError("degenerate fit interval");
  }
  if (n < 2) throw ArgumentError("fit needs at least two samples");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}

ChebyshevExpFit fit_exp_chebyshev(double t_exp, int degree, int samples) {
  check_degree(degree);
  if (!(t_exp < 0)) throw ArgumentError("degenerate fit interval");
  const auto xs = fit_grid(t_exp, 0.0, samples);
  Eigen::MatrixXd a(samples, degree + 1);
  Eigen::VectorXd b(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = 1.0 - 2.0 * xs[i] / t_exp;
    double prev = 1.0;
    double cur = t;
    a(i, 0) = 1.0;
    if (degree >= 1) a(i, 1) = t;
    for (int k = 2; k <= degree; ++k) {
      const double next = 2.0 * t * cur - prev;
      a(i, k) = next;
      prev = cur;
      cur = next;
    }
    b(i) = std::exp(xs[i]);
  }
  return ChebyshevExpFit{t_exp, solve_least_squares(a, b)};
}

std::vector<int> piece_powers(int degree) {
  check_degree(degree);
  std::vector<int> p;
  for (int k = 0; k <= degree; ++k) {
    if (k <= 2 || k % 2 == 0) p.push_back(k);
  }
  return p;
}

std::vector<double> fit_monomials(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  const std::vector<int>& powers,
                                  int samples) {
  if (powers.empty()) throw ArgumentError("no powers to fit");
  const auto xs = fit_grid(lo, hi, samples);
  Eigen::MatrixXd a(samples, static_cast<Eigen::Index>(powers.size()));
  Eigen::VectorXd b(samples);
  for (int i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < powers.size(); ++j) {
      a(i, static_cast<Eigen::Index>(j)) = std::pow(xs[i], powers[j]);
    }
    b(i) = f(xs[i]);
  }
  return solve_least_squares(a, b);
}

double eval_monomials(double x, const std::vector<double>& coeffs,
                      const std::vector<int>& powers) {
  double y = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    y += coeffs[j] * std::pow(x, powers[j]);
  }
  return y;
}

PiecewiseActivationFit fit_piecewise(Activation kind, int samples) {
  PiecewiseActivationFit fit;
  fit.kind = kind;
  std::function<double(double)> f;
  if (kind == Activation::kSiLU) {
    f = reference::exact_silu;
  } else if (kind == Activation::kMish) {
    f = reference::exact_mish;
  } else {
    throw ArgumentError("only silu and mish have piecewise fits");
  }
  const auto c0 = fit_monomials(f, fit.lo, fit.mid, piece_powers(2), samples);
  const auto c1 = fit_monomials(f, fit.mid, fit.hi, piece_powers(6), samples);
  std::copy(c0.begin(), c0.end(), fit.f0.begin());
  std::copy(c1.begin(), c1.end(), fit.f1.begin());
  return fit;
}

FitReport fit_report(const std::function<double(double)>& approx,
                     const std::function<double(double)>& exact, double lo,
                     double hi, int samples) {
  const auto g = reference::grid_error(approx, exact, lo, hi, samples);
  return FitReport{g.max_abs, g.mse, g.worst_x};
}

}  // namespace tripart
