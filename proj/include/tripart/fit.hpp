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

// Least-squares coefficient fitting for the polynomial approximations.

#pragma once

#include <functional>
#include <vector>

#include "tripart/nonlinear.hpp"

namespace tripart {

struct FitReport {
  double max_abs = 0;
  double mse = 0;
  double worst_x = 0;
};

// Uniform sample grid of n >= 2 points on [lo, hi]; ArgumentError when the
// interval is degenerate.
std::vector<double> fit_grid(double lo, double hi, int n);

// exp on [t_exp, 0] in the Chebyshev basis over t = 1 - 2x / t_exp.
ChebyshevExpFit fit_exp_chebyshev(double t_exp, int degree, int samples = 4096);

// Powers used for a piecewise piece of the given degree: 0, 1, 2 and the
// even powers above 2.
std::vector<int> piece_powers(int degree);

// Monomial least squares on [lo, hi] with the given powers.
std::vector<double> fit_monomials(const std::function<double(double)>& f,
                                  double lo, double hi,
                                  const std::vector<int>& powers,
                                  int samples = 4096);
double eval_monomials(double x, const std::vector<double>& coeffs,
                      const std::vector<int>& powers);

// Both pieces of a SiLU or Mish approximation: degree 2 on [lo, mid] and
// degree 6 on [mid, hi].
PiecewiseActivationFit fit_piecewise(Activation kind, int samples = 4096);

FitReport fit_report(const std::function<double(double)>& approx,
                     const std::function<double(double)>& exact, double lo,
                     double hi, int samples = 4096);

}  // namespace tripart
