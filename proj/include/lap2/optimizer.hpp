// Copyright 2026 The Lap2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>

#include "lap2/laplace_accountant.hpp"

namespace lap2 {

enum class CSpacing { kLinear, kLogarithmic };

struct SearchSpec {
  double c_min = 0.01;
  double c_max = 10.0;
  std::int64_t c_steps = 32;
  CSpacing c_spacing = CSpacing::kLogarithmic;
  double b_min = 1e-4;
  double b_max = 1e4;
  // Absolute bisection tolerance on b. The bisection additionally refines to
  // a 1e-4 relative width so wide brackets still resolve small optima.
  double tau = 1.0;  // defaults to 1e-4 * b_max
  std::int64_t lambda_max = 4096;

  void validate() const;
};

struct OptimizerResult {
  double c_star = std::numeric_limits<double>::quiet_NaN();
  double b_star = std::numeric_limits<double>::quiet_NaN();
  double rho_star = std::numeric_limits<double>::quiet_NaN();  // c_star / b_star
  double achieved_epsilon = std::numeric_limits<double>::quiet_NaN();
  std::int64_t lambda_star = 0;
  bool feasible = false;
};

// kappa(lambda) = lambda (lambda + 1) / (2 (2 lambda + 1)), the quadratic
// coefficient of the small-rho moment expansion alpha ~ T zeta^2 kappa rho^2.
double snr_kappa(std::int64_t lambda);

// Closed-form small-zeta estimate of the optimal sensitivity-to-noise ratio:
// rho* ~ eps / (2 zeta sqrt(T log(1/delta))).
double rho_star(double epsilon_target, double zeta, std::int64_t steps, double delta);

// First-order noise-scale initialization b* = clip / rho*; satisfies
// b_star_init * rho_star = clip to machine precision.
double b_star_init(double clip, double epsilon_target, double zeta, std::int64_t steps,
                   double delta);

// Grid over clip values with a warm-started bisection for the smallest
// feasible b per clip; returns the feasible pair maximizing clip/b (ties:
// larger clip, then smaller b). Infeasible search boxes yield a result with
// feasible = false rather than an exception.
OptimizerResult optimize_parameters(std::int64_t steps, double zeta, std::int64_t dim,
                                    double epsilon_target, double delta,
                                    const SearchSpec& spec,
                                    MultivariateMode mode = MultivariateMode::kAuto);

}  // namespace lap2
