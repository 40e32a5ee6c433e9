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
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lap2/laplace_accountant.hpp"

namespace lap2 {

// A privacy target that cannot be met inside the given search box or lambda
// grid. Carries exit-code semantics in the CLI, so it is distinct from
// argument validation failures.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrivacyPoint {
  double epsilon = 0.0;
  double delta = 0.0;
  double log_delta = kNegInf;  // kept alongside delta; delta can underflow
  std::int64_t lambda_star = 0;
};

// Per-step moment profile of the configured mechanism over lambda in
// [1, cfg.lambda_max]. pure_laplace has no moment profile and is rejected.
MomentProfile per_step_profile(const MechanismConfig& cfg);

// alpha_composed(lambda) = steps * alpha_step(lambda); +inf propagates.
MomentProfile compose(const MomentProfile& per_step, std::int64_t steps);

// Tail bound: delta = min over the lambda grid of exp(alpha - lambda epsilon),
// capped at 1. Records the minimizing lambda.
PrivacyPoint delta_for_epsilon(const MomentProfile& profile, double epsilon);

// Conversion to epsilon at fixed delta:
// epsilon = min over lambda of alpha/lambda + log(lambda/(lambda+1))
//           - (log(delta) + log(lambda+1)) / lambda, floored at zero.
// Throws InfeasibleError when every grid order is overflowed.
PrivacyPoint epsilon_for_delta(const MomentProfile& profile, double delta);

// Bisection for the smallest noise scale (within tau) whose epsilon lies at
// or below the target, given a forward map that is nonincreasing in the noise
// scale. Returns lo when the target is already met there; throws
// InfeasibleError when even hi misses the target, and std::logic_error when
// the bracket endpoints violate monotonicity.
double invert_noise_for_epsilon(const std::function<double(double)>& epsilon_of_noise,
                                double epsilon_target, double lo, double hi, double tau);

// Config-level wrapper: the config's noise_scale field is ignored and solved for.
double invert_noise_for_epsilon(const MechanismConfig& cfg, double epsilon_target,
                                double lo, double hi, double tau);

// Reusable forward map epsilon(noise_scale) for a fixed config; caches the
// per-lambda weight tables across calls.
std::function<double(double)> make_epsilon_of_noise(const MechanismConfig& cfg);

struct WallRow {
  double epsilon = 0.0;
  double noise_gaussian = kPosInf;  // +inf marks an infeasible inversion
  double noise_lap2 = kPosInf;
  double wr_gaussian = 0.0;  // |d log sigma / d log epsilon|, NaN when undefined
  double wr_lap2 = 0.0;
  double delta_gaussian = 0.0;  // at variance-matched noise sigma = b sqrt(2)
  double delta_lap2 = 0.0;
  double log_delta_gaussian = kNegInf;
  double log_delta_lap2 = kNegInf;
  bool feasible_gaussian = false;
  bool feasible_lap2 = false;
  bool left_wall = false;  // delta_g > 2 delta_l2 at this grid point
};

struct WallReport {
  double sampling_rate = 0.0;
  std::vector<WallRow> rows;  // sorted by epsilon ascending
  std::optional<double> left_wall_epsilon;
};

struct WallOptions {
  std::vector<double> sampling_rates;
  std::vector<double> epsilon_grid;  // strictly increasing, length >= 3
  double delta = 1e-5;
  std::int64_t dim = 1024;
  std::int64_t steps = 1000;
  std::int64_t lambda_max = 256;
  double clip = 1.0;
  double noise_lo = 1e-4;
  double noise_hi = 1e4;
  double tau = 1e-5;
  // Test hook: replaces both inverted noise curves with exactly 1/epsilon,
  // under which the log-log slope is identically one.
  bool synthetic_inverse = false;
  MultivariateMode mode = MultivariateMode::kAuto;
};

// Per sampling rate: invert both mechanisms' noise over the epsilon grid,
// compute W_R slopes by log-log central differences (one-sided at the ends),
// and compare tail deltas at variance-matched noise (sigma = b sqrt(2)).
// The left wall is the first grid epsilon where delta_g > 2 delta_l2.
std::vector<WallReport> wall_diagnostics(const WallOptions& options);

}  // namespace lap2
