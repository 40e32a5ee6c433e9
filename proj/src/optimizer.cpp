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

#include "lap2/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lap2/budget.hpp"

namespace lap2 {

void SearchSpec::validate() const {
  if (!(c_min > 0.0) || !(c_max >= c_min) || !std::isfinite(c_max)) {
    throw std::invalid_argument("SearchSpec: need 0 < c_min <= c_max");
  }
  if (c_steps < 1) throw std::invalid_argument("SearchSpec: c_steps must be >= 1");
  if (!(b_min > 0.0) || !(b_max > b_min) || !std::isfinite(b_max)) {
    throw std::invalid_argument("SearchSpec: need 0 < b_min < b_max");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("SearchSpec: tau must be > 0");
  if (lambda_max < 1) throw std::invalid_argument("SearchSpec: lambda_max must be >= 1");
}

double snr_kappa(std::int64_t lambda) {
  if (lambda < 0) throw std::domain_error("snr_kappa: lambda must be >= 0");
  const double l = static_cast<double>(lambda);
  return l * (l + 1.0) / (2.0 * (2.0 * l + 1.0));
}

double rho_star(double epsilon_target, double zeta, std::int64_t steps, double delta) {
  if (!(epsilon_target > 0.0)) throw std::domain_error("rho_star: epsilon must be > 0");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw std::domain_error("rho_star: zeta must lie in (0,1]");
  if (steps < 1) throw std::domain_error("rho_star: steps must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("rho_star: delta must lie in (0,1)");
  const double s = std::sqrt(static_cast<double>(steps) * -std::log(delta));
  return epsilon_target / (2.0 * zeta * s);
}

double b_star_init(double clip, double epsilon_target, double zeta, std::int64_t steps,
                   double delta) {
  if (!(clip > 0.0)) throw std::domain_error("b_star_init: clip must be > 0");
  // (2 zeta / eps) sqrt(T log(1/delta)) * clip, written through rho_star so
  // the b * rho = clip identity holds exactly.
  return clip / rho_star(epsilon_target, zeta, steps, delta);
}

namespace {

std::vector<double> clip_grid(const SearchSpec& spec) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(spec.c_steps));
  if (spec.c_steps == 1 || spec.c_min == spec.c_max) {
    grid.push_back(spec.c_min);
    return grid;
  }
  const double n = static_cast<double>(spec.c_steps - 1);
  for (std::int64_t i = 0; i < spec.c_steps; ++i) {
    const double t = static_cast<double>(i) / n;
    if (spec.c_spacing == CSpacing::kLinear) {
      grid.push_back(spec.c_min + t * (spec.c_max - spec.c_min));
    } else {
      grid.push_back(spec.c_min * std::exp(t * std::log(spec.c_max / spec.c_min)));
    }
  }
  grid.back() = spec.c_max;  // pin the top of the grid against rounding
  return grid;
}

}  // namespace

OptimizerResult optimize_parameters(std::int64_t steps, double zeta, std::int64_t dim,
                                    double epsilon_target, double delta,
                                    const SearchSpec& spec, MultivariateMode mode) {
  spec.validate();
  if (!(epsilon_target > 0.0)) {
    throw std::domain_error("optimize_parameters: epsilon target must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("optimize_parameters: delta must lie in (0,1)");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("optimize_parameters: zeta must lie in [0,1]");
  }
  if (steps < 1 || dim < 1) {
    throw std::domain_error("optimize_parameters: steps and dim must be >= 1");
  }

  MechanismConfig probe;
  probe.sampling_rate = zeta;
  probe.dim = dim;
  probe.lambda_max = spec.lambda_max;
  probe.mode = mode;
  Lap2Accountant acct(zeta, dim, spec.lambda_max, resolve_multivariate_mode(probe));

  auto point_at = [&](double clip, double b) {
    const MomentProfile composed = compose(acct.per_step_profile(clip / b), steps);
    return epsilon_for_delta(composed, delta);
  };
  auto eps_at = [&](double clip, double b) { return point_at(clip, b).epsilon; };

  OptimizerResult best;
  for (double clip : clip_grid(spec)) {
    const double eps_top = eps_at(clip, spec.b_max);
    if (eps_top > epsilon_target) continue;  // no b in the box works for this clip

    double b_found;
    const double eps_bottom = eps_at(clip, spec.b_min);
    if (eps_bottom <= epsilon_target) {
      b_found = spec.b_min;
    } else {
      if (eps_bottom < eps_top) {
        throw std::logic_error("optimize_parameters: epsilon not decreasing in b");
      }
      double lo = spec.b_min;
      double hi = spec.b_max;
      if (zeta > 0.0) {
        // Warm start at the closed-form initialization; the bracket invariant
        // (lo infeasible, hi feasible) is re-established by the probe.
        const double b0 =
            std::clamp(b_star_init(clip, epsilon_target, zeta, steps, delta), lo, hi);
        if (b0 > lo && b0 < hi) {
          if (eps_at(clip, b0) <= epsilon_target) {
            hi = b0;
          } else {
            lo = b0;
          }
        }
      }
      while (hi - lo > std::min(spec.tau, 1e-4 * hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (eps_at(clip, mid) <= epsilon_target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      b_found = hi;
    }

    const PrivacyPoint achieved = point_at(clip, b_found);
    const double ratio = clip / b_found;
    const bool better =
        !best.feasible || ratio > best.rho_star ||
        (ratio == best.rho_star &&
         (clip > best.c_star || (clip == best.c_star && b_found < best.b_star)));
    if (better) {
      best.feasible = true;
      best.c_star = clip;
      best.b_star = b_found;
      best.rho_star = ratio;
      best.achieved_epsilon = achieved.epsilon;
      best.lambda_star = achieved.lambda_star;
    }
  }
  return best;
}

}  // namespace lap2
