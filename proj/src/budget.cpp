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

#include "lap2/budget.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lap2/gaussian_accountant.hpp"
#include "lap2/numerics.hpp"

namespace lap2 {

MomentProfile per_step_profile(const MechanismConfig& cfg) {
  cfg.validate();
  MomentProfile p;
  p.scope = ProfileScope::kPerStep;
  p.mechanism = cfg.mechanism;
  switch (cfg.mechanism) {
    case Mechanism::kLap2: {
      Lap2Accountant acct(cfg.sampling_rate, cfg.dim, cfg.lambda_max,
                          resolve_multivariate_mode(cfg));
      return acct.per_step_profile(cfg.clip / cfg.noise_scale);
    }
    case Mechanism::kGaussian: {
      for (std::int64_t l = 1; l <= cfg.lambda_max; ++l) {
        p.entries.push_back({l, alpha_gaussian(cfg.noise_scale, cfg.sampling_rate, l,
                                               cfg.gaussian_variant)});
      }
      return p;
    }
    case Mechanism::kLaplaceL1: {
      // Naive l1 baseline: a single coordinate with the sensitivity inflated
      // by sqrt(n), accounted through the same univariate moment.
      const double r = clipping_geometry(cfg.dim).sqrt_dim * cfg.clip / cfg.noise_scale;
      for (std::int64_t l = 1; l <= cfg.lambda_max; ++l) {
        p.entries.push_back({l, alpha_univariate(cfg.sampling_rate, r, l)});
      }
      return p;
    }
    case Mechanism::kPureLaplace:
      throw std::invalid_argument(
          "per_step_profile: pure_laplace has no moment profile; its "
          "per-release epsilon is clip/noise_scale");
  }
  throw std::invalid_argument("per_step_profile: unknown mechanism");
}

MomentProfile compose(const MomentProfile& per_step, std::int64_t steps) {
  if (per_step.scope != ProfileScope::kPerStep) {
    throw std::invalid_argument("compose: profile is not per-step");
  }
  if (steps < 1) throw std::domain_error("compose: steps must be >= 1");
  MomentProfile out = per_step;
  out.scope = ProfileScope::kComposed;
  const double t = static_cast<double>(steps);
  for (auto& e : out.entries) e.alpha *= t;  // +inf propagates
  return out;
}

PrivacyPoint delta_for_epsilon(const MomentProfile& profile, double epsilon) {
  if (profile.entries.empty()) throw std::invalid_argument("delta_for_epsilon: empty profile");
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw std::domain_error("delta_for_epsilon: epsilon must be >= 0");
  }
  double best = kPosInf;
  std::int64_t best_lambda = profile.entries.front().lambda;
  for (const auto& e : profile.entries) {
    const double exponent = e.alpha - static_cast<double>(e.lambda) * epsilon;
    if (exponent < best) {
      best = exponent;
      best_lambda = e.lambda;
    }
  }
  PrivacyPoint out;
  out.epsilon = epsilon;
  out.log_delta = std::min(best, 0.0);
  out.delta = std::exp(out.log_delta);
  out.lambda_star = best_lambda;
  return out;
}

PrivacyPoint epsilon_for_delta(const MomentProfile& profile, double delta) {
  if (profile.entries.empty()) throw std::invalid_argument("epsilon_for_delta: empty profile");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("epsilon_for_delta: delta must lie in (0,1)");
  }
  const double log_delta = std::log(delta);
  double best = kPosInf;
  std::int64_t best_lambda = 0;
  for (const auto& e : profile.entries) {
    if (e.alpha == kPosInf) continue;
    const double l = static_cast<double>(e.lambda);
    const double candidate =
        e.alpha / l + std::log(l / (l + 1.0)) - (log_delta + std::log(l + 1.0)) / l;
    if (candidate < best) {
      best = candidate;
      best_lambda = e.lambda;
    }
  }
  if (best == kPosInf) {
    throw InfeasibleError("epsilon_for_delta: every lambda order overflowed");
  }
  PrivacyPoint out;
  out.epsilon = std::max(best, 0.0);
  out.delta = delta;
  out.log_delta = log_delta;
  out.lambda_star = best_lambda;
  return out;
}

double invert_noise_for_epsilon(const std::function<double(double)>& epsilon_of_noise,
                                double epsilon_target, double lo, double hi, double tau) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("invert_noise_for_epsilon: need 0 < lo < hi");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("invert_noise_for_epsilon: tau must be > 0");
  if (!(epsilon_target > 0.0)) {
    throw std::domain_error("invert_noise_for_epsilon: epsilon target must be > 0");
  }
  const double eps_lo = epsilon_of_noise(lo);
  const double eps_hi = epsilon_of_noise(hi);
  if (eps_lo < eps_hi) {
    throw std::logic_error("invert_noise_for_epsilon: epsilon not decreasing on bracket");
  }
  if (eps_lo <= epsilon_target) return lo;  // already feasible at the small end
  if (eps_hi > epsilon_target) {
    throw InfeasibleError("invert_noise_for_epsilon: target unreachable at the bracket top");
  }
  double a = lo;
  double b = hi;
  while (b - a > tau) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;  // bracket exhausted at double precision
    if (epsilon_of_noise(mid) <= epsilon_target) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

std::function<double(double)> make_epsilon_of_noise(const MechanismConfig& cfg) {
  cfg.validate();
  switch (cfg.mechanism) {
    case Mechanism::kPureLaplace: {
      const double clip = cfg.clip;
      return [clip](double noise) { return pure_laplace_epsilon(clip, noise); };
    }
    case Mechanism::kLap2: {
      auto acct = std::make_shared<Lap2Accountant>(cfg.sampling_rate, cfg.dim,
                                                   cfg.lambda_max,
                                                   resolve_multivariate_mode(cfg));
      const double clip = cfg.clip;
      const std::int64_t steps = cfg.steps;
      const double delta = cfg.delta;
      return [acct, clip, steps, delta](double noise) {
        const MomentProfile composed = compose(acct->per_step_profile(clip / noise), steps);
        return epsilon_for_delta(composed, delta).epsilon;
      };
    }
    case Mechanism::kGaussian:
    case Mechanism::kLaplaceL1: {
      MechanismConfig base = cfg;
      return [base](double noise) {
        MechanismConfig c = base;
        c.noise_scale = noise;
        return epsilon_for_delta(compose(per_step_profile(c), c.steps), c.delta).epsilon;
      };
    }
  }
  throw std::invalid_argument("make_epsilon_of_noise: unknown mechanism");
}

double invert_noise_for_epsilon(const MechanismConfig& cfg, double epsilon_target,
                                double lo, double hi, double tau) {
  return invert_noise_for_epsilon(make_epsilon_of_noise(cfg), epsilon_target, lo, hi, tau);
}

namespace {

// |d log(noise) / d log(epsilon)| on the grid; central differences at
// interior points, one-sided at the ends, NaN next to infeasible rows.
void fill_slopes(const std::vector<double>& eps, const std::vector<double>& noise,
                 const std::vector<bool>& feasible, std::vector<double>* out) {
  const std::size_t n = eps.size();
  out->assign(n, std::numeric_limits<double>::quiet_NaN());
  auto slope = [&](std::size_t i, std::size_t j) {
    return std::fabs((std::log(noise[j]) - std::log(noise[i])) /
                     (std::log(eps[j]) - std::log(eps[i])));
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!feasible[i]) continue;
    const bool has_prev = i > 0 && feasible[i - 1];
    const bool has_next = i + 1 < n && feasible[i + 1];
    if (has_prev && has_next) {
      (*out)[i] = slope(i - 1, i + 1);
    } else if (has_next) {
      (*out)[i] = slope(i, i + 1);
    } else if (has_prev) {
      (*out)[i] = slope(i - 1, i);
    }
  }
}

}  // namespace

std::vector<WallReport> wall_diagnostics(const WallOptions& options) {
  if (options.epsilon_grid.size() < 3) {
    throw std::invalid_argument("wall_diagnostics: epsilon grid needs >= 3 points");
  }
  for (std::size_t i = 1; i < options.epsilon_grid.size(); ++i) {
    if (options.epsilon_grid[i] <= options.epsilon_grid[i - 1]) {
      throw std::invalid_argument("wall_diagnostics: epsilon grid must be strictly increasing");
    }
  }
  if (options.sampling_rates.empty()) {
    throw std::invalid_argument("wall_diagnostics: no sampling rates given");
  }

  std::vector<WallReport> reports;
  for (double q : options.sampling_rates) {
    MechanismConfig lap;
    lap.mechanism = Mechanism::kLap2;
    lap.clip = options.clip;
    lap.sampling_rate = q;
    lap.steps = options.steps;
    lap.dim = options.dim;
    lap.delta = options.delta;
    lap.lambda_max = options.lambda_max;
    lap.mode = options.mode;
    MechanismConfig gauss = lap;
    gauss.mechanism = Mechanism::kGaussian;

    auto lap_acct = std::make_shared<Lap2Accountant>(q, options.dim, options.lambda_max,
                                                     resolve_multivariate_mode(lap));
    auto lap_eps = [&](double b) {
      return epsilon_for_delta(compose(lap_acct->per_step_profile(options.clip / b),
                                       options.steps),
                               options.delta)
          .epsilon;
    };
    auto gauss_eps = make_epsilon_of_noise(gauss);

    WallReport report;
    report.sampling_rate = q;
    std::vector<double> eps_list, noise_g, noise_l;
    std::vector<bool> ok_g, ok_l;
    for (double eps : options.epsilon_grid) {
      WallRow row;
      row.epsilon = eps;
      if (options.synthetic_inverse) {
        row.noise_gaussian = 1.0 / eps;
        row.noise_lap2 = 1.0 / eps;
        row.feasible_gaussian = row.feasible_lap2 = true;
      } else {
        try {
          row.noise_lap2 = invert_noise_for_epsilon(lap_eps, eps, options.noise_lo,
                                                    options.noise_hi, options.tau);
          row.feasible_lap2 = true;
        } catch (const InfeasibleError&) {
        }
        try {
          row.noise_gaussian = invert_noise_for_epsilon(gauss_eps, eps, options.noise_lo,
                                                        options.noise_hi, options.tau);
          row.feasible_gaussian = true;
        } catch (const InfeasibleError&) {
        }
      }
      if (row.feasible_lap2) {
        // Tail deltas at matched distortion: Laplace per-coordinate variance
        // is 2 b^2 and Gaussian sigma^2, so sigma = b sqrt(2).
        const PrivacyPoint dl = delta_for_epsilon(
            compose(lap_acct->per_step_profile(options.clip / row.noise_lap2),
                    options.steps),
            eps);
        MechanismConfig matched = gauss;
        matched.noise_scale = row.noise_lap2 * std::sqrt(2.0);
        const PrivacyPoint dg =
            delta_for_epsilon(compose(per_step_profile(matched), options.steps), eps);
        row.delta_lap2 = dl.delta;
        row.log_delta_lap2 = dl.log_delta;
        row.delta_gaussian = dg.delta;
        row.log_delta_gaussian = dg.log_delta;
        row.left_wall = dg.log_delta > std::log(2.0) + dl.log_delta;
        if (row.left_wall && !report.left_wall_epsilon.has_value()) {
          report.left_wall_epsilon = eps;
        }
      }
      eps_list.push_back(eps);
      noise_g.push_back(row.noise_gaussian);
      noise_l.push_back(row.noise_lap2);
      ok_g.push_back(row.feasible_gaussian);
      ok_l.push_back(row.feasible_lap2);
      report.rows.push_back(row);
    }
    std::vector<double> wr;
    fill_slopes(eps_list, noise_g, ok_g, &wr);
    for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].wr_gaussian = wr[i];
    fill_slopes(eps_list, noise_l, ok_l, &wr);
    for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].wr_lap2 = wr[i];
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace lap2
