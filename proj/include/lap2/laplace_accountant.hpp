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
#include <memory>
#include <vector>

#include "lap2/gaussian_accountant.hpp"
#include "lap2/numerics.hpp"

namespace lap2 {

enum class Mechanism { kLap2, kGaussian, kLaplaceL1, kPureLaplace };

// How the multivariate Laplace moment sum over coordinates is evaluated.
// kExact sums every coordinate; kBucketed evaluates a certified upper bound
// on geometric index buckets; kAuto picks exact when the total work is small.
enum class MultivariateMode { kExact, kBucketed, kAuto };

// Full accountant input. clip is the l2 clipping threshold C in gradient-norm
// units; noise_scale is the Laplace scale b or the Gaussian sigma in the same
// units; sampling_rate is the per-record batch inclusion probability.
struct MechanismConfig {
  Mechanism mechanism = Mechanism::kLap2;
  double clip = 1.0;
  double noise_scale = 1.0;
  double sampling_rate = 0.01;
  std::int64_t steps = 1;
  std::int64_t dim = 1;
  double delta = 1e-5;
  std::int64_t lambda_max = 4096;
  GaussianVariant gaussian_variant = GaussianVariant::kNormalized;
  MultivariateMode mode = MultivariateMode::kAuto;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class ProfileScope { kPerStep, kComposed };

struct MomentEntry {
  std::int64_t lambda;
  double alpha;  // log-moment; +inf marks an infeasible/overflowed order
};

// alpha(lambda) curve over a strictly increasing integer lambda grid.
struct MomentProfile {
  Mechanism mechanism = Mechanism::kLap2;
  ProfileScope scope = ProfileScope::kPerStep;
  bool exact = true;  // false when any entry is a bucketed upper bound
  std::vector<MomentEntry> entries;

  // Checks lambda ordering, nonnegativity, and discrete monotonicity plus
  // convexity in lambda within `slack`. Throws std::logic_error on violation.
  // Skipped for the unnormalized Gaussian variant by callers that use it.
  void validate(double slack = 1e-9) const;
};

// F(r, eta) = (eta e^{(eta-1)r} + (eta-1) e^{-eta r}) / (2 eta - 1) with
// r = x/b >= 0. F(r, 0) = F(r, 1) = F(0, eta) = 1 exactly. Computed through
// its log for eta >= 2; r = +inf saturates to +inf.
double log_moment_term_f(double r, std::int64_t eta);
double moment_term_f(double r, std::int64_t eta);

// Per-step log-moment of the subsampled univariate Laplace mechanism:
// alpha = log sum_eta w(eta) F(r, eta). Zero exactly when lambda = 0,
// zeta = 0 or r = 0. The value is a worst-case upper bound on the per-step
// privacy loss moment (means pinned at 0 and x in the mixture).
double alpha_univariate(double zeta, double r, std::int64_t lambda);
double alpha_univariate(const SubsampleWeights& weights, double r);

// The extreme l2-ball coordinate profile x_i = C (sqrt(i) - sqrt(i-1)),
// i in [1, n]. Lazy: construction is O(1) regardless of n.
class MajorizationSet {
 public:
  MajorizationSet(double clip, std::int64_t dim);
  double clip() const { return clip_; }
  std::int64_t dim() const { return dim_; }
  // 1-based coordinate magnitude; strictly decreasing in i, all positive.
  double x(std::int64_t i) const;
  // Real-argument extension used for midpoint bounds; t >= 1.
  double x_real(double t) const;
  // sum_{i<=k} x(i) = C sqrt(k) by telescoping.
  double prefix_sum(std::int64_t k) const;

 private:
  double clip_;
  std::int64_t dim_;
};

struct MultivariateAlpha {
  double alpha = 0.0;
  bool exact = true;  // false when alpha is the bucketed upper bound
};

// Per-step multivariate moment over the majorization set: exact mode returns
// sum_i alpha_univariate(zeta, x_i/b, lambda); bucketed mode returns a
// certified upper bound within kBucketRelTol of the exact sum.
MultivariateAlpha alpha_multivariate(const MechanismConfig& cfg, std::int64_t lambda,
                                     MultivariateMode mode = MultivariateMode::kAuto);

// Relative enclosure width the bucketed evaluator refines to. The upper bound
// it returns then exceeds the exact sum by at most this fraction.
inline constexpr double kBucketRelTol = 5e-3;

// Resolved evaluation mode for a config: exact when dim <= 2^20 and the
// dim x lambda_max work stays small enough for interactive use.
MultivariateMode resolve_multivariate_mode(const MechanismConfig& cfg);

// Reusable evaluator for one (zeta, dim, lambda grid) triple. Privacy of the
// l2 Laplace mechanism depends on clip and noise only through rho = C/b, so
// sweeps over (C, b) can share the per-lambda weight tables and bucket
// partitions. Not safe for concurrent use from multiple threads.
class Lap2Accountant {
 public:
  Lap2Accountant(double zeta, std::int64_t dim, std::int64_t lambda_max,
                 MultivariateMode mode);
  ~Lap2Accountant();
  Lap2Accountant(Lap2Accountant&&) noexcept;
  Lap2Accountant& operator=(Lap2Accountant&&) noexcept;

  // Per-step alpha at a single order.
  MultivariateAlpha alpha(double rho, std::int64_t lambda);
  // Per-step profile over lambda in [1, lambda_max].
  MomentProfile per_step_profile(double rho);

  MultivariateMode mode() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Single-release pure-epsilon bound of a Laplace mechanism on l1-clipped
// input: epsilon = C/b. Throws std::domain_error for b <= 0 or C < 0.
double pure_laplace_epsilon(double clip, double scale);

struct ClippingGeometry {
  double sqrt_dim;          // the l1/l2 norm inflation factor sqrt(n)
  double log_volume_ratio;  // log of V_l1(n, C) / V_l2(n, C), C-independent
};

// Cross-polytope vs euclidean-ball retained-volume comparison for dimension n.
ClippingGeometry clipping_geometry(std::int64_t n);

}  // namespace lap2
