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
#include <utility>
#include <vector>

// Independent brute-force evaluations of the moment quantities the accountant
// computes in closed form: case-split integrals, adaptive quadrature and
// Monte Carlo over the two-component mixture, plus randomized instance
// generators for the majorization property batteries. Everything here avoids
// the accountant's evaluation path on purpose; agreement between the two is
// what the verification suites assert.

namespace lap2::oracle {

enum class NoiseFamily { kLaplace, kGaussian };

// mu0 is the noise density centered at mean0, mu1 at mean1, and
// mu = (1 - zeta) mu0 + zeta mu1 is the subsampled mixture.
struct MixtureSpec {
  NoiseFamily family = NoiseFamily::kLaplace;
  double scale = 1.0;  // Laplace b or Gaussian sigma
  double mean0 = 0.0;
  double mean1 = 1.0;
  double zeta = 0.01;

  void validate() const;
};

enum class OracleMethod { kPiecewiseClosedForm, kAdaptiveQuadrature, kMonteCarlo };

struct OracleEstimate {
  double log_value = 0.0;
  // Absolute uncertainty on log_value for deterministic methods; relative
  // standard error for Monte Carlo.
  double error_bound = 0.0;
  OracleMethod method = OracleMethod::kAdaptiveQuadrature;
  std::uint64_t seed = 0;  // only meaningful for Monte Carlo

  double value() const;
};

// A = E_{z~mu0}[(mu(z)/mu0(z))^(lambda+1)]
//   = E_{z~mu0}[(1 - zeta + zeta mu1(z)/mu0(z))^(lambda+1)].
// For the Laplace family the real line splits at the two means into pieces
// with constant likelihood ratio (exact tail masses) plus a finite middle
// integral; the piecewise closed form is returned and cross-checked against
// adaptive quadrature of the unexpanded integrand, with the disagreement
// folded into error_bound.
OracleEstimate quadrature_moment_a(const MixtureSpec& spec, std::int64_t lambda);

// B = E_{z~mu0}[(mu0(z)/mu(z))^lambda]; requires zeta < 1 so mu dominates mu0.
OracleEstimate quadrature_moment_b(const MixtureSpec& spec, std::int64_t lambda);

// Unbiased Monte Carlo estimate of the A-moment; deterministic given seed.
OracleEstimate mc_moment(const MixtureSpec& spec, std::int64_t lambda,
                         std::int64_t samples, std::uint64_t seed);

// log E_{z~mu0}[(mu1(z)/mu0(z))^eta] in closed form: the combined case-split
// expression for Laplace, the quadratic kernel for Gaussian.
double log_power_moment_closed_form(const MixtureSpec& spec, std::int64_t eta);

// Subsampled Gaussian mixture moment with unit mean shift, by adaptive
// quadrature with analytically bounded tail truncation.
OracleEstimate gaussian_mixture_moment(double sigma, double zeta, std::int64_t lambda);

// Scans mean pairs on a grid over [-C, C]^2 (scale b = 1, C = r) and reports
// where the A-moment peaks relative to the pinned (0, C) pair. Diagnostic
// only: the accountant always uses the pinned pair.
struct WorstCaseMeansReport {
  double clip = 0.0;
  int grid_points = 0;
  double reference_log_a = 0.0;  // at means (0, C)
  double max_log_a = 0.0;
  double max_mean0 = 0.0;
  double max_mean1 = 0.0;
  double gap = 0.0;  // max_log_a - reference_log_a
};
WorstCaseMeansReport verify_worst_case_means(double zeta, double r, std::int64_t lambda,
                                             int grid_points);

// Random vector with ||g||_2 <= clip; cycles through sphere-surface, in-ball
// and sparse spiky styles by seed. Deterministic per seed.
std::vector<double> sample_clipped_gradient(std::int64_t n, double clip, std::uint64_t seed);

// y is x with mass moved from a smaller coordinate to a larger one, so the
// sum is preserved and x is majorized by y (verified by prefix sums before
// returning). All-zero inputs come back unchanged.
struct RobinHoodPair {
  std::vector<double> x;
  std::vector<double> y;
};
RobinHoodPair robin_hood_pair(std::vector<double> x, std::uint64_t seed);

}  // namespace lap2::oracle
