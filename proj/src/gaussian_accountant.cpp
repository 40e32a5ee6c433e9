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

#include "lap2/gaussian_accountant.hpp"

#include <cmath>
#include <stdexcept>

#include "lap2/numerics.hpp"

namespace lap2 {

double alpha_gaussian(double sigma, double zeta, std::int64_t lambda,
                      GaussianVariant variant) {
  if (!(sigma > 0.0) || std::isnan(sigma)) {
    throw std::domain_error("alpha_gaussian: sigma must be > 0");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("alpha_gaussian: zeta must lie in [0,1]");
  }
  if (lambda < 0) throw std::domain_error("alpha_gaussian: lambda must be >= 0");

  const double inv2s2 = 0.5 / (sigma * sigma);
  auto kernel = [inv2s2](std::int64_t eta) {
    const double de = static_cast<double>(eta);
    return (de * de - de) * inv2s2;  // log E[(mu1/mu0)^eta] for unit-shift means
  };

  if (variant == GaussianVariant::kNormalized) {
    if (lambda == 0 || zeta == 0.0) return 0.0;
    if (zeta == 1.0) return kernel(lambda + 1);
    const SubsampleWeights w(lambda, zeta);
    LogSumAccumulator acc;
    for (std::int64_t eta = 0; eta <= lambda + 1; ++eta) {
      acc.add(w.log_weight(eta) + kernel(eta));
    }
    const double a = acc.log_sum();
    return a < 0.0 && a > -1e-12 ? 0.0 : a;
  }

  // Unnormalized variant: C(lambda, eta) against the same zeta powers, kept
  // exactly as stated for audits. The eta = lambda+1 term vanishes since
  // C(lambda, lambda+1) = 0. Weights sum to 1-zeta, so alpha may be negative.
  if (zeta == 1.0) return lambda == 0 ? 0.0 : kNegInf;
  LogSumAccumulator acc;
  const double log_zeta = zeta > 0.0 ? std::log(zeta) : kNegInf;
  const double log_1mz = std::log1p(-zeta);
  for (std::int64_t eta = 0; eta <= lambda; ++eta) {
    double t = log_binomial(lambda, eta) +
               static_cast<double>(lambda + 1 - eta) * log_1mz + kernel(eta);
    if (eta > 0) {
      if (log_zeta == kNegInf) continue;
      t += static_cast<double>(eta) * log_zeta;
    }
    acc.add(t);
  }
  return acc.log_sum();
}

}  // namespace lap2
