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

namespace lap2 {

// Binomial-index variant of the subsampled Gaussian moment bound.
//
// kNormalized uses C(lambda+1, eta) with eta in [0, lambda+1], under which the
// subsampling weights form a probability distribution, so alpha >= 0 and
// alpha -> 0 as sigma -> inf. kUnnormalized keeps C(lambda, eta) against the
// same (1-zeta)^(lambda+1-eta) zeta^eta powers; its weights sum to (1-zeta)
// and alpha can go negative. It is retained behind a flag for audits only.
enum class GaussianVariant { kNormalized, kUnnormalized };

// Per-step log-moment of the subsampled Gaussian mechanism at integer order
// lambda: log sum_eta w(eta) exp((eta^2 - eta) / (2 sigma^2)), evaluated in
// log space. The per-step value composes linearly over steps; clipping does
// not enter (it only scales the noise downstream).
//
// Throws std::domain_error for sigma <= 0, zeta outside [0,1] or lambda < 0.
double alpha_gaussian(double sigma, double zeta, std::int64_t lambda,
                      GaussianVariant variant = GaussianVariant::kNormalized);

}  // namespace lap2
