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
#include <span>
#include <string>
#include <vector>

namespace lap2 {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // worst observed deviation, in the check's own units
  double threshold = 0.0;
  std::string detail;
};

enum class VerifySuite { kFast, kFull };

struct VerifySummary {
  VerifySuite suite = VerifySuite::kFast;
  std::uint64_t seed = 0;
  bool all_passed = false;
  std::vector<CheckResult> checks;
};

// Individual batteries; each is deterministic given its arguments. Checks
// comparing closed forms against quadrature report max |relative| error;
// property batteries report the worst signed violation.
namespace checks {

CheckResult univariate_vs_quadrature(std::int64_t lambda_cap);
CheckResult per_eta_identity(std::int64_t eta_cap);
CheckResult trivial_zeros();
CheckResult majorization_dominance(int vectors_per_dim,
                                   std::span<const std::int64_t> dims,
                                   std::uint64_t seed);
CheckResult schur_convexity(int pairs_per_dim, std::span<const std::int64_t> dims,
                            std::uint64_t seed);
CheckResult derivative_checks();
CheckResult bucketed_bound(std::span<const std::int64_t> dims);
CheckResult gaussian_vs_quadrature(std::int64_t lambda_cap);
CheckResult conversion_scans(int profiles, std::uint64_t seed);
CheckResult ab_ordering();          // informational: records the A vs B order
CheckResult worst_case_means_probe();  // informational: reports the grid maximizer
CheckResult mc_agreement(std::int64_t samples, std::uint64_t seed);

}  // namespace checks

// Runs the batteries at suite-dependent sizes. kFast targets interactive use;
// kFull runs the acceptance-scale grids.
VerifySummary run_verification(VerifySuite suite, std::uint64_t seed);

}  // namespace lap2
