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
#include <span>
#include <vector>

namespace lap2 {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// A nonnegative quantity stored as its natural logarithm. -inf encodes an
// exact zero and +inf encodes saturation after overflow. Arithmetic is total
// and never produces NaN: in products, zero annihilates saturation.
class LogValue {
 public:
  constexpr LogValue() = default;

  // `l` is already on the log scale. NaN is rejected.
  static LogValue from_log(double l);
  // `v` is on the linear scale and must be >= 0.
  static LogValue from_linear(double v);
  static constexpr LogValue zero() { return LogValue(kNegInf); }
  static constexpr LogValue one() { return LogValue(0.0); }
  static constexpr LogValue overflow() { return LogValue(kPosInf); }

  constexpr double log() const { return log_; }
  double linear() const;  // exp(log), may round to 0 or inf
  constexpr bool is_zero() const { return log_ == kNegInf; }
  constexpr bool is_overflow() const { return log_ == kPosInf; }

  friend constexpr bool operator==(LogValue a, LogValue b) { return a.log_ == b.log_; }
  friend constexpr bool operator<(LogValue a, LogValue b) { return a.log_ < b.log_; }

  // Linear-scale product and sum.
  friend LogValue operator*(LogValue a, LogValue b);
  friend LogValue operator+(LogValue a, LogValue b);

 private:
  explicit constexpr LogValue(double l) : log_(l) {}
  double log_ = kNegInf;
};

// log(exp(a) + exp(b)) without intermediate overflow.
double log_sum_exp2(double a, double b);

// log(sum_i exp(logs[i])), max-shifted. Empty input yields -inf; any +inf
// entry saturates the result to +inf.
double log_sum_exp(std::span<const double> logs);
LogValue log_sum_exp(std::span<const LogValue> terms);

// log C(m, k) via log-gamma. Throws std::domain_error when k > m or either
// argument is negative.
double log_binomial(std::int64_t m, std::int64_t k);

// log of the binomial subsampling weight C(lambda+1, eta) (1-zeta)^(lambda+1-eta) zeta^eta.
// The weights over eta in [0, lambda+1] sum to one for any fixed (lambda, zeta).
// zeta = 0 and zeta = 1 are exact branches. Throws std::domain_error on bad ranges.
double log_subsample_weight(std::int64_t lambda, std::int64_t eta, double zeta);

// Precomputed log subsampling weights for one (lambda, zeta) pair, shared
// across moment evaluations. zeta = 0 and zeta = 1 carry no table; callers
// branch on them before indexing.
class SubsampleWeights {
 public:
  SubsampleWeights(std::int64_t lambda, double zeta);
  std::int64_t lambda() const { return lambda_; }
  double zeta() const { return zeta_; }
  // log weight of eta; defined for eta in [0, lambda+1] when zeta in (0,1).
  double log_weight(std::int64_t eta) const {
    return log_weights_[static_cast<std::size_t>(eta)];
  }

 private:
  std::int64_t lambda_;
  double zeta_;
  std::vector<double> log_weights_;
};

// Streaming log-sum-exp accumulator: keeps a running maximum and a rescaled
// mantissa sum so terms can be folded in one pass.
class LogSumAccumulator {
 public:
  void add(double log_term);
  double log_sum() const;
  bool empty() const { return max_ == kNegInf && sum_ == 0.0; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;  // sum of exp(term - max_)
};

}  // namespace lap2
