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

#include "lap2/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lap2 {

LogValue LogValue::from_log(double l) {
  if (std::isnan(l)) {
    throw std::invalid_argument("LogValue: NaN is not representable");
  }
  return LogValue(l);
}

LogValue LogValue::from_linear(double v) {
  if (std::isnan(v) || v < 0.0) {
    throw std::invalid_argument("LogValue: linear value must be >= 0");
  }
  return LogValue(std::log(v));
}

double LogValue::linear() const { return std::exp(log_); }

LogValue operator*(LogValue a, LogValue b) {
  if (a.is_zero() || b.is_zero()) return LogValue::zero();
  return LogValue(a.log_ + b.log_);  // +inf + finite saturates
}

LogValue operator+(LogValue a, LogValue b) {
  return LogValue(log_sum_exp2(a.log_, b.log_));
}

double log_sum_exp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a == kPosInf || b == kPosInf) return kPosInf;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double log_sum_exp(std::span<const double> logs) {
  double m = kNegInf;
  for (double l : logs) {
    if (l == kPosInf) return kPosInf;
    if (l > m) m = l;
  }
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - m);
  return m + std::log(sum);
}

LogValue log_sum_exp(std::span<const LogValue> terms) {
  double m = kNegInf;
  for (LogValue t : terms) {
    if (t.is_overflow()) return LogValue::overflow();
    if (t.log() > m) m = t.log();
  }
  if (m == kNegInf) return LogValue::zero();
  double sum = 0.0;
  for (LogValue t : terms) sum += std::exp(t.log() - m);
  return LogValue::from_log(m + std::log(sum));
}

double log_binomial(std::int64_t m, std::int64_t k) {
  if (m < 0 || k < 0 || k > m) {
    throw std::domain_error("log_binomial: need 0 <= k <= m, got m=" +
                            std::to_string(m) + " k=" + std::to_string(k));
  }
  if (k == 0 || k == m) return 0.0;
  if (k == 1 || k == m - 1) return std::log(static_cast<double>(m));
  return std::lgamma(static_cast<double>(m) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(m - k) + 1.0);
}

double log_subsample_weight(std::int64_t lambda, std::int64_t eta, double zeta) {
  if (lambda < 0 || eta < 0 || eta > lambda + 1) {
    throw std::domain_error("log_subsample_weight: need 0 <= eta <= lambda+1");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("log_subsample_weight: zeta must lie in [0,1]");
  }
  if (zeta == 0.0) return eta == 0 ? 0.0 : kNegInf;
  if (zeta == 1.0) return eta == lambda + 1 ? 0.0 : kNegInf;
  double l = log_binomial(lambda + 1, eta);
  if (eta < lambda + 1) l += static_cast<double>(lambda + 1 - eta) * std::log1p(-zeta);
  if (eta > 0) l += static_cast<double>(eta) * std::log(zeta);
  return l;
}

void LogSumAccumulator::add(double log_term) {
  if (log_term == kNegInf) return;
  if (log_term <= max_) {
    sum_ += std::exp(log_term - max_);
    return;
  }
  if (max_ == kNegInf) {
    max_ = log_term;
    sum_ = 1.0;
    return;
  }
  sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
  max_ = log_term;
}

double LogSumAccumulator::log_sum() const {
  if (max_ == kNegInf) return kNegInf;
  if (max_ == kPosInf) return kPosInf;
  return max_ + std::log(sum_);
}

}  // namespace lap2
