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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace lap2 {
namespace {

TEST(LogSumExp, Identities) {
  const std::vector<double> two_ones = {std::log(1.0), std::log(1.0)};
  EXPECT_NEAR(log_sum_exp(two_ones), std::log(2.0), 1e-15);

  const std::vector<double> empty;
  EXPECT_EQ(log_sum_exp(empty), kNegInf);

  const std::vector<double> with_zero = {0.0, kNegInf};
  EXPECT_EQ(log_sum_exp(with_zero), 0.0);

  EXPECT_EQ(log_sum_exp2(kNegInf, kNegInf), kNegInf);
  EXPECT_EQ(log_sum_exp2(kPosInf, 1.0), kPosInf);
  EXPECT_NEAR(log_sum_exp2(700.0, 700.0), 700.0 + std::log(2.0), 1e-12);
}

TEST(LogSumExp, NoIntermediateOverflow) {
  const std::vector<double> big = {1000.0, 1000.0, 999.0};
  const double expect = 1000.0 + std::log(2.0 + std::exp(-1.0));
  EXPECT_NEAR(log_sum_exp(big), expect, 1e-12);
}

TEST(LogSumExp, PermutationAndAssociativityWithinTolerance) {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> dist(-40.0, 40.0);
  std::vector<double> terms(64);
  for (auto& t : terms) t = dist(eng);
  const double direct = log_sum_exp(terms);

  std::vector<double> shuffled = terms;
  std::shuffle(shuffled.begin(), shuffled.end(), eng);
  EXPECT_NEAR(log_sum_exp(shuffled), direct, 1e-12);

  const std::vector<double> left(terms.begin(), terms.begin() + 20);
  const std::vector<double> right(terms.begin() + 20, terms.end());
  const double split = log_sum_exp2(log_sum_exp(left), log_sum_exp(right));
  EXPECT_NEAR(split, direct, 1e-12);
}

TEST(LogSumExp, StreamingAccumulatorMatchesTwoPass) {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> dist(-300.0, 300.0);
  std::vector<double> terms(257);
  for (auto& t : terms) t = dist(eng);
  LogSumAccumulator acc;
  for (double t : terms) acc.add(t);
  EXPECT_NEAR(acc.log_sum(), log_sum_exp(terms), 1e-11);
}

TEST(LogValue, TotalArithmeticNeverNaN) {
  const LogValue zero = LogValue::zero();
  const LogValue over = LogValue::overflow();
  const LogValue one = LogValue::one();
  EXPECT_TRUE((zero * over).is_zero());  // zero annihilates saturation
  EXPECT_TRUE((over * one).is_overflow());
  EXPECT_EQ((zero + one).log(), 0.0);
  EXPECT_TRUE((over + one).is_overflow());
  EXPECT_FALSE(std::isnan((zero * over).log()));
  EXPECT_THROW(LogValue::from_log(std::nan("")), std::invalid_argument);
  EXPECT_THROW(LogValue::from_linear(-1.0), std::invalid_argument);
  EXPECT_NEAR(LogValue::from_linear(2.5).linear(), 2.5, 1e-15);
}

TEST(LogBinomial, SmallValuesExact) {
  EXPECT_NEAR(log_binomial(5, 2), std::log(10.0), 1e-14);
  EXPECT_EQ(log_binomial(7, 0), 0.0);
  EXPECT_EQ(log_binomial(7, 7), 0.0);
  EXPECT_NEAR(log_binomial(7, 1), std::log(7.0), 1e-15);
  EXPECT_THROW(log_binomial(3, 4), std::domain_error);
  EXPECT_THROW(log_binomial(-1, 0), std::domain_error);
}

TEST(LogBinomial, MatchesCumulativeLogSums) {
  // Independent route: log C(m,k) = sum_{i=1}^{k} log((m-k+i)/i).
  auto cumulative = [](std::int64_t m, std::int64_t k) {
    double s = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      s += std::log(static_cast<double>(m - k + i) / static_cast<double>(i));
    }
    return s;
  };
  for (const auto& [m, k] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {1000, 500}, {4097, 13}, {1000000, 12}, {1000000, 500000}}) {
    const double expect = cumulative(m, k);
    EXPECT_NEAR(log_binomial(m, k), expect, 1e-12 * std::max(1.0, std::fabs(expect)))
        << "m=" << m << " k=" << k;
  }
}

TEST(SubsampleWeight, ExactBranchesAndExamples) {
  EXPECT_EQ(log_subsample_weight(17, 0, 0.0), 0.0);
  EXPECT_EQ(log_subsample_weight(17, 3, 0.0), kNegInf);
  EXPECT_EQ(log_subsample_weight(17, 18, 1.0), 0.0);
  EXPECT_EQ(log_subsample_weight(17, 2, 1.0), kNegInf);
  // lambda=2, eta=1, zeta=0.5: C(3,1) (1/2)^2 (1/2) = 0.375
  EXPECT_NEAR(log_subsample_weight(2, 1, 0.5), std::log(0.375), 1e-14);
  EXPECT_THROW(log_subsample_weight(2, 4, 0.5), std::domain_error);
  EXPECT_THROW(log_subsample_weight(2, 1, 1.5), std::domain_error);
}

TEST(SubsampleWeight, NormalizationOverEta) {
  for (std::int64_t lambda : {0, 1, 2, 7, 64, 513, 4096}) {
    for (double zeta : {1e-4, 0.01, 0.3, 0.5, 0.9, 0.999}) {
      LogSumAccumulator acc;
      for (std::int64_t eta = 0; eta <= lambda + 1; ++eta) {
        acc.add(log_subsample_weight(lambda, eta, zeta));
      }
      EXPECT_NEAR(std::exp(acc.log_sum()), 1.0, 1e-12)
          << "lambda=" << lambda << " zeta=" << zeta;
    }
  }
}

}  // namespace
}  // namespace lap2
