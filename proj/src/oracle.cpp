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

#include "lap2/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lap2/numerics.hpp"

namespace lap2::oracle {
namespace {

constexpr double kPanelRelTol = 1e-13;
constexpr int kMaxDepth = 42;

// log(1 - zeta + zeta e^s) without cancellation on either side.
double log_mix(double s, double zeta) {
  if (zeta == 0.0) return 0.0;
  if (zeta == 1.0) return s;
  if (s <= 0.0) return std::log1p(zeta * std::expm1(s));
  return s + std::log(zeta + (1.0 - zeta) * std::exp(-s));
}

// Oracle-local subsampling weight, computed directly from log-gamma instead
// of the accountant's recurrence.
double log_weight(std::int64_t lambda, std::int64_t eta, double zeta) {
  if (zeta == 0.0) return eta == 0 ? 0.0 : kNegInf;
  if (zeta == 1.0) return eta == lambda + 1 ? 0.0 : kNegInf;
  const double m = static_cast<double>(lambda) + 1.0;
  const double k = static_cast<double>(eta);
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
         (m - k) * std::log1p(-zeta) + k * std::log(zeta);
}

double log_norm_sf(double x) {  // log P(Z > x) for standard normal Z
  if (x < 0.0) {
    // 1 - sf(-x); sf(-x) is tiny only when x << 0, where log1p is exact.
    return std::log1p(-std::exp(log_norm_sf(-x)));
  }
  if (x <= 30.0) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double x2 = x * x;
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Adaptive Simpson on log f, accumulating log integral and an error estimate
// of sum_panels |S2 - S1|/15 in the same log scale.
class LogSimpson {
 public:
  explicit LogSimpson(std::function<double(double)> logf) : logf_(std::move(logf)) {}

  double integrate(double a, double b, int seed_panels, double* abs_log_err) {
    const double h = (b - a) / seed_panels;
    for (int i = 0; i < seed_panels; ++i) {
      const double pa = a + i * h;
      const double pb = i + 1 == seed_panels ? b : pa + h;
      const double pm = 0.5 * (pa + pb);
      const double la = logf_(pa);
      const double lm = logf_(pm);
      const double lb = logf_(pb);
      recurse(pa, la, pm, lm, pb, lb, simpson(pa, la, lm, lb, pb), kMaxDepth);
    }
    const double total = total_.log_sum();
    if (abs_log_err != nullptr) {
      // Relative error of the integral ~ absolute error of its log.
      *abs_log_err = err_.empty() ? 0.0 : std::exp(err_.log_sum() - total);
    }
    return total;
  }

 private:
  static double simpson(double a, double la, double lm, double lb, double b) {
    LogSumAccumulator s;
    s.add(la);
    s.add(std::log(4.0) + lm);
    s.add(lb);
    return std::log((b - a) / 6.0) + s.log_sum();
  }

  void recurse(double a, double la, double m, double lm, double b, double lb,
               double whole, int depth) {
    const double ml = 0.5 * (a + m);
    const double mr = 0.5 * (m + b);
    const double lml = logf_(ml);
    const double lmr = logf_(mr);
    const double left = simpson(a, la, lml, lm, m);
    const double right = simpson(m, lm, lmr, lb, b);
    const double combined = log_sum_exp2(left, right);
    const double rel_diff =
        combined == kNegInf ? 0.0 : std::fabs(std::expm1(whole - combined));
    if (depth <= 0 || rel_diff < 15.0 * kPanelRelTol) {
      total_.add(combined);
      if (combined != kNegInf && rel_diff > 0.0) {
        err_.add(combined + std::log(rel_diff / 15.0));
      }
      return;
    }
    recurse(a, la, ml, lml, m, lm, left, depth - 1);
    recurse(m, lm, mr, lmr, b, lb, right, depth - 1);
  }

  std::function<double(double)> logf_;
  LogSumAccumulator total_;
  LogSumAccumulator err_;
};

struct LaplacePieces {
  double delta_over_b;  // |mean1 - mean0| / b
  double zeta;
};

// The three-interval split for Laplace mixtures: the likelihood ratio is
// constant below both means and above both means, so only the stretch
// between the means needs quadrature.
LaplacePieces pieces_of(const MixtureSpec& spec) {
  return LaplacePieces{std::fabs(spec.mean1 - spec.mean0) / spec.scale, spec.zeta};
}

// Case-split closed form of log E_{z~mu0}[(mu1/mu0)^eta] for the Laplace
// family: two constant-ratio tails of mass 1/2 and e^{-d}/2 plus the middle
// exponential integral.
double laplace_log_power_moment(double d, std::int64_t eta) {
  if (d == 0.0) return 0.0;
  const double de = static_cast<double>(eta);
  const double tail_low = std::log(0.5) - de * d;
  const double tail_high = std::log(0.5) + (de - 1.0) * d;
  double middle;
  if (eta == 0) {
    middle = std::log(0.5) + std::log(-std::expm1(-d));
  } else {
    middle = (de - 1.0) * d + std::log1p(-std::exp(-(2.0 * de - 1.0) * d)) -
             std::log(2.0 * (2.0 * de - 1.0));
  }
  LogSumAccumulator acc;
  acc.add(tail_low);
  acc.add(tail_high);
  acc.add(middle);
  return acc.log_sum();
}

double laplace_log_a_closed(const LaplacePieces& p, std::int64_t lambda) {
  const double power = static_cast<double>(lambda) + 1.0;
  LogSumAccumulator acc;
  acc.add(std::log(0.5) + power * log_mix(-p.delta_over_b, p.zeta));
  acc.add(std::log(0.5) - p.delta_over_b + power * log_mix(p.delta_over_b, p.zeta));
  if (p.delta_over_b > 0.0) {
    LogSumAccumulator middle;
    for (std::int64_t eta = 0; eta <= lambda + 1; ++eta) {
      const double w = log_weight(lambda, eta, p.zeta);
      if (w == kNegInf) continue;
      const double de = static_cast<double>(eta);
      double a3;
      if (eta == 0) {
        a3 = std::log(0.5) + std::log(-std::expm1(-p.delta_over_b));
      } else {
        a3 = (de - 1.0) * p.delta_over_b +
             std::log1p(-std::exp(-(2.0 * de - 1.0) * p.delta_over_b)) -
             std::log(2.0 * (2.0 * de - 1.0));
      }
      middle.add(w + a3);
    }
    acc.add(middle.log_sum());
  }
  return acc.log_sum();
}

// Quadrature of the unexpanded integrand over [mean_low, mean_high] plus the
// exact constant-ratio tails. `power` is lambda+1 for the A-moment and
// -lambda for the B-moment.
double laplace_log_moment_quad(const MixtureSpec& spec, double power,
                               double* abs_log_err) {
  const double b = spec.scale;
  const double lo = std::min(spec.mean0, spec.mean1);
  const double hi = std::max(spec.mean0, spec.mean1);
  const double d = (hi - lo) / b;
  const bool mu0_low = spec.mean0 <= spec.mean1;
  const double zeta = spec.zeta;

  // Likelihood ratio exponent s(z) = (|z - mean0| - |z - mean1|)/b.
  const double s_below = mu0_low ? -d : d;  // z below both means
  const double s_above = -s_below;
  const double mass_below = mu0_low ? std::log(0.5) : std::log(0.5) - d;
  const double mass_above = mu0_low ? std::log(0.5) - d : std::log(0.5);

  LogSumAccumulator acc;
  acc.add(mass_below + power * log_mix(s_below, zeta));
  acc.add(mass_above + power * log_mix(s_above, zeta));
  double err = 0.0;
  if (d > 0.0) {
    auto logf = [&](double z) {
      const double s = (std::fabs(z - spec.mean0) - std::fabs(z - spec.mean1)) / b;
      return -std::log(2.0 * b) - std::fabs(z - spec.mean0) / b +
             power * log_mix(s, zeta);
    };
    LogSimpson integ(logf);
    acc.add(integ.integrate(lo, hi, 16, &err));
  }
  if (abs_log_err != nullptr) *abs_log_err = err;
  return acc.log_sum();
}

double gaussian_log_ratio_exponent(const MixtureSpec& spec, double z) {
  const double s2 = spec.scale * spec.scale;
  return (z - 0.5 * (spec.mean0 + spec.mean1)) * (spec.mean1 - spec.mean0) / s2;
}

double gaussian_log_a_closed(const MixtureSpec& spec, std::int64_t lambda) {
  const double shift = (spec.mean1 - spec.mean0) / spec.scale;
  const double kernel_scale = 0.5 * shift * shift;
  LogSumAccumulator acc;
  for (std::int64_t eta = 0; eta <= lambda + 1; ++eta) {
    const double w = log_weight(lambda, eta, spec.zeta);
    if (w == kNegInf) continue;
    const double de = static_cast<double>(eta);
    acc.add(w + de * (de - 1.0) * kernel_scale);
  }
  return acc.log_sum();
}

// Truncated quadrature for Gaussian mixtures. `power` > 0 integrates the
// A-moment, `power` < 0 the B-moment. The truncation point doubles outward
// from 60 scale lengths until the analytic tail bound drops below 1e-14 of a
// lower bound on the integral.
double gaussian_log_moment_quad(const MixtureSpec& spec, double power,
                                double* abs_log_err) {
  const double sigma = spec.scale;
  const double m0 = spec.mean0;
  const double mid = 0.5 * (spec.mean0 + spec.mean1);
  const double zeta = spec.zeta;
  const double log_floor =
      power > 0.0 ? power * std::log1p(-zeta) : std::log(0.5);  // integral >= floor
  const double budget = log_floor - 32.3;  // ~1e-14 of the floor

  // Right truncation: above the midpoint the mixture exponent is positive
  // and mix(s) <= e^s for the A-moment, mix(s)^{-lambda} <= (1-zeta)^{-lambda}
  // for the B-moment.
  const double drift = spec.mean1 - spec.mean0;  // >= 0 after normalization
  const double c = power > 0.0 ? power * drift / (sigma * sigma) : 0.0;
  auto right_tail_bound = [&](double z) {
    if (power > 0.0) {
      const double base = c * (m0 - mid) + 0.5 * c * c * sigma * sigma;
      return base + log_norm_sf((z - m0 - c * sigma * sigma) / sigma);
    }
    return -power * -std::log1p(-zeta) + log_norm_sf((z - m0) / sigma);
  };
  auto left_tail_bound = [&](double z) {
    if (power > 0.0) return log_norm_sf((m0 - z) / sigma);
    return -power * -std::log1p(-zeta) + log_norm_sf((m0 - z) / sigma);
  };

  double span = 60.0 * sigma;
  double z_hi = std::max(m0, mid) + span;
  for (int i = 0; i < 60 && right_tail_bound(z_hi) > budget; ++i) span *= 2.0, z_hi = std::max(m0, mid) + span;
  span = 60.0 * sigma;
  double z_lo = std::min(m0, mid) - span;
  for (int i = 0; i < 60 && left_tail_bound(z_lo) > budget; ++i) span *= 2.0, z_lo = std::min(m0, mid) - span;

  auto logf = [&](double z) {
    const double u = (z - m0) / sigma;
    const double log_phi =
        -0.5 * u * u - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    return log_phi + power * log_mix(gaussian_log_ratio_exponent(spec, z), zeta);
  };
  const int panels = static_cast<int>(
      std::clamp((z_hi - z_lo) / sigma, 64.0, 2048.0));
  double err = 0.0;
  LogSimpson integ(logf);
  const double val = integ.integrate(z_lo, z_hi, panels, &err);
  if (abs_log_err != nullptr) *abs_log_err = err + 1e-14;  // truncation allowance
  return val;
}

MixtureSpec normalized(const MixtureSpec& spec) {
  // Reflecting z -> -z swaps the mean order without changing the moments, so
  // mean0 <= mean1 can be assumed everywhere.
  if (spec.mean0 <= spec.mean1) return spec;
  MixtureSpec out = spec;
  out.mean0 = -spec.mean0;
  out.mean1 = -spec.mean1;
  return out;
}

class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // (0, 1), platform-independent given the engine
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  double laplace() {  // unit scale, zero mean
    const double u = uniform();
    return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

void MixtureSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::domain_error("MixtureSpec: scale must be finite and > 0");
  }
  if (!std::isfinite(mean0) || !std::isfinite(mean1)) {
    throw std::domain_error("MixtureSpec: means must be finite");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("MixtureSpec: zeta must lie in [0,1]");
  }
}

double OracleEstimate::value() const { return std::exp(log_value); }

double log_power_moment_closed_form(const MixtureSpec& spec, std::int64_t eta) {
  spec.validate();
  if (eta < 0) throw std::domain_error("log_power_moment_closed_form: eta must be >= 0");
  const MixtureSpec s = normalized(spec);
  if (s.family == NoiseFamily::kLaplace) {
    return laplace_log_power_moment((s.mean1 - s.mean0) / s.scale, eta);
  }
  const double shift = (s.mean1 - s.mean0) / s.scale;
  const double de = static_cast<double>(eta);
  return de * (de - 1.0) * 0.5 * shift * shift;
}

OracleEstimate quadrature_moment_a(const MixtureSpec& spec, std::int64_t lambda) {
  spec.validate();
  if (lambda < 0) throw std::domain_error("quadrature_moment_a: lambda must be >= 0");
  const MixtureSpec s = normalized(spec);
  const double power = static_cast<double>(lambda) + 1.0;
  OracleEstimate est;
  if (s.family == NoiseFamily::kLaplace) {
    const double closed = laplace_log_a_closed(pieces_of(s), lambda);
    double quad_err = 0.0;
    const double quad = laplace_log_moment_quad(s, power, &quad_err);
    est.log_value = closed;
    est.method = OracleMethod::kPiecewiseClosedForm;
    est.error_bound = std::max(quad_err, std::fabs(closed - quad));
    return est;
  }
  const double closed = gaussian_log_a_closed(s, lambda);
  if (s.zeta == 1.0 || s.mean0 == s.mean1) {
    est.log_value = closed;  // single-component case, kernel is exact
    est.method = OracleMethod::kPiecewiseClosedForm;
    est.error_bound = 0.0;
    return est;
  }
  double quad_err = 0.0;
  const double quad = gaussian_log_moment_quad(s, power, &quad_err);
  est.log_value = quad;
  est.method = OracleMethod::kAdaptiveQuadrature;
  est.error_bound = std::max(quad_err, std::fabs(closed - quad));
  return est;
}

OracleEstimate quadrature_moment_b(const MixtureSpec& spec, std::int64_t lambda) {
  spec.validate();
  if (lambda < 0) throw std::domain_error("quadrature_moment_b: lambda must be >= 0");
  if (spec.zeta >= 1.0) {
    throw std::domain_error("quadrature_moment_b: zeta must be < 1 so mu dominates mu0");
  }
  const MixtureSpec s = normalized(spec);
  const double power = -static_cast<double>(lambda);
  OracleEstimate est;
  est.method = OracleMethod::kAdaptiveQuadrature;
  double err = 0.0;
  est.log_value = s.family == NoiseFamily::kLaplace
                      ? laplace_log_moment_quad(s, power, &err)
                      : gaussian_log_moment_quad(s, power, &err);
  est.error_bound = err;
  return est;
}

OracleEstimate mc_moment(const MixtureSpec& spec, std::int64_t lambda,
                         std::int64_t samples, std::uint64_t seed) {
  spec.validate();
  if (lambda < 0) throw std::domain_error("mc_moment: lambda must be >= 0");
  if (samples < 10000) throw std::domain_error("mc_moment: need at least 1e4 samples");
  const MixtureSpec s = normalized(spec);
  const double power = static_cast<double>(lambda) + 1.0;
  DeterministicRng rng(seed);

  std::vector<double> log_terms(static_cast<std::size_t>(samples));
  for (auto& t : log_terms) {
    const double z = s.family == NoiseFamily::kLaplace
                         ? s.mean0 + s.scale * rng.laplace()
                         : s.mean0 + s.scale * rng.normal();
    const double lr = s.family == NoiseFamily::kLaplace
                          ? (std::fabs(z - s.mean0) - std::fabs(z - s.mean1)) / s.scale
                          : gaussian_log_ratio_exponent(s, z);
    t = power * log_mix(lr, s.zeta);
  }
  double m = kNegInf;
  for (double t : log_terms) m = std::max(m, t);
  double sum = 0.0;
  for (double t : log_terms) sum += std::exp(t - m);
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double var = 0.0;
  for (double t : log_terms) {
    const double d = std::exp(t - m) - mean;
    var += d * d;
  }
  var /= n - 1.0;

  OracleEstimate est;
  est.log_value = m + std::log(mean);
  est.error_bound = std::sqrt(var / n) / mean;  // relative stderr
  est.method = OracleMethod::kMonteCarlo;
  est.seed = seed;
  return est;
}

OracleEstimate gaussian_mixture_moment(double sigma, double zeta, std::int64_t lambda) {
  MixtureSpec spec;
  spec.family = NoiseFamily::kGaussian;
  spec.scale = sigma;
  spec.mean0 = 0.0;
  spec.mean1 = 1.0;
  spec.zeta = zeta;
  return quadrature_moment_a(spec, lambda);
}

WorstCaseMeansReport verify_worst_case_means(double zeta, double r, std::int64_t lambda,
                                             int grid_points) {
  if (grid_points < 2) {
    throw std::domain_error("verify_worst_case_means: need at least a 2x2 grid");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::domain_error("verify_worst_case_means: r must be finite and >= 0");
  }
  MixtureSpec spec;
  spec.family = NoiseFamily::kLaplace;
  spec.scale = 1.0;
  spec.zeta = zeta;
  const double clip = r;

  auto log_a = [&](double m0, double m1) {
    MixtureSpec s = spec;
    s.mean0 = m0;
    s.mean1 = m1;
    return laplace_log_a_closed(pieces_of(normalized(s)), lambda);
  };

  WorstCaseMeansReport report;
  report.clip = clip;
  report.grid_points = grid_points;
  report.reference_log_a = log_a(0.0, clip);
  report.max_log_a = kNegInf;
  for (int i = 0; i < grid_points; ++i) {
    const double m0 = -clip + 2.0 * clip * i / (grid_points - 1);
    for (int j = 0; j < grid_points; ++j) {
      const double m1 = -clip + 2.0 * clip * j / (grid_points - 1);
      const double v = log_a(m0, m1);
      if (v > report.max_log_a) {
        report.max_log_a = v;
        report.max_mean0 = m0;
        report.max_mean1 = m1;
      }
    }
  }
  report.gap = report.max_log_a - report.reference_log_a;
  return report;
}

std::vector<double> sample_clipped_gradient(std::int64_t n, double clip, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample_clipped_gradient: n must be >= 1");
  if (!(clip >= 0.0) || !std::isfinite(clip)) {
    throw std::domain_error("sample_clipped_gradient: clip must be finite and >= 0");
  }
  DeterministicRng rng(seed);
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  const int style = static_cast<int>(seed % 3);

  if (style == 2) {
    // Sparse spiky vector: few nonzeros, total norm uniform in (0, clip].
    const std::int64_t k = 1 + static_cast<std::int64_t>(
                                   rng.raw() % static_cast<std::uint64_t>(std::min<std::int64_t>(n, 8)));
    std::vector<double> values(static_cast<std::size_t>(k));
    double norm2 = 0.0;
    for (auto& v : values) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    const double target = clip * rng.uniform();
    for (std::int64_t i = 0; i < k; ++i) {
      const auto pos = static_cast<std::size_t>(rng.raw() % static_cast<std::uint64_t>(n));
      g[pos] = norm > 0.0 ? values[static_cast<std::size_t>(i)] * target / norm : 0.0;
    }
    // Positions may collide; the norm can only shrink from overwriting.
    double actual = 0.0;
    for (double v : g) actual += v * v;
    if (actual > 0.0) {
      const double rescale = target / std::sqrt(actual);
      if (rescale < 1.0) {
        for (auto& v : g) v *= rescale;
      }
    }
    return g;
  }

  double norm2 = 0.0;
  for (auto& v : g) {
    v = rng.normal();
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  if (norm == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
  double radius = clip;
  if (style == 1) {  // uniform in the ball
    radius = clip * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  }
  for (auto& v : g) v *= radius / norm;
  // Guard against upward rounding past the clip radius.
  double actual = 0.0;
  for (double v : g) actual += v * v;
  if (actual > clip * clip && actual > 0.0) {
    const double rescale = clip / std::sqrt(actual);
    for (auto& v : g) v *= rescale;
  }
  return g;
}

RobinHoodPair robin_hood_pair(std::vector<double> x, std::uint64_t seed) {
  if (x.size() < 2) throw std::domain_error("robin_hood_pair: need >= 2 coordinates");
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error("robin_hood_pair: coordinates must be finite and >= 0");
    }
  }
  RobinHoodPair out;
  out.y = x;
  out.x = std::move(x);
  const double total = [&] {
    double s = 0.0;
    for (double v : out.x) s += v;
    return s;
  }();
  if (total == 0.0) return out;  // zero transferable mass

  DeterministicRng rng(seed);
  const auto n = out.x.size();
  std::size_t donor = 0;
  std::size_t recipient = 0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::size_t i = static_cast<std::size_t>(rng.raw() % n);
    std::size_t j = static_cast<std::size_t>(rng.raw() % n);
    if (i == j) continue;
    if (out.x[i] < out.x[j]) std::swap(i, j);
    if (out.x[j] > 0.0) {
      recipient = i;
      donor = j;
      break;
    }
  }
  if (out.x[donor] == 0.0 || donor == recipient) {
    // Fall back to the extremes; if the smallest positive donor is the
    // maximum itself the vector is degenerate and returned unchanged.
    recipient = static_cast<std::size_t>(
        std::max_element(out.x.begin(), out.x.end()) - out.x.begin());
    donor = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != recipient && out.x[i] > 0.0 &&
          (donor == n || out.x[i] < out.x[donor])) {
        donor = i;
      }
    }
    if (donor == n) return out;
  }

  const double dm = out.x[donor] * (0.25 + 0.5 * rng.uniform());
  out.y[recipient] += dm;
  out.y[donor] -= dm;

  // Prefix-sum check of x ≺ y before returning.
  std::vector<double> xs = out.x;
  std::vector<double> ys = out.y;
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  double cx = 0.0;
  double cy = 0.0;
  const double slack = 1e-12 * std::max(1.0, total);
  for (std::size_t i = 0; i < n; ++i) {
    cx += xs[i];
    cy += ys[i];
    if (cy < cx - slack) throw std::logic_error("robin_hood_pair: majorization check failed");
  }
  if (std::fabs(cy - cx) > slack) {
    throw std::logic_error("robin_hood_pair: transfer failed to preserve the sum");
  }
  return out;
}

}  // namespace lap2::oracle
