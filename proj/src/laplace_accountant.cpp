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

#include "lap2/laplace_accountant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "lap2/numerics.hpp"

namespace lap2 {
namespace {

// Below this many eta terms the binomial sum is evaluated in full; above it,
// a window around the unimodal peak is summed and the dropped tails are
// bounded by geometric series (relative contribution < 1e-17).
constexpr std::int64_t kFullSumTerms = 160;

// Leading coordinates of the majorization set summed exactly before any
// bucketing; they carry the largest magnitudes.
constexpr std::int64_t kExactHead = 16;

constexpr int kMaxBucketSplits = 200000;

double require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("MechanismConfig: ") + field +
                                " must be finite");
  }
  return v;
}

}  // namespace

void MechanismConfig::validate() const {
  require_finite(clip, "clip");
  if (clip < 0.0) throw std::invalid_argument("MechanismConfig: clip must be >= 0");
  require_finite(noise_scale, "noise_scale");
  if (noise_scale <= 0.0) {
    throw std::invalid_argument("MechanismConfig: noise_scale must be > 0");
  }
  require_finite(sampling_rate, "sampling_rate");
  if (sampling_rate < 0.0 || sampling_rate > 1.0) {
    throw std::invalid_argument("MechanismConfig: sampling_rate must lie in [0,1]");
  }
  if (steps < 1) throw std::invalid_argument("MechanismConfig: steps must be >= 1");
  if (dim < 1) throw std::invalid_argument("MechanismConfig: dim must be >= 1");
  require_finite(delta, "delta");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("MechanismConfig: delta must lie in (0,1)");
  }
  if (lambda_max < 1) {
    throw std::invalid_argument("MechanismConfig: lambda_max must be >= 1");
  }
}

void MomentProfile::validate(double slack) const {
  if (entries.empty()) throw std::logic_error("MomentProfile: empty");
  bool saw_inf = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (std::isnan(e.alpha)) throw std::logic_error("MomentProfile: NaN alpha");
    if (e.alpha < -slack) throw std::logic_error("MomentProfile: negative alpha");
    if (i > 0 && entries[i - 1].lambda >= e.lambda) {
      throw std::logic_error("MomentProfile: lambda grid not strictly increasing");
    }
    if (saw_inf && e.alpha != kPosInf) {
      throw std::logic_error("MomentProfile: finite alpha after overflowed entry");
    }
    if (e.alpha == kPosInf) saw_inf = true;
  }
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].alpha == kPosInf || entries[i - 1].alpha == kPosInf) continue;
    if (entries[i].alpha < entries[i - 1].alpha - slack) {
      throw std::logic_error("MomentProfile: alpha not nondecreasing in lambda");
    }
  }
  for (std::size_t i = 2; i < entries.size(); ++i) {
    const auto& a = entries[i - 2];
    const auto& b = entries[i - 1];
    const auto& c = entries[i];
    if (c.alpha == kPosInf || b.alpha == kPosInf || a.alpha == kPosInf) continue;
    const double left = (b.alpha - a.alpha) / static_cast<double>(b.lambda - a.lambda);
    const double right = (c.alpha - b.alpha) / static_cast<double>(c.lambda - b.lambda);
    if (right < left - slack) {
      throw std::logic_error("MomentProfile: alpha not discretely convex in lambda");
    }
  }
}

double log_moment_term_f(double r, std::int64_t eta) {
  if (eta < 0) throw std::domain_error("moment_term_f: eta must be >= 0");
  if (std::isnan(r) || r < 0.0) {
    throw std::domain_error("moment_term_f: r must be >= 0");
  }
  if (eta == 0 || eta == 1) return 0.0;
  if (r == 0.0) return 0.0;
  if (r == kPosInf) return kPosInf;
  const double de = static_cast<double>(eta);
  const double a1 = std::log(de) + (de - 1.0) * r;
  const double a2 = std::log(de - 1.0) - de * r;
  return log_sum_exp2(a1, a2) - std::log(2.0 * de - 1.0);
}

double moment_term_f(double r, std::int64_t eta) {
  return std::exp(log_moment_term_f(r, eta));
}

SubsampleWeights::SubsampleWeights(std::int64_t lambda, double zeta)
    : lambda_(lambda), zeta_(zeta) {
  if (lambda < 0) throw std::domain_error("SubsampleWeights: lambda must be >= 0");
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("SubsampleWeights: zeta must lie in [0,1]");
  }
  if (zeta == 0.0 || zeta == 1.0) return;  // exact branches bypass the table
  log_weights_.resize(static_cast<std::size_t>(lambda) + 2);
  const double log_zeta = std::log(zeta);
  const double log_1mz = std::log1p(-zeta);
  const double log_ratio = log_zeta - log_1mz;
  double w = static_cast<double>(lambda + 1) * log_1mz;
  log_weights_[0] = w;
  for (std::int64_t eta = 0; eta <= lambda; ++eta) {
    if ((eta & 255) == 255) {
      // Re-anchor to keep the recurrence drift below ~1e-14.
      w = log_binomial(lambda + 1, eta + 1) +
          static_cast<double>(lambda - eta) * log_1mz +
          static_cast<double>(eta + 1) * log_zeta;
    } else {
      w += std::log(static_cast<double>(lambda + 1 - eta) /
                    static_cast<double>(eta + 1)) +
           log_ratio;
    }
    log_weights_[static_cast<std::size_t>(eta) + 1] = w;
  }
}

namespace {

// u(eta) = log w(eta) + (eta-1) r + log(eta / (2 eta - 1)) tracks the
// dominant part of each term; its increments are strictly decreasing in eta,
// which makes the term sequence effectively unimodal and lets the sum be
// windowed around the peak with a geometric bound on the dropped tails.
class TermWindow {
 public:
  TermWindow(const SubsampleWeights& w, double r) : w_(w), r_(r) {}

  double delta_u(std::int64_t eta) const {  // u(eta+1) - u(eta), eta in [2, lambda]
    const double de = static_cast<double>(eta);
    return w_.log_weight(eta + 1) - w_.log_weight(eta) + r_ +
           std::log(((de + 1.0) * (2.0 * de - 1.0)) / (de * (2.0 * de + 1.0)));
  }

  std::int64_t find_peak() const {
    const std::int64_t lambda = w_.lambda();
    std::int64_t lo = 2;
    std::int64_t hi = lambda + 1;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (delta_u(mid) < 0.0) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  const SubsampleWeights& w_;
  double r_;
};

double clamp_alpha(double a) {
  // The weighted sum of F terms is >= 1 in exact arithmetic; tiny negative
  // rounding is snapped back to zero.
  return a < 0.0 ? 0.0 : a;
}

}  // namespace

double alpha_univariate(const SubsampleWeights& w, double r) {
  if (std::isnan(r) || r < 0.0) {
    throw std::domain_error("alpha_univariate: r must be >= 0");
  }
  const std::int64_t lambda = w.lambda();
  const double zeta = w.zeta();
  if (lambda == 0 || zeta == 0.0 || r == 0.0) return 0.0;
  if (zeta == 1.0) return log_moment_term_f(r, lambda + 1);
  if (r == kPosInf) return kPosInf;

  LogSumAccumulator acc;
  acc.add(w.log_weight(0));  // F(r,0) = 1
  acc.add(w.log_weight(1));  // F(r,1) = 1

  if (lambda + 2 <= kFullSumTerms) {
    for (std::int64_t eta = 2; eta <= lambda + 1; ++eta) {
      acc.add(w.log_weight(eta) + log_moment_term_f(r, eta));
    }
    return clamp_alpha(acc.log_sum());
  }

  const TermWindow win(w, r);
  const std::int64_t peak = win.find_peak();
  double wmax = kNegInf;
  for (std::int64_t eta = peak; eta <= lambda + 1; ++eta) {
    const double t = w.log_weight(eta) + log_moment_term_f(r, eta);
    acc.add(t);
    if (t > wmax) wmax = t;
    if (t < wmax - 46.0 && eta <= lambda && win.delta_u(eta) < -0.01) break;
  }
  for (std::int64_t eta = peak - 1; eta >= 2; --eta) {
    const double t = w.log_weight(eta) + log_moment_term_f(r, eta);
    acc.add(t);
    if (t > wmax) wmax = t;
    if (t < wmax - 46.0 && eta >= 3 && win.delta_u(eta - 1) > 0.01) break;
  }
  return clamp_alpha(acc.log_sum());
}

double alpha_univariate(double zeta, double r, std::int64_t lambda) {
  if (lambda < 0) throw std::domain_error("alpha_univariate: lambda must be >= 0");
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("alpha_univariate: zeta must lie in [0,1]");
  }
  if (std::isnan(r) || r < 0.0) {
    throw std::domain_error("alpha_univariate: r must be >= 0");
  }
  if (lambda == 0 || zeta == 0.0 || r == 0.0) return 0.0;
  if (zeta == 1.0) return log_moment_term_f(r, lambda + 1);
  const SubsampleWeights w(lambda, zeta);
  return alpha_univariate(w, r);
}

MajorizationSet::MajorizationSet(double clip, std::int64_t dim)
    : clip_(clip), dim_(dim) {
  if (!(clip >= 0.0) || !std::isfinite(clip)) {
    throw std::domain_error("MajorizationSet: clip must be finite and >= 0");
  }
  if (dim < 1) throw std::domain_error("MajorizationSet: dim must be >= 1");
}

double MajorizationSet::x(std::int64_t i) const {
  if (i < 1 || i > dim_) throw std::out_of_range("MajorizationSet: index");
  const double di = static_cast<double>(i);
  // sqrt(i) - sqrt(i-1) in cancellation-free form.
  return clip_ / (std::sqrt(di) + std::sqrt(di - 1.0));
}

double MajorizationSet::x_real(double t) const {
  if (!(t >= 1.0)) throw std::out_of_range("MajorizationSet: t must be >= 1");
  return clip_ / (std::sqrt(t) + std::sqrt(t - 1.0));
}

double MajorizationSet::prefix_sum(std::int64_t k) const {
  if (k < 1 || k > dim_) throw std::out_of_range("MajorizationSet: prefix index");
  return clip_ * std::sqrt(static_cast<double>(k));
}

namespace {

// Coordinate moment g(t) = alpha_univariate(zeta, rho (sqrt(t)-sqrt(t-1)), lambda)
// with integer evaluations memoized per call.
class CoordinateMoment {
 public:
  CoordinateMoment(const SubsampleWeights& w, double rho) : w_(w), rho_(rho) {}

  double at(std::int64_t i) {
    auto it = memo_.find(i);
    if (it != memo_.end()) return it->second;
    const double v = alpha_univariate(w_, r_of(static_cast<double>(i)));
    memo_.emplace(i, v);
    return v;
  }

  double at_real(double t) { return alpha_univariate(w_, r_of(t)); }

 private:
  double r_of(double t) const { return rho_ / (std::sqrt(t) + std::sqrt(t - 1.0)); }

  const SubsampleWeights& w_;
  double rho_;
  std::unordered_map<std::int64_t, double> memo_;
};

struct Bucket {
  std::int64_t lo, hi;  // index range [lo, hi)
  double ub, lb;
};

// Chord upper bound and midpoint (Jensen) lower bound for the bucket sum.
// Both rest on g being convex along the coordinate index: alpha is convex
// nondecreasing in r (it is a log-sum-exp of functions affine in r) and the
// majorization magnitudes are convex decreasing in the index.
Bucket make_bucket(CoordinateMoment& g, std::int64_t lo, std::int64_t hi) {
  Bucket b{lo, hi, 0.0, 0.0};
  const std::int64_t m = hi - lo;
  const double g_lo = g.at(lo);
  if (m == 1) {
    b.ub = b.lb = g_lo;
    return b;
  }
  const double g_hi = g.at(hi - 1);
  if (m == 2) {
    b.ub = b.lb = g_lo + g_hi;
    return b;
  }
  const double dm = static_cast<double>(m);
  b.ub = dm * 0.5 * (g_lo + g_hi);
  const double mid_t = 0.5 * (static_cast<double>(lo) + static_cast<double>(hi - 1));
  b.lb = std::min(dm * g.at_real(mid_t), b.ub);
  return b;
}

double exact_tail_sum(CoordinateMoment& g, std::int64_t lo, std::int64_t hi) {
  double s = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) s += g.at(i);
  return s;
}

// Certified upper bound on sum_{i=1}^{n} g(i): the head is summed exactly and
// the tail is covered by adaptively split buckets until the enclosure width
// drops below kBucketRelTol of the lower bound.
double bucketed_sum(CoordinateMoment& g, std::int64_t n, std::vector<std::int64_t>* warm_cuts) {
  const std::int64_t head_end = std::min<std::int64_t>(n, kExactHead) + 1;
  double head = exact_tail_sum(g, 1, head_end);
  if (head_end > n) return head;

  std::vector<std::int64_t> cuts;
  if (warm_cuts != nullptr && warm_cuts->size() >= 2 &&
      warm_cuts->front() == head_end && warm_cuts->back() == n + 1) {
    cuts = *warm_cuts;
  } else {
    cuts.push_back(head_end);
    for (std::int64_t c = head_end; c < n + 1;) {
      c = std::min<std::int64_t>(c * 2, n + 1);
      cuts.push_back(c);
    }
  }

  std::map<std::int64_t, Bucket> buckets;
  using QueueEntry = std::tuple<double, std::int64_t, std::int64_t>;  // gap, lo, hi
  std::priority_queue<QueueEntry> queue;
  double ub_total = 0.0;
  double lb_total = 0.0;
  auto insert_bucket = [&](std::int64_t lo, std::int64_t hi) {
    Bucket b = make_bucket(g, lo, hi);
    ub_total += b.ub;
    lb_total += b.lb;
    const double gap = b.ub - b.lb;
    if (gap > 0.0 && hi - lo > 2) queue.emplace(gap, -lo, hi);
    buckets.emplace(lo, b);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) insert_bucket(cuts[i], cuts[i + 1]);

  int splits = 0;
  while (ub_total - lb_total > kBucketRelTol * lb_total && !queue.empty() &&
         splits < kMaxBucketSplits) {
    auto [gap, neg_lo, hi] = queue.top();
    queue.pop();
    const std::int64_t lo = -neg_lo;
    auto it = buckets.find(lo);
    if (it == buckets.end() || it->second.hi != hi) continue;  // stale entry
    ub_total -= it->second.ub;
    lb_total -= it->second.lb;
    buckets.erase(it);
    const std::int64_t mid = lo + (hi - lo) / 2;
    insert_bucket(lo, mid);
    insert_bucket(mid, hi);
    ++splits;
  }

  // Deterministic final reduction in ascending index order.
  double total = head;
  if (warm_cuts != nullptr) warm_cuts->clear();
  for (const auto& [lo, b] : buckets) {
    total += b.ub;
    if (warm_cuts != nullptr) warm_cuts->push_back(lo);
  }
  if (warm_cuts != nullptr) warm_cuts->push_back(n + 1);
  return total;
}

}  // namespace

struct Lap2Accountant::Impl {
  double zeta;
  std::int64_t dim;
  std::int64_t lambda_max;
  MultivariateMode mode;
  std::vector<std::unique_ptr<SubsampleWeights>> weights;  // index = lambda
  std::vector<std::int64_t> warm_cuts;

  const SubsampleWeights& weights_for(std::int64_t lambda) {
    auto& slot = weights[static_cast<std::size_t>(lambda)];
    if (!slot) slot = std::make_unique<SubsampleWeights>(lambda, zeta);
    return *slot;
  }

  double alpha_at(double rho, std::int64_t lambda, bool bucketed,
                  std::vector<std::int64_t>* cuts) {
    if (lambda == 0 || zeta == 0.0 || rho == 0.0) return 0.0;
    CoordinateMoment g(weights_for(lambda), rho);
    if (!bucketed) return exact_tail_sum(g, 1, dim + 1);
    return bucketed_sum(g, dim, cuts);
  }
};

Lap2Accountant::Lap2Accountant(double zeta, std::int64_t dim, std::int64_t lambda_max,
                               MultivariateMode mode)
    : impl_(std::make_unique<Impl>()) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    throw std::domain_error("Lap2Accountant: zeta must lie in [0,1]");
  }
  if (dim < 1) throw std::domain_error("Lap2Accountant: dim must be >= 1");
  if (lambda_max < 1) throw std::domain_error("Lap2Accountant: lambda_max must be >= 1");
  if (mode == MultivariateMode::kAuto) {
    MechanismConfig probe;
    probe.sampling_rate = zeta;
    probe.dim = dim;
    probe.lambda_max = lambda_max;
    mode = resolve_multivariate_mode(probe);
  }
  impl_->zeta = zeta;
  impl_->dim = dim;
  impl_->lambda_max = lambda_max;
  impl_->mode = mode;
  impl_->weights.resize(static_cast<std::size_t>(lambda_max) + 2);
}

Lap2Accountant::~Lap2Accountant() = default;
Lap2Accountant::Lap2Accountant(Lap2Accountant&&) noexcept = default;
Lap2Accountant& Lap2Accountant::operator=(Lap2Accountant&&) noexcept = default;

MultivariateMode Lap2Accountant::mode() const { return impl_->mode; }

MultivariateAlpha Lap2Accountant::alpha(double rho, std::int64_t lambda) {
  if (lambda < 0 || lambda > impl_->lambda_max + 1) {
    throw std::domain_error("Lap2Accountant: lambda outside the configured grid");
  }
  if (std::isnan(rho) || rho < 0.0) {
    throw std::domain_error("Lap2Accountant: rho must be >= 0");
  }
  const bool bucketed = impl_->mode == MultivariateMode::kBucketed;
  std::vector<std::int64_t> local_cuts;
  const double a = impl_->alpha_at(rho, lambda, bucketed, &local_cuts);
  return MultivariateAlpha{a, !bucketed};
}

MomentProfile Lap2Accountant::per_step_profile(double rho) {
  if (std::isnan(rho) || rho < 0.0) {
    throw std::domain_error("Lap2Accountant: rho must be >= 0");
  }
  const bool bucketed = impl_->mode == MultivariateMode::kBucketed;
  MomentProfile p;
  p.mechanism = Mechanism::kLap2;
  p.scope = ProfileScope::kPerStep;
  p.exact = !bucketed;
  p.entries.reserve(static_cast<std::size_t>(impl_->lambda_max));
  for (std::int64_t lambda = 1; lambda <= impl_->lambda_max; ++lambda) {
    const double a = impl_->alpha_at(rho, lambda, bucketed, &impl_->warm_cuts);
    p.entries.push_back({lambda, a});
  }
  return p;
}

MultivariateMode resolve_multivariate_mode(const MechanismConfig& cfg) {
  if (cfg.mode != MultivariateMode::kAuto) return cfg.mode;
  // Exact summation is quadratic-ish work (dim x lambda_max moment terms);
  // past this budget the certified bucketed bound is used instead.
  constexpr std::int64_t kAutoExactWork = std::int64_t{1} << 23;
  const bool exact = cfg.dim <= (std::int64_t{1} << 20) &&
                     cfg.dim * cfg.lambda_max <= kAutoExactWork;
  return exact ? MultivariateMode::kExact : MultivariateMode::kBucketed;
}

MultivariateAlpha alpha_multivariate(const MechanismConfig& cfg, std::int64_t lambda,
                                     MultivariateMode mode) {
  cfg.validate();
  if (cfg.mechanism != Mechanism::kLap2) {
    throw std::invalid_argument("alpha_multivariate: mechanism must be lap2");
  }
  if (mode == MultivariateMode::kAuto) {
    MechanismConfig resolved = cfg;
    resolved.mode = MultivariateMode::kAuto;
    mode = resolve_multivariate_mode(resolved);
  }
  Lap2Accountant acct(cfg.sampling_rate, cfg.dim, std::max<std::int64_t>(lambda, 1), mode);
  return acct.alpha(cfg.clip / cfg.noise_scale, lambda);
}

double pure_laplace_epsilon(double clip, double scale) {
  if (!(clip >= 0.0)) throw std::domain_error("pure_laplace_epsilon: clip must be >= 0");
  if (!(scale > 0.0)) throw std::domain_error("pure_laplace_epsilon: scale must be > 0");
  return clip / scale;
}

ClippingGeometry clipping_geometry(std::int64_t n) {
  if (n < 1) throw std::domain_error("clipping_geometry: n must be >= 1");
  const double dn = static_cast<double>(n);
  const double log_ratio = dn * std::log(2.0 / std::sqrt(std::numbers::pi)) +
                           std::lgamma(dn / 2.0 + 1.0) - std::lgamma(dn + 1.0);
  return ClippingGeometry{std::sqrt(dn), log_ratio};
}

}  // namespace lap2
