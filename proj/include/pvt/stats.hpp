#pragma once

// Empirical-distribution machinery shared by the Monte Carlo experiments:
// compensated accumulators, ECDFs, Kolmogorov-Smirnov distances against
// analytic laws, and moment / correlation estimators with standard errors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pvt/errors.hpp"

namespace pvt::stats {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  void merge(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// A point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Mergeable accumulator of count, mean and variance. Sums of x and x^2 are
/// kept with compensated summation around a fixed shift (the first sample),
/// which keeps the variance accurate and makes merging a plain addition.
class MomentAccumulator {
 public:
  void add(double v) {
    if (n_ == 0) shift_ = v;
    const double d = v - shift_;
    s1_.add(d);
    s2_.add(d * d);
    ++n_;
  }

  void merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    // re-centre the other accumulator on our shift
    const double delta = o.shift_ - shift_;
    const double n = static_cast<double>(o.n_);
    const double o1 = o.s1_.value();
    const double o2 = o.s2_.value();
    s1_.add(o1 + n * delta);
    s2_.add(o2 + 2.0 * delta * o1 + n * delta * delta);
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }

  double mean() const {
    if (n_ == 0) throw ParameterError("mean of empty accumulator");
    return shift_ + s1_.value() / static_cast<double>(n_);
  }

  /// Unbiased sample variance.
  double variance() const {
    if (n_ < 2) throw ParameterError("variance needs at least two samples");
    const double n = static_cast<double>(n_);
    const double m = s1_.value() / n;
    return std::max(0.0, (s2_.value() - n * m * m) / (n - 1.0));
  }

  Estimate mean_estimate() const {
    return {mean(), std::sqrt(variance() / static_cast<double>(n_))};
  }

 private:
  std::size_t n_ = 0;
  double shift_ = 0.0;
  CompensatedSum s1_;
  CompensatedSum s2_;
};

/// Sorted sample collection supporting ECDF queries and goodness-of-fit.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples)
      : samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end());
  }

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::span<const double> samples() const { return samples_; }

  /// Fraction of samples <= t (right-continuous).
  double ecdf(double t) const {
    if (samples_.empty()) throw ParameterError("ecdf of empty distribution");
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
    return static_cast<double>(it - samples_.begin()) /
           static_cast<double>(samples_.size());
  }

  double ccdf(double t) const { return 1.0 - ecdf(t); }

  /// Type-7 (linear interpolation) quantile.
  double quantile(double p) const {
    if (samples_.empty()) throw ParameterError("quantile of empty distribution");
    p = std::clamp(p, 0.0, 1.0);
    const double h = p * static_cast<double>(samples_.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, samples_.size() - 1);
    return samples_[lo] + (h - static_cast<double>(lo)) * (samples_[hi] - samples_[lo]);
  }

 private:
  std::vector<double> samples_;
};

/// Kolmogorov-Smirnov distance sup_t |F_n(t) - F(t)| between the ECDF and a
/// continuous cdf, evaluated on both sides of every jump.
template <typename Cdf>
double ks_distance(const EmpiricalDistribution& dist, Cdf&& cdf) {
  const auto xs = dist.samples();
  if (xs.empty()) throw ParameterError("KS distance of empty distribution");
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    // handle ties as one jump
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(j + 1) / n - f)});
    i = j + 1;
  }
  return d;
}

/// Upper quantile of the asymptotic Kolmogorov distribution, scaled to n
/// samples: P(sqrt(n) D_n > k) ~ 2 sum (-1)^{j-1} exp(-2 j^2 k^2).
inline double kolmogorov_critical_value(std::size_t n, double alpha) {
  auto tail = [](double k) {
    double s = 0.0;
    for (int j = 1; j <= 100; ++j)
      s += ((j % 2) ? 2.0 : -2.0) * std::exp(-2.0 * j * j * k * k);
    return s;
  };
  double lo = 0.2, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

/// Raw moment E[X^k] with the standard error of the sample mean of X^k.
inline Estimate moment(std::span<const double> xs, int k) {
  if (xs.size() < 2) throw ParameterError("moment needs at least two samples");
  MomentAccumulator acc;
  for (double x : xs) acc.add(std::pow(x, k));
  return acc.mean_estimate();
}

inline Estimate moment(const EmpiricalDistribution& dist, int k) {
  return moment(dist.samples(), k);
}

/// Pearson correlation with a delta-method (influence-function) standard
/// error, valid without normality.
inline Estimate correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ParameterError("correlation: length mismatch");
  if (xs.size() < 3) throw ParameterError("correlation needs at least three pairs");
  MomentAccumulator ax, ay;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ax.add(xs[i]);
    ay.add(ys[i]);
  }
  const double mx = ax.mean(), my = ay.mean();
  CompensatedSum sxx, syy, sxy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  const double n = static_cast<double>(xs.size());
  const double sdx = std::sqrt(sxx.value() / n), sdy = std::sqrt(syy.value() / n);
  if (sdx == 0.0 || sdy == 0.0) throw ParameterError("correlation: zero variance");
  const double r = sxy.value() / (n * sdx * sdy);
  MomentAccumulator infl;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double zx = (xs[i] - mx) / sdx, zy = (ys[i] - my) / sdy;
    infl.add(zx * zy - 0.5 * r * (zx * zx + zy * zy));
  }
  return {r, std::sqrt(infl.variance() / n)};
}

/// E[num] / E[den] with a delta-method standard error.
inline Estimate ratio_of_means(std::span<const double> num, std::span<const double> den) {
  if (num.size() != den.size() || num.size() < 2)
    throw ParameterError("ratio_of_means: need two equal-length samples, n >= 2");
  MomentAccumulator an, ad;
  for (std::size_t i = 0; i < num.size(); ++i) {
    an.add(num[i]);
    ad.add(den[i]);
  }
  const double r = an.mean() / ad.mean();
  MomentAccumulator lin;
  for (std::size_t i = 0; i < num.size(); ++i) lin.add((num[i] - r * den[i]) / ad.mean());
  return {r, std::sqrt(lin.variance() / static_cast<double>(num.size()))};
}

/// Mean after discarding the lowest and highest `trim` fraction of samples.
inline double trimmed_mean(std::span<const double> xs, double trim) {
  if (xs.empty()) throw ParameterError("trimmed_mean of empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(v.size())));
  if (2 * cut >= v.size()) throw ParameterError("trimmed_mean: trim too large");
  CompensatedSum s;
  for (std::size_t i = cut; i < v.size() - cut; ++i) s.add(v[i]);
  return s.value() / static_cast<double>(v.size() - 2 * cut);
}

/// Median of the means of `batches` contiguous batches (in index order).
inline double median_of_means(std::span<const double> xs, std::size_t batches) {
  if (batches == 0 || xs.size() < batches)
    throw ParameterError("median_of_means: fewer samples than batches");
  std::vector<double> means;
  means.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * xs.size() / batches;
    const std::size_t hi = (b + 1) * xs.size() / batches;
    CompensatedSum s;
    for (std::size_t i = lo; i < hi; ++i) s.add(xs[i]);
    means.push_back(s.value() / static_cast<double>(hi - lo));
  }
  std::sort(means.begin(), means.end());
  const std::size_t m = means.size();
  return (m % 2) ? means[m / 2] : 0.5 * (means[m / 2 - 1] + means[m / 2]);
}

inline Estimate mean(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  if (acc.count() < 2) throw ParameterError("mean estimate needs at least two samples");
  return acc.mean_estimate();
}

}  // namespace pvt::stats
