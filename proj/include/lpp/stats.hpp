#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Mergeable moment accumulators (Chan et al. pairwise update formulas).
// Merging partials in a fixed order gives bit-identical results for any
// thread count.

namespace lpp {

class MomentAccumulator {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
           4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
  }

  void merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double delta = o.mean_ - mean_;
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    const double d4 = d2 * d2;
    const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                      4.0 * delta * (na * o.m3_ - nb * m3_) / n;
    const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * o.m2_ - nb * m2_) / n;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double sum() const { return mean_ * static_cast<double>(n_); }

  // Unbiased sample variance.
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double fourth_central() const {
    return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0;
  }

  double se_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

  // Standard error of the sample variance (distribution-free, via the
  // fourth central moment).
  double se_variance() const {
    if (n_ < 4) return 0.0;
    const double n = static_cast<double>(n_);
    const double s2 = variance();
    const double mu4 = fourth_central();
    const double v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

class BivariateAccumulator {
 public:
  void add(double x, double y) {
    ++n_;
    const double n = static_cast<double>(n_);
    const double dx = x - mean_x_;
    mean_x_ += dx / n;
    m2x_ += dx * (x - mean_x_);
    const double dy = y - mean_y_;
    mean_y_ += dy / n;
    m2y_ += dy * (y - mean_y_);
    cxy_ += dx * (y - mean_y_);
  }

  void merge(const BivariateAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double dx = o.mean_x_ - mean_x_;
    const double dy = o.mean_y_ - mean_y_;
    m2x_ += o.m2x_ + dx * dx * na * nb / n;
    m2y_ += o.m2y_ + dy * dy * na * nb / n;
    cxy_ += o.cxy_ + dx * dy * na * nb / n;
    mean_x_ += dx * nb / n;
    mean_y_ += dy * nb / n;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean_x() const { return mean_x_; }
  double mean_y() const { return mean_y_; }
  double variance_x() const {
    return n_ > 1 ? m2x_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double variance_y() const {
    return n_ > 1 ? m2y_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double covariance() const {
    return n_ > 1 ? cxy_ / static_cast<double>(n_ - 1) : 0.0;
  }

  // NaN when either marginal is degenerate.
  double correlation() const {
    const double denom = std::sqrt(variance_x() * variance_y());
    if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return covariance() / denom;
  }

  // Fisher large-sample approximation.
  double se_correlation() const {
    if (n_ < 4) return 0.0;
    const double r = correlation();
    if (std::isnan(r)) return 0.0;
    return (1.0 - r * r) / std::sqrt(static_cast<double>(n_ - 3));
  }

  // Bivariate-normal asymptotic for the sample covariance.
  double se_covariance() const {
    if (n_ < 2) return 0.0;
    const double c = covariance();
    const double v = (variance_x() * variance_y() + c * c) /
                     static_cast<double>(n_);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double m2x_ = 0.0;
  double m2y_ = 0.0;
  double cxy_ = 0.0;
};

}  // namespace lpp
