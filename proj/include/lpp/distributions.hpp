#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpp/rng.hpp"

namespace lpp {

// Conditioning event {X > k} has numerically vanishing probability.
struct DegenerateTailError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DistKind {
  exponential,
  geometric,
  pareto,
  stretched_exponential,
  uniform01,
  constant,
};

// A vertex-weight law F on [0, inf): sampling, distribution function,
// truncated moments and tail-conditional statistics.
//
// Conventions: Geometric is supported on {1,2,...} with P(X=j)=(1-p)^{j-1}p;
// Pareto has P(X>x)=x^{-gamma} on [1,inf) and requires gamma>2; the
// stretched-exponential tail is P(X>x)=exp(-beta_bar*x^beta) on [0,inf).
class WeightDistribution {
 public:
  static WeightDistribution exponential(double rate);
  static WeightDistribution geometric(double p);
  static WeightDistribution pareto(double gamma);
  static WeightDistribution stretched_exponential(double beta,
                                                  double beta_bar);
  static WeightDistribution uniform01();
  static WeightDistribution constant(double value);

  // Spec strings: exp:1.0  geom:0.5  pareto:3.0  stretched:0.5:1.0  unif01
  // const:1.0.  Throws std::invalid_argument on malformed input.
  static WeightDistribution parse(std::string_view spec);
  std::string spec() const;

  DistKind kind() const { return kind_; }
  // True when all samples are exact integers (enables exact tie handling).
  bool integer_valued() const;
  // True for atomless laws (geodesics are a.s. unique).
  bool continuous() const;
  // sup of the support, or +inf for unbounded laws.
  double support_sup() const;

  double sample(rng::Stream& stream) const;
  double cdf(double x) const;
  // P(X > x), computed directly (1 - cdf would cancel in the deep tail).
  double survival(double x) const;

  double mean() const;
  double variance() const;

  // E[(X-k)_+], k >= 0.
  double truncated_mean(double k) const;
  // E[(X-a)_+ (X-b)_+], symmetric in (a, b).
  double truncated_cross_moment(double a, double b) const;

  struct TailStats {
    double mean;
    double variance;
  };
  // E[X | X>k] and Var(X | X>k); throws DegenerateTailError when the
  // conditioning event is numerically empty.
  TailStats conditional_tail_stats(double k) const;

  struct MomentCondition {
    double value;
    bool satisfied;
  };
  // Integral of (1-F(sqrt(x)))^{1/d}; satisfied when the cutoff-doubling
  // test converges.  Requires d >= 2.
  MomentCondition check_moment_condition(int d) const;

  struct VarianceFloor {
    double floor;      // min conditional variance over the probed k values
    double worst_k;    // where the minimum was attained
    bool satisfied;    // floor >= threshold and no degenerate k hit
    std::vector<double> k_values;
    std::vector<double> variances;  // NaN where the tail was degenerate
  };
  // Uniform lower bound check for Var(X | X>k) over a k grid.  Laws with
  // bounded support are additionally probed just below the support edge,
  // where the conditional variance collapses.
  VarianceFloor conditional_variance_floor(
      std::span<const double> k_grid) const;
  VarianceFloor conditional_variance_floor() const;

  static constexpr double kFloorThreshold = 1e-4;

 private:
  WeightDistribution(DistKind kind, double a, double b);

  DistKind kind_;
  double a_;  // rate / p / gamma / beta / unused / value
  double b_;  // beta_bar for stretched-exponential, otherwise unused
};

}  // namespace lpp
