#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/quadrature.hpp"
#include "lpp/stats.hpp"

using namespace lpp;

namespace {

WeightDistribution exp1() { return WeightDistribution::exponential(1.0); }

// Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| over distinct sample
// values, using left limits at atoms (integer-valued laws).
double ks_distance(std::vector<double> sample, const WeightDistribution& f) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  size_t i = 0;
  while (i < sample.size()) {
    size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double x = sample[i];
    const double left =
        f.integer_valued() ? f.cdf(x - 0.5) : f.cdf(x);  // F(x^-)
    d = std::max(d, std::abs(static_cast<double>(j) / n - f.cdf(x)));
    d = std::max(d, std::abs(static_cast<double>(i) / n - left));
    i = j;
  }
  return d;
}

std::vector<double> draw(const WeightDistribution& f, size_t count,
                         std::uint64_t seed) {
  std::vector<double> out(count);
  for (size_t i = 0; i < count; ++i) {
    rng::Stream s(seed, i, rng::Tag::generic);
    out[i] = f.sample(s);
  }
  return out;
}

}  // namespace

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(WeightDistribution::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::geometric(1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::pareto(2.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::pareto(1.5), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::stretched_exponential(1.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::stretched_exponential(0.5, 0.0),
                  std::invalid_argument);
  CHECK_NOTHROW(WeightDistribution::pareto(2.0000001));
}

TEST_CASE("spec strings round-trip and reject junk") {
  for (const char* spec : {"exp:1.0", "geom:0.5", "pareto:3.0",
                           "stretched:0.5:1.0", "unif01", "const:1.0"}) {
    const auto dist = WeightDistribution::parse(spec);
    const auto again = WeightDistribution::parse(dist.spec());
    CHECK(again.kind() == dist.kind());
  }
  CHECK_THROWS_AS(WeightDistribution::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::parse("exp"), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::parse("exp:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::parse("exp:abc"), std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::parse("pareto:2.0"),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightDistribution::parse("bogus:1"), std::invalid_argument);
}

TEST_CASE("sampling: support and first moments") {
  const auto unif = WeightDistribution::uniform01();
  for (double x : draw(unif, 1000, 7)) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }

  MomentAccumulator acc;
  for (double x : draw(exp1(), 1000000, 11)) acc.add(x);
  CHECK(std::abs(acc.mean() - 1.0) < 0.01);

  MomentAccumulator pacc;
  for (double x : draw(WeightDistribution::pareto(3.0), 1000000, 13)) {
    CHECK(x >= 1.0);
    pacc.add(x);
  }
  CHECK(std::abs(pacc.mean() - 1.5) < 0.02);

  for (double x : draw(WeightDistribution::geometric(0.5), 1000, 17)) {
    CHECK(x >= 1.0);
    CHECK(x == std::floor(x));
  }
}

TEST_CASE("cdf closed forms") {
  CHECK(exp1().cdf(0.0) == 0.0);
  CHECK(exp1().cdf(-1.0) == 0.0);
  CHECK(WeightDistribution::pareto(3.0).cdf(2.0) == doctest::Approx(0.875));
  CHECK(WeightDistribution::stretched_exponential(1.0, 1.0).cdf(std::log(2.0)) ==
        doctest::Approx(0.5));
  const auto geom = WeightDistribution::geometric(0.5);
  CHECK(geom.cdf(0.5) == 0.0);
  CHECK(geom.cdf(1.0) == doctest::Approx(0.5));
  CHECK(geom.cdf(2.7) == doctest::Approx(0.75));
}

TEST_CASE("empirical cdf matches cdf (KS at 99%)") {
  const double crit = 1.6276 / std::sqrt(100000.0);
  int tag = 0;
  for (const char* spec : {"exp:1.0", "pareto:3.0", "stretched:0.5:1.0",
                           "unif01", "geom:0.5"}) {
    const auto dist = WeightDistribution::parse(spec);
    const double d = ks_distance(draw(dist, 100000, 1000 + tag++), dist);
    CAPTURE(spec);
    CHECK(d < crit);
  }
}

TEST_CASE("moment condition (squared-weight integrability)") {
  const auto unif = WeightDistribution::uniform01().check_moment_condition(2);
  CHECK(unif.satisfied);
  CHECK(unif.value == doctest::Approx(8.0 / 15.0).epsilon(1e-7));

  const auto exp2 = exp1().check_moment_condition(2);
  CHECK(exp2.satisfied);
  CHECK(exp2.value == doctest::Approx(8.0).epsilon(1e-7));

  // Pareto tail (x^{-3/2})^{1/2} is not integrable: gamma <= 2d diverges.
  CHECK_FALSE(WeightDistribution::pareto(3.0).check_moment_condition(2).satisfied);
  CHECK(WeightDistribution::pareto(5.0).check_moment_condition(2).satisfied);

  const auto geom = WeightDistribution::geometric(0.5).check_moment_condition(2);
  CHECK(geom.satisfied);
  const double r = std::sqrt(0.5);
  CHECK(geom.value ==
        doctest::Approx(2.0 * r / ((1 - r) * (1 - r)) + 1.0 / (1 - r)));

  CHECK(WeightDistribution::constant(3.0).check_moment_condition(2).value ==
        doctest::Approx(9.0));
  CHECK(WeightDistribution::stretched_exponential(0.5, 1.0)
            .check_moment_condition(2)
            .satisfied);
  CHECK_THROWS_AS(exp1().check_moment_condition(1), std::invalid_argument);
}

TEST_CASE("truncated mean closed forms and quadrature") {
  CHECK(exp1().truncated_mean(0.0) == doctest::Approx(1.0));
  CHECK(exp1().truncated_mean(2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(WeightDistribution::exponential(2.5).truncated_mean(1.3) ==
        doctest::Approx(std::exp(-3.25) / 2.5));
  CHECK(WeightDistribution::uniform01().truncated_mean(1.0) == 0.0);
  CHECK(WeightDistribution::uniform01().truncated_mean(0.25) ==
        doctest::Approx(0.28125).epsilon(1e-8));  // (1-k)^2/2
  CHECK(WeightDistribution::pareto(3.0).truncated_mean(2.0) ==
        doctest::Approx(0.125).epsilon(1e-8));
  CHECK(WeightDistribution::stretched_exponential(0.5, 1.0).truncated_mean(0.0) ==
        doctest::Approx(2.0).epsilon(1e-7));
  CHECK(WeightDistribution::constant(2.0).truncated_mean(0.5) ==
        doctest::Approx(1.5));

  // Geometric closed form against the defining series.
  const auto geom = WeightDistribution::geometric(0.5);
  for (double k : {0.0, 0.5, 1.0, 2.7, 5.0}) {
    double series = 0.0;
    for (int j = 1; j < 200; ++j)
      if (j > k) series += (j - k) * 0.5 * std::pow(0.5, j - 1);
    CHECK(geom.truncated_mean(k) == doctest::Approx(series).epsilon(1e-12));
  }
}

TEST_CASE("truncated mean is non-increasing and vanishes at infinity") {
  for (const char* spec : {"exp:1.0", "geom:0.5", "pareto:3.0",
                           "stretched:0.5:1.0", "unif01"}) {
    const auto dist = WeightDistribution::parse(spec);
    double prev = dist.truncated_mean(0.0);
    for (double k : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      const double cur = dist.truncated_mean(k);
      CAPTURE(spec);
      CAPTURE(k);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
    CHECK(dist.truncated_mean(200.0) < 1e-3);
  }
}

TEST_CASE("truncated cross moment: closed forms, symmetry, diagonal") {
  CHECK(exp1().truncated_cross_moment(0.0, 0.0) == doctest::Approx(2.0));
  CHECK(exp1().truncated_cross_moment(0.0, 1.0) ==
        doctest::Approx(3.0 * std::exp(-1.0)));
  CHECK(WeightDistribution::exponential(2.5).truncated_cross_moment(0.7, 1.9) ==
        doctest::Approx(std::exp(-2.5 * 1.9) * (1.2 / 2.5 + 2.0 / 6.25)));
  CHECK(WeightDistribution::pareto(3.0).truncated_cross_moment(0.0, 2.0) ==
        doctest::Approx(0.75).epsilon(1e-8));
  CHECK(WeightDistribution::uniform01().truncated_cross_moment(0.2, 0.55) ==
        doctest::Approx(0.0658125).epsilon(1e-8));

  // Geometric closed form against the defining series.
  const auto geom = WeightDistribution::geometric(0.5);
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {0.5, 2.3}, {2.0, 2.0}, {1.2, 0.3}}) {
    double series = 0.0;
    for (int j = 1; j < 200; ++j)
      if (j > a && j > b) series += (j - a) * (j - b) * 0.5 * std::pow(0.5, j - 1);
    CHECK(geom.truncated_cross_moment(a, b) ==
          doctest::Approx(series).epsilon(1e-12));
  }

  for (const char* spec : {"exp:1.0", "geom:0.5", "pareto:3.0", "unif01"}) {
    const auto dist = WeightDistribution::parse(spec);
    for (double a : {0.0, 0.7, 2.0}) {
      for (double b : {0.3, 1.5}) {
        CHECK(dist.truncated_cross_moment(a, b) ==
              doctest::Approx(dist.truncated_cross_moment(b, a)));
      }
    }
    // Diagonal case is the second truncated moment E[(X-k)_+^2]; cross it
    // against the conditional-tail route:
    //   E[(X-k)_+^2] = P(X>k) * (Var(X|X>k) + (E[X|X>k] - k)^2).
    for (double k : {0.0, 0.8, 2.0}) {
      const double s = dist.survival(k);
      if (s < 1e-9) continue;
      const auto stats = dist.conditional_tail_stats(k);
      const double excess = stats.mean - k;
      const double via_tail = s * (stats.variance + excess * excess);
      CAPTURE(spec);
      CAPTURE(k);
      CHECK(dist.truncated_cross_moment(k, k) ==
            doctest::Approx(via_tail).epsilon(1e-6));
    }
  }
}

TEST_CASE("cross moment dominates product of truncated means") {
  // Cov((X-a)_+, (X-b)_+) >= 0: comonotone transforms of one variable.
  for (const char* spec : {"exp:1.0", "geom:0.5", "pareto:3.0",
                           "stretched:0.5:1.0", "unif01"}) {
    const auto dist = WeightDistribution::parse(spec);
    for (double a : {0.0, 0.4, 1.0, 3.0}) {
      for (double b : {0.0, 0.9, 2.5}) {
        const double cov = dist.truncated_cross_moment(a, b) -
                           dist.truncated_mean(a) * dist.truncated_mean(b);
        CAPTURE(spec);
        CHECK(cov >= -1e-10);
      }
    }
  }
}

TEST_CASE("conditional tail stats: analytic laws") {
  for (double k : {0.0, 1.0, 7.5}) {
    const auto stats = exp1().conditional_tail_stats(k);
    CHECK(stats.variance == doctest::Approx(1.0));  // memorylessness
    CHECK(stats.mean == doctest::Approx(k + 1.0));
  }

  const auto pareto = WeightDistribution::pareto(3.0);
  CHECK(pareto.conditional_tail_stats(2.0).variance ==
        doctest::Approx(3.0));  // k^2 Var(X) = 4 * 3/4
  CHECK(pareto.conditional_tail_stats(2.0).mean == doctest::Approx(3.0));
  CHECK(pareto.conditional_tail_stats(0.5).variance == doctest::Approx(0.75));

  const auto geom = WeightDistribution::geometric(0.5);
  CHECK(geom.conditional_tail_stats(3.0).variance == doctest::Approx(2.0));
  CHECK(geom.conditional_tail_stats(3.7).mean == doctest::Approx(3.0 + 2.0));

  const auto unif = WeightDistribution::uniform01();
  CHECK(unif.conditional_tail_stats(0.5).mean == doctest::Approx(0.75));
  CHECK(unif.conditional_tail_stats(0.5).variance ==
        doctest::Approx(0.5 * 0.5 / 12.0));  // U(0.5,1): width^2/12
  CHECK_THROWS_AS(unif.conditional_tail_stats(1.0), DegenerateTailError);
  CHECK_THROWS_AS(WeightDistribution::constant(2.0).conditional_tail_stats(2.0),
                  DegenerateTailError);
}

TEST_CASE("conditional tail stats: stretched-exponential quadrature") {
  // For beta = 1/2, beta_bar = 1 the tail substitution gives exactly
  // E[X|X>k] = k + 2(1+sqrt(k)) and Var(X|X>k) = 4k + 16 sqrt(k) + 20.
  const auto dist = WeightDistribution::stretched_exponential(0.5, 1.0);
  for (double k : {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const auto stats = dist.conditional_tail_stats(k);
    const double bk = 2.0 * (1.0 + std::sqrt(k));
    const double var = 4.0 * k + 16.0 * std::sqrt(k) + 20.0;
    CAPTURE(k);
    CHECK(stats.mean == doctest::Approx(k + bk).epsilon(1e-6));
    CHECK(stats.variance == doctest::Approx(var).epsilon(1e-5));
  }
  // beta = 1 reduces to the exponential law.
  const auto expo = WeightDistribution::stretched_exponential(1.0, 2.0);
  CHECK(expo.conditional_tail_stats(5.0).variance == doctest::Approx(0.25));
}

TEST_CASE("conditional stats agree with Monte Carlo tail conditioning") {
  struct Case {
    const char* spec;
    double k;
  };
  for (const Case c : {Case{"stretched:0.5:1.0", 1.0}, Case{"pareto:3.0", 2.0},
                       Case{"exp:1.0", 1.5}, Case{"geom:0.5", 2.0}}) {
    const auto dist = WeightDistribution::parse(c.spec);
    MomentAccumulator acc;
    for (size_t i = 0; i < 1000000; ++i) {
      rng::Stream s(555, i, rng::Tag::generic);
      const double x = dist.sample(s);
      if (x > c.k) acc.add(x);
    }
    const auto stats = dist.conditional_tail_stats(c.k);
    CAPTURE(c.spec);
    CHECK(std::abs(acc.mean() - stats.mean) <= 3.0 * acc.se_mean());
    CHECK(std::abs(acc.variance() - stats.variance) <=
          3.0 * acc.se_variance());
  }
}

TEST_CASE("conditional variance floor (assumption on large weights)") {
  const auto expf = exp1().conditional_variance_floor();
  CHECK(expf.satisfied);
  CHECK(expf.floor == doctest::Approx(1.0));

  const auto geomf = WeightDistribution::geometric(0.5).conditional_variance_floor();
  CHECK(geomf.satisfied);
  CHECK(geomf.floor == doctest::Approx(2.0));

  const auto paretof = WeightDistribution::pareto(3.0).conditional_variance_floor();
  CHECK(paretof.satisfied);
  CHECK(paretof.floor == doctest::Approx(0.75));

  const auto stretchedf = WeightDistribution::stretched_exponential(0.5, 1.0)
                              .conditional_variance_floor();
  CHECK(stretchedf.satisfied);
  CHECK(stretchedf.floor == doctest::Approx(20.0).epsilon(1e-4));

  // Bounded support: the floor collapses near the edge and must be
  // reported honestly.
  const auto uniff = WeightDistribution::uniform01().conditional_variance_floor();
  CHECK_FALSE(uniff.satisfied);
  CHECK(uniff.floor < 1e-4);

  CHECK_FALSE(WeightDistribution::constant(1.0).conditional_variance_floor().satisfied);
}

TEST_CASE("stretched conditional variance grows for beta < 1") {
  const auto dist = WeightDistribution::stretched_exponential(0.5, 1.0);
  double prev = 0.0;
  for (double k : {1.0, 10.0, 100.0}) {
    const double var = dist.conditional_tail_stats(k).variance;
    CHECK(var > prev);
    CHECK(var > 0.5);
    prev = var;
  }
}
