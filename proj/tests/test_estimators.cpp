#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "lpp/estimators.hpp"
#include "lpp/experiments.hpp"
#include "lpp/lpp_core.hpp"

using namespace lpp;

namespace {

const WeightDistribution kExp1 = WeightDistribution::exponential(1.0);

}  // namespace

TEST_CASE("passage stats: degenerate endpoints") {
  const Grid grid(4, 2);

  const auto at0 = estimate_passage_stats(grid, kExp1, 0.0, 500, 42);
  CHECK(at0.corr.estimate == 1.0);
  CHECK(at0.corr.std_error == 0.0);
  CHECK(at0.l2.estimate == 0.0);
  // Continuous law: unique geodesic, overlap = |pi_0| = d*n+1 a.s.
  CHECK(at0.overlap.estimate == 9.0);
  CHECK(at0.q_t.estimate ==
        doctest::Approx(at0.var_t0.estimate + at0.mean_t0 * at0.mean_t0)
            .epsilon(0.05));

  const auto at1 = estimate_passage_stats(grid, kExp1, 1.0, 4000, 42);
  CHECK(std::abs(at1.corr.estimate) <= 3.0 * at1.corr.std_error);
}

TEST_CASE("passage stats: covariance reconciles with variance and L2") {
  const Grid grid(4, 2);
  const auto stats = estimate_passage_stats(grid, kExp1, 0.3, 5000, 7);
  const double lhs = stats.covariance;
  const double rhs = stats.var_t0.estimate - 0.5 * stats.l2.estimate;
  const double sigma = std::sqrt(
      stats.covariance_se * stats.covariance_se +
      stats.var_t0.std_error * stats.var_t0.std_error +
      0.25 * stats.l2.std_error * stats.l2.std_error);
  CHECK(std::abs(lhs - rhs) <= 4.0 * sigma);
}

TEST_CASE("passage stats: input validation") {
  const Grid grid(2, 2);
  CHECK_THROWS_AS(estimate_passage_stats(grid, kExp1, 0.5, 99, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_passage_stats(grid, kExp1, 1.5, 500, 1),
                  std::invalid_argument);
}

TEST_CASE("variance estimator matches the paired estimator's marginal") {
  const Grid grid(4, 2);
  const auto direct = estimate_variance(grid, kExp1, 1500, 99);
  const auto paired = estimate_passage_stats(grid, kExp1, 0.5, 1500, 99);
  // Identical replicate seeds and identical base field: bit-equal variance.
  CHECK(direct.variance == paired.var_t0.estimate);
  CHECK(direct.variance_se == paired.var_t0.std_error);
}

TEST_CASE("influence at the origin is the weight variance") {
  const Grid grid(3, 2);
  const DynamicCoupling coupling(grid, kExp1, 123);
  // Thresholds vanish at the origin, so the sample is Var(w) exactly.
  CHECK(influence_of_vertex(kExp1, coupling, grid.origin(), 0.7) ==
        doctest::Approx(1.0));
  CHECK(influence_of_vertex(kExp1, coupling, grid.target(), 0.2) ==
        doctest::Approx(1.0));
}

TEST_CASE("influence samples are nonnegative at t=0") {
  const Grid grid(3, 2);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const DynamicCoupling coupling(grid, kExp1, s);
    for (VertexIndex v = 0; v < grid.vertex_count(); v += 3) {
      // t=0 samples are conditional variances Var((w-k)_+ | F_v).
      CHECK(influence_of_vertex(kExp1, coupling, v, 0.0) >= -1e-12);
    }
  }
}

TEST_CASE("closed-form influence matches the definition-level oracle") {
  // Definition: Inf_v(t) = E[ int D_v^x T_0 D_v^x T_t dF(x) ].  The oracle
  // estimates the inner integral by Monte Carlo over x with full passage
  // recomputation, the implementation by truncated moments; both average
  // over the same couplings, so the difference is a paired statistic.
  const Grid grid(2, 2);
  const VertexIndex v = grid.index_of({1, 1});
  const double t = 0.4;
  const std::uint64_t outer = 4000;
  const int inner = 400;

  MomentAccumulator delta;
  Configuration cfg0, cfgt;
  for (std::uint64_t rep = 0; rep < outer; ++rep) {
    const std::uint64_t rep_seed = rng::derive_seed(2026, rep);
    const DynamicCoupling coupling(grid, kExp1, rep_seed);
    const double closed = influence_of_vertex(kExp1, coupling, v, t);

    coupling.configuration_at(0.0, cfg0);
    coupling.configuration_at(t, cfgt);
    rng::Stream draws(rep_seed, 99, rng::Tag::oracle);
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (int m = 0; m < inner; ++m) {
      const double x = kExp1.sample(draws);
      cfg0.weights[v] = x;
      cfgt.weights[v] = x;
      const double a = passage_value(cfg0);
      const double b = passage_value(cfgt);
      sa += a;
      sb += b;
      sab += a * b;
    }
    // Unbiased sample covariance over the inner draws.
    const double cov = (sab - sa * sb / inner) / (inner - 1);
    delta.add(closed - cov);
  }
  CHECK(std::abs(delta.mean()) <= 3.0 * delta.se_mean());
}

TEST_CASE("total influence: zero-variance law contributes nothing") {
  const Grid grid(3, 2);
  const auto konst = WeightDistribution::constant(2.0);
  const auto est = total_influence(grid, konst, 0.5, 200, 16, 3);
  CHECK(est.estimate == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("total influence: subsampling is unbiased") {
  const Grid grid(4, 2);
  const auto full = total_influence(grid, kExp1, 0.3, 4000, 25, 11);
  const auto sub = total_influence(grid, kExp1, 0.3, 4000, 6, 12);
  CHECK(sub.vertex_sample == 6);
  CHECK(full.vertex_sample == 25);
  const double sigma = std::hypot(full.std_error, sub.std_error);
  CHECK(std::abs(full.estimate - sub.estimate) <= 3.0 * sigma);
  // Co-influences are nonnegative.
  CHECK(full.estimate >= -3.0 * full.std_error);
}

TEST_CASE("derivative identity at moderate replicates") {
  const Grid grid(4, 2);
  const auto report =
      verify_derivative_identity(grid, kExp1, 0.2, 0.05, 20000, 64, 5);
  CHECK(report.ok);
  CHECK(report.finite_difference > 0.0);  // Q_t strictly decreasing
  CHECK(report.influence > 0.0);
  CHECK_THROWS_AS(
      verify_derivative_identity(grid, kExp1, 0.02, 0.05, 500, 64, 5),
      std::invalid_argument);
}

TEST_CASE("covariance formula on a small grid") {
  const Grid grid(3, 2);
  const auto report =
      verify_covariance_formula(grid, kExp1, linspace01(11), 20000, 64, 21);
  CHECK(report.formula_ok);
  CHECK(report.upper_bound_ok);
  CHECK(report.integral > 0.0);
  CHECK(report.variance > 0.0);
  // The estimated influence curve decays.
  CHECK(report.influence.front() > report.influence.back());

  CHECK_THROWS_AS(
      verify_covariance_formula(grid, kExp1, {0.0, 0.5, 1.0}, 500, 64, 1),
      std::invalid_argument);
  auto bad = linspace01(11);
  bad.back() = 0.9;
  CHECK_THROWS_AS(verify_covariance_formula(grid, kExp1, bad, 500, 64, 1),
                  std::invalid_argument);
}

TEST_CASE("lemma bounds hold for the exponential law") {
  const Grid grid(3, 2);
  for (double t : {0.0, 0.5, 1.0}) {
    const auto report = verify_lemma_bounds(grid, kExp1, t, 10000, 17);
    CAPTURE(t);
    CHECK(report.c_hat == doctest::Approx(1.0));
    CHECK(report.all_ok);
    for (const auto& row : report.rows) {
      if (row.vertex == grid.origin()) {
        // Thresholds are zero at the origin: influence is Var(w) = 1 and
        // the vertex lies on every geodesic.
        CHECK(row.influence0 == doctest::Approx(1.0));
        CHECK(row.overlap_prob == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("lemma bounds refuse laws failing the variance floor") {
  const Grid grid(3, 2);
  CHECK_THROWS_AS(
      verify_lemma_bounds(grid, WeightDistribution::uniform01(), 0.3, 1000, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      verify_lemma_bounds(grid, WeightDistribution::constant(1.0), 0.3, 1000, 1),
      std::invalid_argument);
}

TEST_CASE("stability bound and reconciliation") {
  const Grid grid(4, 2);
  const auto at0 = verify_stability_bound(grid, kExp1, 0.0, 2000, 4);
  CHECK(at0.l2 == 0.0);
  CHECK(at0.l2_bound_ok);
  CHECK(at0.majorant_ok);
  CHECK(at0.reconciliation_ok);

  for (double t : {0.1, 0.6}) {
    const auto report = verify_stability_bound(grid, kExp1, t, 10000, 4);
    CAPTURE(t);
    CHECK(report.l2_bound_ok);
    CHECK(report.majorant_ok);
    CHECK(report.reconciliation_ok);
    CHECK(report.l2 > 0.0);
    CHECK(report.geodesic_weight_sq <= report.squared_weight_passage + 1e-9);
  }
}

TEST_CASE("monotone decay of the paired quantities") {
  const Grid grid(3, 2);
  const auto report =
      monotonicity_suite(grid, kExp1, linspace01(11), 20000, 8, 33);
  CHECK(report.q_ok);
  CHECK(report.corr_ok);
  CHECK(report.overlap_ok);
  CHECK(report.influence_ok);
  CHECK(report.q.front() > report.q.back());  // Q_0 - Q_1 = Var > 0
  CHECK(report.corr.front() == 1.0);
  CHECK(report.overlap.front() > report.overlap.back());
}
