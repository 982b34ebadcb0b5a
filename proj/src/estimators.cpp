#include "lpp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpp/lpp_core.hpp"

namespace lpp {

namespace {

constexpr double kExactSlack = 1e-12;  // slack for exactly-tight bounds

void require_time(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("time t must lie in [0,1]");
}

void require_replicates(std::uint64_t replicates) {
  if (replicates < 100)
    throw std::invalid_argument("replicates must be >= 100");
}

double influence_sample(const WeightDistribution& dist, double k0, double kt) {
  return dist.truncated_cross_moment(k0, kt) -
         dist.truncated_mean(k0) * dist.truncated_mean(kt);
}

// Uniform random m-subset of [0, count), deterministic in the stream.
void sample_vertex_subset(rng::Stream& stream, std::uint32_t m,
                          std::uint64_t count,
                          std::vector<VertexIndex>& out) {
  out.resize(count);
  std::iota(out.begin(), out.end(), VertexIndex{0});
  if (m >= count) return;
  for (std::uint32_t i = 0; i < m; ++i) {
    const std::uint64_t span = count - i;
    const std::uint64_t j =
        i + std::min<std::uint64_t>(
                span - 1, static_cast<std::uint64_t>(stream.next_u01() *
                                                     static_cast<double>(span)));
    std::swap(out[i], out[j]);
  }
  out.resize(m);
}

std::vector<VertexIndex> fixed_vertex_subset(std::uint64_t seed,
                                             std::uint32_t m,
                                             std::uint64_t count) {
  rng::Stream stream(seed, 0, rng::Tag::vertex_sample);
  std::vector<VertexIndex> subset;
  sample_vertex_subset(stream, m, count, subset);
  std::sort(subset.begin(), subset.end());
  return subset;
}

std::uint32_t count_overlap(const std::vector<std::uint8_t>& a,
                            const std::vector<std::uint8_t>& b) {
  std::uint32_t overlap = 0;
  for (size_t i = 0; i < a.size(); ++i) overlap += (a[i] & b[i]);
  return overlap;
}

struct PairWorkspace {
  Configuration cfg0, cfgt;
  PassageResult res0, rest;
  SweepWorkspace sweep;
  std::vector<VertexIndex> subset;
  std::vector<double> k0;
};

EstimatorReport make_report(std::string quantity, double estimate, double se,
                            std::uint64_t replicates, double t,
                            const Grid& grid, const WeightDistribution& dist,
                            std::uint64_t seed) {
  EstimatorReport r;
  r.quantity = std::move(quantity);
  r.estimate = estimate;
  r.std_error = se;
  r.replicates = replicates;
  r.t = t;
  r.n = grid.side();
  r.d = grid.dim();
  r.dist = dist.spec();
  r.seed = seed;
  return r;
}

}  // namespace

PassageStats estimate_passage_stats(const Grid& grid,
                                    const WeightDistribution& dist, double t,
                                    std::uint64_t replicates,
                                    std::uint64_t seed,
                                    const ParallelOptions& par) {
  require_time(t);
  require_replicates(replicates);

  struct Acc {
    MomentAccumulator t0, tt, prod, d2, ovl;
    BivariateAccumulator bi;
    void merge(const Acc& o) {
      t0.merge(o.t0);
      tt.merge(o.tt);
      prod.merge(o.prod);
      d2.merge(o.d2);
      ovl.merge(o.ovl);
      bi.merge(o.bi);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        static thread_local PairWorkspace ws;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const double t0 = ws.res0.time;
        double tt = t0;
        std::uint32_t overlap = ws.res0.geodesic_count;
        if (t > 0.0) {
          coupling.configuration_at(t, ws.cfgt);
          passage_time_into(ws.cfgt, ws.rest);
          tt = ws.rest.time;
          overlap = count_overlap(ws.res0.in_geodesic, ws.rest.in_geodesic);
        }
        acc.t0.add(t0);
        acc.tt.add(tt);
        acc.prod.add(t0 * tt);
        acc.d2.add((t0 - tt) * (t0 - tt));
        acc.ovl.add(static_cast<double>(overlap));
        acc.bi.add(t0, tt);
      },
      par);

  PassageStats out;
  out.q_t = make_report("Q_t", total.prod.mean(), total.prod.se_mean(),
                        replicates, t, grid, dist, seed);
  const double corr = t == 0.0 ? 1.0 : total.bi.correlation();
  const double corr_se = t == 0.0 ? 0.0 : total.bi.se_correlation();
  out.corr = make_report("Corr(T0,Tt)", corr, corr_se, replicates, t, grid,
                         dist, seed);
  out.l2 = make_report("E[(T0-Tt)^2]", total.d2.mean(), total.d2.se_mean(),
                       replicates, t, grid, dist, seed);
  out.overlap = make_report("E[|pi0^pit|]", total.ovl.mean(),
                            total.ovl.se_mean(), replicates, t, grid, dist,
                            seed);
  out.var_t0 = make_report("Var(T0)", total.t0.variance(),
                           total.t0.se_variance(), replicates, t, grid, dist,
                           seed);
  out.covariance = total.bi.covariance();
  out.covariance_se = total.bi.se_covariance();
  out.var_tt = total.tt.variance();
  out.var_tt_se = total.tt.se_variance();
  out.mean_t0 = total.t0.mean();
  return out;
}

VarianceEstimate estimate_variance(const Grid& grid,
                                   const WeightDistribution& dist,
                                   std::uint64_t replicates,
                                   std::uint64_t seed,
                                   const ParallelOptions& par) {
  require_replicates(replicates);
  const MomentAccumulator total = run_replicates<MomentAccumulator>(
      replicates,
      [&](std::uint64_t rep, MomentAccumulator& acc) {
        static thread_local Configuration cfg;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        cfg.grid = &grid;
        cfg.integer_valued = dist.integer_valued();
        cfg.weights.resize(grid.vertex_count());
        for (std::uint64_t v = 0; v < grid.vertex_count(); ++v) {
          rng::Stream stream(rep_seed, v, rng::Tag::base_weights);
          cfg.weights[v] = dist.sample(stream);
        }
        acc.add(passage_value(cfg));
      },
      par);

  VarianceEstimate out;
  out.variance = total.variance();
  out.variance_se = total.se_variance();
  out.mean = total.mean();
  out.mean_se = total.se_mean();
  out.replicates = replicates;
  out.seed = seed;
  return out;
}

double influence_of_vertex(const WeightDistribution& dist,
                           const DynamicCoupling& coupling, VertexIndex v,
                           double t) {
  require_time(t);
  const Configuration cfg0 = coupling.configuration_at(0.0);
  const PassageResult res0 = passage_time(cfg0);
  const double k0 = threshold_weight(cfg0, res0, v);
  double kt = k0;
  if (t > 0.0) {
    const Configuration cfgt = coupling.configuration_at(t);
    const PassageResult rest = passage_time(cfgt);
    kt = threshold_weight(cfgt, rest, v);
  }
  return influence_sample(dist, k0, kt);
}

InfluenceEstimate total_influence(const Grid& grid,
                                  const WeightDistribution& dist, double t,
                                  std::uint64_t replicates,
                                  std::uint32_t vertex_sample,
                                  std::uint64_t seed,
                                  const ParallelOptions& par) {
  require_time(t);
  require_replicates(replicates);
  if (vertex_sample == 0)
    throw std::invalid_argument("total_influence: vertex_sample must be >= 1");
  const std::uint64_t count = grid.vertex_count();
  const std::uint32_t m =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(vertex_sample, count));
  const double scale = static_cast<double>(count) / m;

  const MomentAccumulator total = run_replicates<MomentAccumulator>(
      replicates,
      [&](std::uint64_t rep, MomentAccumulator& acc) {
        static thread_local PairWorkspace ws;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const bool moved = t > 0.0;
        if (moved) {
          coupling.configuration_at(t, ws.cfgt);
          passage_time_into(ws.cfgt, ws.rest);
        }
        rng::Stream subset_stream(rep_seed, 1, rng::Tag::vertex_sample);
        sample_vertex_subset(subset_stream, m, count, ws.subset);
        double sum = 0.0;
        for (VertexIndex v : ws.subset) {
          const double k0 = threshold_weight(ws.cfg0, ws.res0, v, ws.sweep);
          const double kt =
              moved ? threshold_weight(ws.cfgt, ws.rest, v, ws.sweep) : k0;
          sum += influence_sample(dist, k0, kt);
        }
        acc.add(scale * sum);
      },
      par);

  InfluenceEstimate out;
  out.vertex = "sum";
  out.t = t;
  out.estimate = total.mean();
  out.std_error = total.se_mean();
  out.vertex_sample = m;
  out.replicates = replicates;
  return out;
}

CovarianceFormulaReport verify_covariance_formula(
    const Grid& grid, const WeightDistribution& dist,
    const std::vector<double>& time_grid, std::uint64_t replicates,
    std::uint32_t vertex_sample, std::uint64_t seed,
    const ParallelOptions& par) {
  require_replicates(replicates);
  if (time_grid.size() < 11)
    throw std::invalid_argument("time grid needs >= 11 points");
  if (!std::is_sorted(time_grid.begin(), time_grid.end()) ||
      time_grid.front() != 0.0 || time_grid.back() != 1.0)
    throw std::invalid_argument("time grid must cover [0,1] in order");

  const size_t g = time_grid.size();
  const std::uint64_t count = grid.vertex_count();
  const std::uint32_t m =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(vertex_sample, count));
  const double scale = static_cast<double>(count) / m;

  struct Acc {
    std::vector<MomentAccumulator> infl;
    MomentAccumulator trapz, t0;
    void merge(const Acc& o) {
      if (infl.empty()) infl.resize(o.infl.size());
      for (size_t i = 0; i < o.infl.size(); ++i) infl[i].merge(o.infl[i]);
      trapz.merge(o.trapz);
      t0.merge(o.t0);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        if (acc.infl.empty()) acc.infl.resize(g);
        static thread_local PairWorkspace ws;
        static thread_local std::vector<double> curve;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        acc.t0.add(ws.res0.time);
        rng::Stream subset_stream(rep_seed, 1, rng::Tag::vertex_sample);
        sample_vertex_subset(subset_stream, m, count, ws.subset);
        ws.k0.resize(m);
        for (std::uint32_t i = 0; i < m; ++i)
          ws.k0[i] =
              threshold_weight(ws.cfg0, ws.res0, ws.subset[i], ws.sweep);
        curve.assign(g, 0.0);
        for (size_t gi = 0; gi < g; ++gi) {
          const double t = time_grid[gi];
          double sum = 0.0;
          if (t == 0.0) {
            for (std::uint32_t i = 0; i < m; ++i)
              sum += influence_sample(dist, ws.k0[i], ws.k0[i]);
          } else {
            coupling.configuration_at(t, ws.cfgt);
            passage_time_into(ws.cfgt, ws.rest);
            for (std::uint32_t i = 0; i < m; ++i) {
              const double kt =
                  threshold_weight(ws.cfgt, ws.rest, ws.subset[i], ws.sweep);
              sum += influence_sample(dist, ws.k0[i], kt);
            }
          }
          curve[gi] = scale * sum;
          acc.infl[gi].add(curve[gi]);
        }
        double trap = 0.0;
        for (size_t gi = 0; gi + 1 < g; ++gi)
          trap += 0.5 * (curve[gi] + curve[gi + 1]) *
                  (time_grid[gi + 1] - time_grid[gi]);
        acc.trapz.add(trap);
      },
      par);

  CovarianceFormulaReport out;
  out.time_grid = time_grid;
  out.influence.resize(g);
  out.influence_se.resize(g);
  for (size_t i = 0; i < g; ++i) {
    out.influence[i] = total.infl[i].mean();
    out.influence_se[i] = total.infl[i].se_mean();
  }
  out.integral = total.trapz.mean();
  out.integral_se = total.trapz.se_mean();
  out.variance = total.t0.variance();
  out.variance_se = total.t0.se_variance();
  double bracket = 0.0;
  for (size_t i = 0; i + 1 < g; ++i)
    bracket += 0.5 * (out.influence[i] - out.influence[i + 1]) *
               (time_grid[i + 1] - time_grid[i]);
  out.bracket_bound = std::abs(bracket);
  out.discrepancy = std::abs(out.integral - out.variance);
  out.combined_se = std::hypot(out.integral_se, out.variance_se);
  out.formula_ok =
      out.discrepancy <= 3.0 * out.combined_se + out.bracket_bound + kExactSlack;
  out.upper_bound_ok =
      out.influence[0] >=
      out.variance - 3.0 * std::hypot(out.influence_se[0], out.variance_se) -
          kExactSlack;
  out.replicates = replicates;
  out.vertex_sample = m;
  return out;
}

DerivativeCheckReport verify_derivative_identity(
    const Grid& grid, const WeightDistribution& dist, double t, double h,
    std::uint64_t replicates, std::uint32_t vertex_sample, std::uint64_t seed,
    const ParallelOptions& par) {
  require_replicates(replicates);
  if (!(h > 0.0) || !(t - h >= 0.0) || !(t + h <= 1.0))
    throw std::invalid_argument("finite difference stencil outside [0,1]");
  const std::uint64_t count = grid.vertex_count();
  const std::uint32_t m =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(vertex_sample, count));
  const double scale = static_cast<double>(count) / m;

  struct Acc {
    MomentAccumulator fd, inf, delta;
    void merge(const Acc& o) {
      fd.merge(o.fd);
      inf.merge(o.inf);
      delta.merge(o.delta);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        static thread_local PairWorkspace ws;
        static thread_local Configuration side;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const double t0 = ws.res0.time;
        coupling.configuration_at(t - h, side);
        const double t_minus = passage_value(side);
        coupling.configuration_at(t + h, side);
        const double t_plus = passage_value(side);
        const double fd = -t0 * (t_plus - t_minus) / (2.0 * h);

        coupling.configuration_at(t, ws.cfgt);
        passage_time_into(ws.cfgt, ws.rest);
        rng::Stream subset_stream(rep_seed, 1, rng::Tag::vertex_sample);
        sample_vertex_subset(subset_stream, m, count, ws.subset);
        double sum = 0.0;
        for (VertexIndex v : ws.subset) {
          const double k0 = threshold_weight(ws.cfg0, ws.res0, v, ws.sweep);
          const double kt = threshold_weight(ws.cfgt, ws.rest, v, ws.sweep);
          sum += influence_sample(dist, k0, kt);
        }
        const double inf = scale * sum;
        acc.fd.add(fd);
        acc.inf.add(inf);
        acc.delta.add(fd - inf);
      },
      par);

  DerivativeCheckReport out;
  out.t = t;
  out.h = h;
  out.finite_difference = total.fd.mean();
  out.finite_difference_se = total.fd.se_mean();
  out.influence = total.inf.mean();
  out.influence_se = total.inf.se_mean();
  out.delta = total.delta.mean();
  out.delta_se = total.delta.se_mean();
  out.ok = std::abs(out.delta) <= 3.0 * out.delta_se + kExactSlack;
  out.replicates = replicates;
  return out;
}

LemmaBoundsReport verify_lemma_bounds(const Grid& grid,
                                      const WeightDistribution& dist, double t,
                                      std::uint64_t replicates,
                                      std::uint64_t seed,
                                      std::uint32_t vertex_sample,
                                      const ParallelOptions& par) {
  require_time(t);
  require_replicates(replicates);
  const auto floor_check = dist.conditional_variance_floor();
  if (!floor_check.satisfied)
    throw std::invalid_argument(
        "distribution " + dist.spec() +
        " fails the conditional-variance condition: floor " +
        std::to_string(floor_check.floor) + " at k=" +
        std::to_string(floor_check.worst_k));
  const double c_hat = floor_check.floor;

  const std::uint64_t count = grid.vertex_count();
  const std::uint32_t m =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(vertex_sample, count));
  const std::vector<VertexIndex> subset = fixed_vertex_subset(seed, m, count);

  struct VertexAcc {
    MomentAccumulator inf0, inft, wsq, pp, upper, lower;
    void merge(const VertexAcc& o) {
      inf0.merge(o.inf0);
      inft.merge(o.inft);
      wsq.merge(o.wsq);
      pp.merge(o.pp);
      upper.merge(o.upper);
      lower.merge(o.lower);
    }
  };
  struct Acc {
    std::vector<VertexAcc> per_vertex;
    void merge(const Acc& o) {
      if (per_vertex.empty()) per_vertex.resize(o.per_vertex.size());
      for (size_t i = 0; i < o.per_vertex.size(); ++i)
        per_vertex[i].merge(o.per_vertex[i]);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        if (acc.per_vertex.empty()) acc.per_vertex.resize(subset.size());
        static thread_local PairWorkspace ws;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const bool moved = t > 0.0;
        if (moved) {
          coupling.configuration_at(t, ws.cfgt);
          passage_time_into(ws.cfgt, ws.rest);
        }
        for (size_t i = 0; i < subset.size(); ++i) {
          const VertexIndex v = subset[i];
          const double k0 = threshold_weight(ws.cfg0, ws.res0, v, ws.sweep);
          const double kt =
              moved ? threshold_weight(ws.cfgt, ws.rest, v, ws.sweep) : k0;
          const double inf0 = influence_sample(dist, k0, k0);
          const double inft = influence_sample(dist, k0, kt);
          const double w0 = ws.cfg0.weights[v];
          const bool on0 = ws.res0.in_geodesic[v] != 0;
          const bool ont = moved ? ws.rest.in_geodesic[v] != 0 : on0;
          const double wsq = on0 ? w0 * w0 : 0.0;
          const double pp = (on0 && ont) ? 1.0 : 0.0;
          VertexAcc& va = acc.per_vertex[i];
          va.inf0.add(inf0);
          va.inft.add(inft);
          va.wsq.add(wsq);
          va.pp.add(pp);
          va.upper.add(wsq - inf0);
          va.lower.add(inft - c_hat * pp);
        }
      },
      par);

  LemmaBoundsReport out;
  out.t = t;
  out.c_hat = c_hat;
  out.replicates = replicates;
  out.all_ok = true;
  out.rows.resize(subset.size());
  for (size_t i = 0; i < subset.size(); ++i) {
    const VertexAcc& va = total.per_vertex[i];
    auto& row = out.rows[i];
    row.vertex = subset[i];
    row.influence0 = va.inf0.mean();
    row.influence0_se = va.inf0.se_mean();
    row.influence_t = va.inft.mean();
    row.influence_t_se = va.inft.se_mean();
    row.weight_sq_on_geodesic = va.wsq.mean();
    row.weight_sq_se = va.wsq.se_mean();
    row.overlap_prob = va.pp.mean();
    row.overlap_prob_se = va.pp.se_mean();
    row.upper_margin = va.upper.mean();
    row.upper_margin_se = va.upper.se_mean();
    row.lower_margin = va.lower.mean();
    row.lower_margin_se = va.lower.se_mean();
    row.upper_ok =
        row.upper_margin >= -3.0 * row.upper_margin_se - kExactSlack;
    row.lower_ok =
        row.lower_margin >= -3.0 * row.lower_margin_se - kExactSlack;
    out.all_ok = out.all_ok && row.upper_ok && row.lower_ok;
  }
  return out;
}

StabilityBoundReport verify_stability_bound(const Grid& grid,
                                            const WeightDistribution& dist,
                                            double t, std::uint64_t replicates,
                                            std::uint64_t seed,
                                            const ParallelOptions& par) {
  require_time(t);
  require_replicates(replicates);

  struct Acc {
    MomentAccumulator l2, gsq, tsq, bound, majorant, t0;
    BivariateAccumulator bi;
    void merge(const Acc& o) {
      l2.merge(o.l2);
      gsq.merge(o.gsq);
      tsq.merge(o.tsq);
      bound.merge(o.bound);
      majorant.merge(o.majorant);
      t0.merge(o.t0);
      bi.merge(o.bi);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        static thread_local PairWorkspace ws;
        static thread_local Configuration squared;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const double t0 = ws.res0.time;
        double tt = t0;
        if (t > 0.0) {
          coupling.configuration_at(t, ws.cfgt);
          tt = passage_value(ws.cfgt);
        }
        const double d2 = (t0 - tt) * (t0 - tt);
        double gsq = 0.0;
        const std::uint64_t count = grid.vertex_count();
        for (std::uint64_t v = 0; v < count; ++v) {
          if (ws.res0.in_geodesic[v]) {
            const double w = ws.cfg0.weights[v];
            gsq += w * w;
          }
        }
        squared.grid = &grid;
        squared.integer_valued = ws.cfg0.integer_valued;
        squared.weights.resize(count);
        for (std::uint64_t v = 0; v < count; ++v) {
          const double w = ws.cfg0.weights[v];
          squared.weights[v] = w * w;
        }
        const double tsq = passage_value(squared);
        acc.l2.add(d2);
        acc.gsq.add(gsq);
        acc.tsq.add(tsq);
        acc.bound.add(2.0 * t * gsq - d2);
        acc.majorant.add(tsq - gsq);
        acc.t0.add(t0);
        acc.bi.add(t0, tt);
      },
      par);

  StabilityBoundReport out;
  out.t = t;
  out.l2 = total.l2.mean();
  out.l2_se = total.l2.se_mean();
  out.geodesic_weight_sq = total.gsq.mean();
  out.geodesic_weight_sq_se = total.gsq.se_mean();
  out.squared_weight_passage = total.tsq.mean();
  out.squared_weight_passage_se = total.tsq.se_mean();
  out.bound_margin = total.bound.mean();
  out.bound_margin_se = total.bound.se_mean();
  out.majorant_margin = total.majorant.mean();
  out.majorant_margin_se = total.majorant.se_mean();
  out.covariance = total.bi.covariance();
  out.covariance_se = total.bi.se_covariance();
  out.variance0 = total.t0.variance();
  out.variance0_se = total.t0.se_variance();
  out.reconciliation_gap =
      out.covariance - (out.variance0 - 0.5 * out.l2);
  out.reconciliation_se = std::sqrt(out.covariance_se * out.covariance_se +
                                    out.variance0_se * out.variance0_se +
                                    0.25 * out.l2_se * out.l2_se);
  out.l2_bound_ok = out.bound_margin >= -3.0 * out.bound_margin_se - kExactSlack;
  out.majorant_applicable = dist.continuous();
  out.majorant_ok =
      !out.majorant_applicable ||
      out.majorant_margin >= -3.0 * out.majorant_margin_se - kExactSlack;
  out.reconciliation_ok =
      std::abs(out.reconciliation_gap) <=
      4.0 * out.reconciliation_se + kExactSlack;
  out.replicates = replicates;
  return out;
}

MonotonicityReport monotonicity_suite(const Grid& grid,
                                      const WeightDistribution& dist,
                                      const std::vector<double>& time_grid,
                                      std::uint64_t replicates,
                                      std::uint32_t vertex_sample,
                                      std::uint64_t seed,
                                      const ParallelOptions& par) {
  require_replicates(replicates);
  if (time_grid.size() < 2 ||
      !std::is_sorted(time_grid.begin(), time_grid.end()) ||
      time_grid.front() < 0.0 || time_grid.back() > 1.0)
    throw std::invalid_argument("monotonicity: bad time grid");

  const size_t g = time_grid.size();
  const std::uint64_t count = grid.vertex_count();
  const std::uint32_t m =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(vertex_sample, count));
  const std::vector<VertexIndex> subset = fixed_vertex_subset(seed, m, count);

  struct Acc {
    std::vector<BivariateAccumulator> bi;          // (T0, T_ti)
    std::vector<MomentAccumulator> qm;             // T0*T_ti
    std::vector<MomentAccumulator> ovl;            // overlap at ti
    std::vector<MomentAccumulator> dq, dovl;       // successive deltas
    std::vector<MomentAccumulator> infl, dinf;     // per (vertex, ti) flat
    void init(size_t g, size_t m) {
      bi.resize(g);
      qm.resize(g);
      ovl.resize(g);
      dq.resize(g - 1);
      dovl.resize(g - 1);
      infl.resize(m * g);
      dinf.resize(m * (g - 1));
    }
    void merge(const Acc& o) {
      if (bi.empty() && !o.bi.empty()) {
        bi.resize(o.bi.size());
        qm.resize(o.qm.size());
        ovl.resize(o.ovl.size());
        dq.resize(o.dq.size());
        dovl.resize(o.dovl.size());
        infl.resize(o.infl.size());
        dinf.resize(o.dinf.size());
      }
      for (size_t i = 0; i < o.bi.size(); ++i) bi[i].merge(o.bi[i]);
      for (size_t i = 0; i < o.qm.size(); ++i) qm[i].merge(o.qm[i]);
      for (size_t i = 0; i < o.ovl.size(); ++i) ovl[i].merge(o.ovl[i]);
      for (size_t i = 0; i < o.dq.size(); ++i) dq[i].merge(o.dq[i]);
      for (size_t i = 0; i < o.dovl.size(); ++i) dovl[i].merge(o.dovl[i]);
      for (size_t i = 0; i < o.infl.size(); ++i) infl[i].merge(o.infl[i]);
      for (size_t i = 0; i < o.dinf.size(); ++i) dinf[i].merge(o.dinf[i]);
    }
  };

  const Acc total = run_replicates<Acc>(
      replicates,
      [&](std::uint64_t rep, Acc& acc) {
        if (acc.bi.empty()) acc.init(g, subset.size());
        static thread_local PairWorkspace ws;
        static thread_local std::vector<double> prods, ovls, infs;
        const std::uint64_t rep_seed = rng::derive_seed(seed, rep);
        const DynamicCoupling coupling(grid, dist, rep_seed);
        coupling.configuration_at(0.0, ws.cfg0);
        passage_time_into(ws.cfg0, ws.res0);
        const double t0 = ws.res0.time;
        ws.k0.resize(subset.size());
        for (size_t i = 0; i < subset.size(); ++i)
          ws.k0[i] = threshold_weight(ws.cfg0, ws.res0, subset[i], ws.sweep);

        prods.assign(g, 0.0);
        ovls.assign(g, 0.0);
        infs.assign(subset.size() * g, 0.0);
        for (size_t gi = 0; gi < g; ++gi) {
          const double t = time_grid[gi];
          const Configuration* cfg = &ws.cfg0;
          const PassageResult* res = &ws.res0;
          if (t > 0.0) {
            coupling.configuration_at(t, ws.cfgt);
            passage_time_into(ws.cfgt, ws.rest);
            cfg = &ws.cfgt;
            res = &ws.rest;
          }
          const double tt = res->time;
          const std::uint32_t overlap =
              t > 0.0 ? count_overlap(ws.res0.in_geodesic, res->in_geodesic)
                      : ws.res0.geodesic_count;
          prods[gi] = t0 * tt;
          ovls[gi] = static_cast<double>(overlap);
          acc.bi[gi].add(t0, tt);
          acc.qm[gi].add(prods[gi]);
          acc.ovl[gi].add(ovls[gi]);
          for (size_t i = 0; i < subset.size(); ++i) {
            const double kt =
                t > 0.0 ? threshold_weight(*cfg, *res, subset[i], ws.sweep)
                        : ws.k0[i];
            const double s = influence_sample(dist, ws.k0[i], kt);
            infs[i * g + gi] = s;
            acc.infl[i * g + gi].add(s);
          }
        }
        for (size_t gi = 0; gi + 1 < g; ++gi) {
          acc.dq[gi].add(prods[gi] - prods[gi + 1]);
          acc.dovl[gi].add(ovls[gi] - ovls[gi + 1]);
          for (size_t i = 0; i < subset.size(); ++i)
            acc.dinf[i * (g - 1) + gi].add(infs[i * g + gi] -
                                           infs[i * g + gi + 1]);
        }
      },
      par);

  MonotonicityReport out;
  out.time_grid = time_grid;
  out.replicates = replicates;
  out.vertices = subset;
  out.q.resize(g);
  out.q_se.resize(g);
  out.corr.resize(g);
  out.corr_se.resize(g);
  out.overlap.resize(g);
  out.overlap_se.resize(g);
  for (size_t i = 0; i < g; ++i) {
    out.q[i] = total.qm[i].mean();
    out.q_se[i] = total.qm[i].se_mean();
    out.corr[i] = time_grid[i] == 0.0 ? 1.0 : total.bi[i].correlation();
    out.corr_se[i] = time_grid[i] == 0.0 ? 0.0 : total.bi[i].se_correlation();
    out.overlap[i] = total.ovl[i].mean();
    out.overlap_se[i] = total.ovl[i].se_mean();
  }
  out.influence.assign(subset.size(), std::vector<double>(g));
  out.influence_se.assign(subset.size(), std::vector<double>(g));
  for (size_t i = 0; i < subset.size(); ++i) {
    for (size_t gi = 0; gi < g; ++gi) {
      out.influence[i][gi] = total.infl[i * g + gi].mean();
      out.influence_se[i][gi] = total.infl[i * g + gi].se_mean();
    }
  }

  double worst = -std::numeric_limits<double>::infinity();
  auto check_deltas = [&](const std::vector<MomentAccumulator>& deltas) {
    bool ok = true;
    for (const auto& acc : deltas) {
      const double se = acc.se_mean();
      const double margin = se > 0.0 ? -acc.mean() / se
                                     : (acc.mean() < 0.0 ? 1e9 : -1e9);
      // margin > 0 means an observed increase, in sigma units
      if (acc.mean() < -2.0 * se - kExactSlack) ok = false;
      if (se > 0.0) worst = std::max(worst, margin);
    }
    return ok;
  };
  out.q_ok = check_deltas(total.dq);
  out.overlap_ok = check_deltas(total.dovl);
  out.influence_ok = check_deltas(total.dinf);
  out.corr_ok = true;
  for (size_t i = 0; i + 1 < g; ++i) {
    const double a = out.corr[i];
    const double b = out.corr[i + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    const double se = std::hypot(out.corr_se[i], out.corr_se[i + 1]);
    if (b > a + 2.0 * se + kExactSlack) out.corr_ok = false;
    if (se > 0.0) worst = std::max(worst, (b - a) / se);
  }
  out.worst_margin = worst;
  return out;
}

}  // namespace lpp
