#include "lpp/lpp_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpp {

namespace {

void check(const Configuration& config) {
  if (config.grid == nullptr)
    throw std::invalid_argument("configuration: missing grid");
  if (config.weights.size() != config.grid->vertex_count())
    throw std::invalid_argument("configuration: weight field size mismatch");
}

}  // namespace

void passage_time_into(const Configuration& config, PassageResult& result,
                       const PassageOptions& options) {
  check(config);
  const Grid& grid = *config.grid;
  const std::uint64_t count = grid.vertex_count();
  const int d = grid.dim();
  const std::vector<double>& w = config.weights;

  result.forward.resize(count);
  result.backward.resize(count);
  result.in_geodesic.assign(count, 0);

  // Index order is a linear extension of the up-right partial order: every
  // in-neighbor v - e_i has a smaller index.
  double* fwd = result.forward.data();
  for (std::uint64_t v = 0; v < count; ++v) {
    double best = 0.0;
    bool has = false;
    std::uint64_t rest = v;
    for (int i = 0; i < d; ++i) {
      const std::uint64_t stride = grid.stride(i);
      const std::uint64_t digit = rest / stride;
      rest %= stride;
      if (digit > 0) {
        const double cand = fwd[v - stride];
        if (!has || cand > best) best = cand;
        has = true;
      }
    }
    fwd[v] = w[v] + best;
  }

  double* bwd = result.backward.data();
  const int n = grid.side();
  for (std::uint64_t v = count; v-- > 0;) {
    double best = 0.0;
    bool has = false;
    std::uint64_t rest = v;
    for (int i = 0; i < d; ++i) {
      const std::uint64_t stride = grid.stride(i);
      const std::uint64_t digit = rest / stride;
      rest %= stride;
      if (digit < static_cast<std::uint64_t>(n)) {
        const double cand = bwd[v + stride];
        if (!has || cand > best) best = cand;
        has = true;
      }
    }
    bwd[v] = w[v] + best;
  }

  result.time = fwd[count - 1];
  result.tie_tolerance =
      config.integer_valued
          ? 0.0
          : options.rel_tie_tolerance * std::abs(result.time);

  const double cutoff = result.time - result.tie_tolerance;
  std::uint32_t members = 0;
  for (std::uint64_t v = 0; v < count; ++v) {
    if (fwd[v] + bwd[v] - w[v] >= cutoff) {
      result.in_geodesic[v] = 1;
      ++members;
    }
  }
  result.geodesic_count = members;
}

PassageResult passage_time(const Configuration& config,
                           const PassageOptions& options) {
  PassageResult result;
  passage_time_into(config, result, options);
  return result;
}

double passage_value(const Configuration& config) {
  check(config);
  const Grid& grid = *config.grid;
  const std::uint64_t count = grid.vertex_count();
  const int d = grid.dim();
  const std::vector<double>& w = config.weights;

  static thread_local std::vector<double> fwd_buf;
  fwd_buf.resize(count);
  double* fwd = fwd_buf.data();
  for (std::uint64_t v = 0; v < count; ++v) {
    double best = 0.0;
    bool has = false;
    std::uint64_t rest = v;
    for (int i = 0; i < d; ++i) {
      const std::uint64_t stride = grid.stride(i);
      const std::uint64_t digit = rest / stride;
      rest %= stride;
      if (digit > 0) {
        const double cand = fwd[v - stride];
        if (!has || cand > best) best = cand;
        has = true;
      }
    }
    fwd[v] = w[v] + best;
  }
  return fwd[count - 1];
}

std::optional<double> avoid_passage_time(const Configuration& config,
                                         VertexIndex avoid,
                                         SweepWorkspace& workspace) {
  check(config);
  const Grid& grid = *config.grid;
  if (!grid.contains(avoid))
    throw std::out_of_range("avoid_passage_time: vertex outside cube");
  const std::uint64_t count = grid.vertex_count();
  const int d = grid.dim();
  const std::vector<double>& w = config.weights;

  workspace.value.resize(count);
  workspace.reachable.assign(count, 0);
  double* val = workspace.value.data();
  std::uint8_t* reach = workspace.reachable.data();

  for (std::uint64_t v = 0; v < count; ++v) {
    if (v == avoid) continue;  // excluded by reachability, not by sentinel
    double best = 0.0;
    bool has = false;
    if (v == 0) {
      has = true;
    } else {
      std::uint64_t rest = v;
      for (int i = 0; i < d; ++i) {
        const std::uint64_t stride = grid.stride(i);
        const std::uint64_t digit = rest / stride;
        rest %= stride;
        if (digit > 0) {
          const std::uint64_t u = v - stride;
          if (reach[u]) {
            const double cand = val[u];
            if (!has || cand > best) best = cand;
            has = true;
          }
        }
      }
    }
    if (has) {
      reach[v] = 1;
      val[v] = w[v] + best;
    }
  }
  if (!reach[count - 1]) return std::nullopt;
  return val[count - 1];
}

std::optional<double> avoid_passage_time(const Configuration& config,
                                         VertexIndex avoid) {
  SweepWorkspace workspace;
  return avoid_passage_time(config, avoid, workspace);
}

double through_weight_sum(const Configuration& config,
                          const PassageResult& base, VertexIndex v) {
  return base.forward[v] + base.backward[v] - 2.0 * config.weights[v];
}

double threshold_weight(const Configuration& config, const PassageResult& base,
                        VertexIndex v, SweepWorkspace& workspace) {
  const auto avoid = avoid_passage_time(config, v, workspace);
  if (!avoid) return 0.0;  // v lies on every path
  const double other = through_weight_sum(config, base, v);
  return std::max(0.0, *avoid - other);
}

double threshold_weight(const Configuration& config, const PassageResult& base,
                        VertexIndex v) {
  SweepWorkspace workspace;
  return threshold_weight(config, base, v, workspace);
}

double threshold_weight(const Configuration& config, VertexIndex v) {
  const PassageResult base = passage_time(config);
  return threshold_weight(config, base, v);
}

double resampled_passage_time(const Configuration& config,
                              const PassageResult& base, VertexIndex v,
                              double x, SweepWorkspace& workspace) {
  if (!(x >= 0.0))
    throw std::invalid_argument("resampled_passage_time: x must be >= 0");
  const double through = through_weight_sum(config, base, v) + x;
  const auto avoid = avoid_passage_time(config, v, workspace);
  if (!avoid) return through;
  return std::max(*avoid, through);
}

double resampled_passage_time(const Configuration& config,
                              const PassageResult& base, VertexIndex v,
                              double x) {
  SweepWorkspace workspace;
  return resampled_passage_time(config, base, v, x, workspace);
}

double resampled_passage_time(const Configuration& config, VertexIndex v,
                              double x) {
  const PassageResult base = passage_time(config);
  return resampled_passage_time(config, base, v, x);
}

}  // namespace lpp
