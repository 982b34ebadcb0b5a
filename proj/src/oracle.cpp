#include "lpp/oracle.hpp"

#include <algorithm>

namespace lpp::oracle {

BruteForce evaluate(const Configuration& config, double tie_tolerance,
                    std::uint64_t cap) {
  const Grid& grid = *config.grid;
  const std::uint64_t count = grid.vertex_count();
  const std::vector<double>& w = config.weights;

  BruteForce out;
  out.avoid.assign(count, std::nullopt);
  out.through_other.assign(count, 0.0);
  out.in_geodesic.assign(count, 0);
  std::vector<std::uint8_t> on_path(count, 0);
  std::vector<std::uint8_t> through_seen(count, 0);

  double best = 0.0;
  bool any = false;
  PathEnumerator paths(grid, cap);
  while (const auto* path = paths.next()) {
    double sum = 0.0;
    for (VertexIndex v : *path) {
      sum += w[v];
      on_path[v] = 1;
    }
    if (!any || sum > best) best = sum;
    any = true;
    for (std::uint64_t v = 0; v < count; ++v) {
      if (on_path[v]) {
        const double other = sum - w[v];
        if (!through_seen[v] || other > out.through_other[v]) {
          out.through_other[v] = other;
          through_seen[v] = 1;
        }
      } else {
        if (!out.avoid[v] || sum > *out.avoid[v]) out.avoid[v] = sum;
      }
    }
    for (VertexIndex v : *path) on_path[v] = 0;
  }
  out.time = best;

  PathEnumerator second(grid, cap);
  while (const auto* path = second.next()) {
    double sum = 0.0;
    for (VertexIndex v : *path) sum += w[v];
    if (sum >= best - tie_tolerance) {
      for (VertexIndex v : *path) out.in_geodesic[v] = 1;
    }
  }
  return out;
}

double resampled(const Configuration& config, VertexIndex v, double x,
                 std::uint64_t cap) {
  const Grid& grid = *config.grid;
  const std::vector<double>& w = config.weights;
  double best = 0.0;
  bool any = false;
  PathEnumerator paths(grid, cap);
  while (const auto* path = paths.next()) {
    double sum = 0.0;
    bool through = false;
    for (VertexIndex u : *path) {
      sum += w[u];
      through |= (u == v);
    }
    if (through) sum += x - w[v];
    if (!any || sum > best) best = sum;
    any = true;
  }
  return best;
}

double threshold(const BruteForce& brute, VertexIndex v) {
  if (!brute.avoid[v]) return 0.0;
  return std::max(0.0, *brute.avoid[v] - brute.through_other[v]);
}

}  // namespace lpp::oracle
