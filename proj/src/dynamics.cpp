#include "lpp/dynamics.hpp"

#include <stdexcept>

namespace lpp {

std::vector<double> sample_field(const Grid& grid,
                                 const WeightDistribution& dist,
                                 std::uint64_t seed, rng::Tag tag) {
  const std::uint64_t count = grid.vertex_count();
  std::vector<double> field(count);
  for (std::uint64_t v = 0; v < count; ++v) {
    rng::Stream stream(seed, v, tag);
    field[v] = dist.sample(stream);
  }
  return field;
}

DynamicCoupling::DynamicCoupling(const Grid& grid,
                                 const WeightDistribution& dist,
                                 std::uint64_t seed)
    : grid_(&grid),
      seed_(seed),
      integer_valued_(dist.integer_valued()),
      base_(sample_field(grid, dist, seed, rng::Tag::base_weights)),
      refresh_(sample_field(grid, dist, seed, rng::Tag::refresh_weights)) {
  const std::uint64_t count = grid.vertex_count();
  clocks_.resize(count);
  for (std::uint64_t v = 0; v < count; ++v) {
    rng::Stream stream(seed, v, rng::Tag::clocks);
    clocks_[v] = stream.next_u01();
  }
}

void DynamicCoupling::configuration_at(double t, Configuration& out) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("configuration_at: t must lie in [0,1]");
  const std::uint64_t count = grid_->vertex_count();
  out.grid = grid_;
  out.integer_valued = integer_valued_;
  out.weights.resize(count);
  for (std::uint64_t v = 0; v < count; ++v) {
    out.weights[v] = clocks_[v] > t ? base_[v] : refresh_[v];
  }
}

Configuration DynamicCoupling::configuration_at(double t) const {
  Configuration out;
  configuration_at(t, out);
  return out;
}

std::vector<VertexIndex> DynamicCoupling::resampled_set(double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("resampled_set: t must lie in [0,1]");
  std::vector<VertexIndex> out;
  const std::uint64_t count = grid_->vertex_count();
  for (std::uint64_t v = 0; v < count; ++v) {
    if (clocks_[v] <= t) out.push_back(static_cast<VertexIndex>(v));
  }
  return out;
}

}  // namespace lpp
