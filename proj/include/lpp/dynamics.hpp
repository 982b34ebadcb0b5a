#pragma once

#include <cstdint>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/grid.hpp"
#include "lpp/lpp_core.hpp"

namespace lpp {

// Draws a full weight field, one substream per vertex.
std::vector<double> sample_field(const Grid& grid,
                                 const WeightDistribution& dist,
                                 std::uint64_t seed, rng::Tag tag);

// The resampling coupling (omega, omega', U): configuration_at(t) replaces
// the weight at v by its refresh draw exactly when U_v <= t.  All fields
// come from disjoint counter-based substreams of the seed, so a coupling is
// reproducible independent of evaluation order and thread count.
class DynamicCoupling {
 public:
  DynamicCoupling(const Grid& grid, const WeightDistribution& dist,
                  std::uint64_t seed);

  const Grid& grid() const { return *grid_; }
  std::uint64_t seed() const { return seed_; }
  bool integer_valued() const { return integer_valued_; }

  const std::vector<double>& base() const { return base_; }
  const std::vector<double>& refresh() const { return refresh_; }
  const std::vector<double>& clocks() const { return clocks_; }

  // Throws std::domain_error for t outside [0,1].
  Configuration configuration_at(double t) const;
  void configuration_at(double t, Configuration& out) const;

  // {v : U_v <= t}.
  std::vector<VertexIndex> resampled_set(double t) const;

 private:
  const Grid* grid_;
  std::uint64_t seed_;
  bool integer_valued_;
  std::vector<double> base_;
  std::vector<double> refresh_;
  std::vector<double> clocks_;
};

}  // namespace lpp
