#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpp/grid.hpp"

namespace lpp {

// A weight field over the cube.  integer_valued enables exact tie
// arithmetic (geodesic sets at atoms are meaningful).
struct Configuration {
  const Grid* grid = nullptr;
  std::vector<double> weights;
  bool integer_valued = false;
};

struct PassageOptions {
  // Tie tolerance for continuous laws is rel_tie_tolerance * T; integer
  // configurations always use an exact (zero) tolerance.
  double rel_tie_tolerance = 1e-9;
};

struct PassageResult {
  double time = 0.0;  // T
  // Best weight-sum origin->v / v->target, inclusive of both endpoints.
  std::vector<double> forward;
  std::vector<double> backward;
  // in_geodesic[v] != 0 iff forward[v] + backward[v] - w[v] >= T - tol.
  std::vector<std::uint8_t> in_geodesic;
  std::uint32_t geodesic_count = 0;
  double tie_tolerance = 0.0;
};

// |pi|, the number of vertices lying on some geodesic.
inline std::uint32_t geodesic_membership_count(const PassageResult& result) {
  return result.geodesic_count;
}

// Scratch buffers for the masked sweeps, reusable across calls.
struct SweepWorkspace {
  std::vector<double> value;
  std::vector<std::uint8_t> reachable;
};

// Full dynamic program: forward and backward value fields, T, and the
// geodesic vertex set.
PassageResult passage_time(const Configuration& config,
                           const PassageOptions& options = {});
// Reusing-buffers variant.
void passage_time_into(const Configuration& config, PassageResult& result,
                       const PassageOptions& options = {});

// Forward sweep only; returns T.
double passage_value(const Configuration& config);

// Maximal weight-sum over origin->target paths avoiding v; nullopt when no
// avoiding path exists (v is the origin or the target).
std::optional<double> avoid_passage_time(const Configuration& config,
                                         VertexIndex avoid);
std::optional<double> avoid_passage_time(const Configuration& config,
                                         VertexIndex avoid,
                                         SweepWorkspace& workspace);

// Best other-weight sum over paths through v: Fwd(v) + Bwd(v) - 2 w[v].
// Does not depend on w[v].
double through_weight_sum(const Configuration& config,
                          const PassageResult& base, VertexIndex v);

// Threshold weight k_v: the smallest x >= 0 whose placement at v puts v on
// some geodesic.  Any x >= k_v joins the geodesic set, any x < k_v does not.
double threshold_weight(const Configuration& config, const PassageResult& base,
                        VertexIndex v);
double threshold_weight(const Configuration& config, const PassageResult& base,
                        VertexIndex v, SweepWorkspace& workspace);
double threshold_weight(const Configuration& config, VertexIndex v);

// T with the weight at v replaced by x.
double resampled_passage_time(const Configuration& config,
                              const PassageResult& base, VertexIndex v,
                              double x);
double resampled_passage_time(const Configuration& config,
                              const PassageResult& base, VertexIndex v,
                              double x, SweepWorkspace& workspace);
double resampled_passage_time(const Configuration& config, VertexIndex v,
                              double x);

}  // namespace lpp
