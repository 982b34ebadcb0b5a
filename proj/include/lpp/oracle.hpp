#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpp/lpp_core.hpp"

// Brute-force reference implementations computed by full path enumeration.
// Testing oracle only: no dynamic programming, no shared formulas with the
// sweep kernels beyond the model definition.

namespace lpp::oracle {

struct BruteForce {
  double time = 0.0;
  // Union of vertices on maximizing paths (ties resolved with tolerance).
  std::vector<std::uint8_t> in_geodesic;
  // Per vertex: best path-sum avoiding v (nullopt if every path visits v),
  // and best other-weight sum over paths through v.
  std::vector<std::optional<double>> avoid;
  std::vector<double> through_other;
};

// Enumerates every path twice: once for maxima, once for the geodesic union.
BruteForce evaluate(const Configuration& config, double tie_tolerance = 0.0,
                    std::uint64_t cap = 1000000);

// Max over enumerated paths with the weight at v replaced by x.
double resampled(const Configuration& config, VertexIndex v, double x,
                 std::uint64_t cap = 1000000);

// Threshold weight from the enumerated maxima.
double threshold(const BruteForce& brute, VertexIndex v);

}  // namespace lpp::oracle
