#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lpp {

using VertexIndex = std::uint32_t;

// Too many directed paths for the enumeration cap.
struct PathCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The cube [0,n]^d of Z^d with directed up-right adjacency.  Vertices are
// flat row-major indices (last coordinate fastest); coordinates are
// materialized only at API boundaries.
class Grid {
 public:
  static constexpr std::uint64_t kDefaultMaxVertices = std::uint64_t{1} << 27;

  Grid(int n, int d, std::uint64_t max_vertices = kDefaultMaxVertices);

  int side() const { return n_; }
  int dim() const { return d_; }
  std::uint64_t vertex_count() const { return count_; }

  VertexIndex origin() const { return 0; }
  VertexIndex target() const { return static_cast<VertexIndex>(count_ - 1); }

  std::vector<int> coords(VertexIndex v) const;
  VertexIndex index_of(const std::vector<int>& coords) const;
  // Sum of coordinates; strictly increases along every directed edge.
  int layer(VertexIndex v) const;

  bool contains(VertexIndex v) const { return v < count_; }

  // {v + e_i : v_i < n}.  Throws on an out-of-cube vertex.
  std::vector<VertexIndex> up_neighbors(VertexIndex v) const;
  // {v - e_i : v_i > 0}.
  std::vector<VertexIndex> down_neighbors(VertexIndex v) const;

  // All vertices sorted by layer, ties broken by index (deterministic).
  std::vector<VertexIndex> layer_order() const;

  // Number of directed origin->target paths, (dn)!/(n!)^d.  Throws
  // std::overflow_error if the count does not fit a uint64.
  std::uint64_t path_count() const;

  // Stride of coordinate axis i.
  std::uint64_t stride(int axis) const { return strides_[axis]; }

 private:
  int n_;
  int d_;
  std::uint64_t count_;
  std::vector<std::uint64_t> strides_;
};

// Single-consumer iterator over all directed origin->target paths, each a
// sequence of d*n+1 vertex indices.  Used as a brute-force testing oracle.
class PathEnumerator {
 public:
  static constexpr std::uint64_t kDefaultCap = 1000000;

  explicit PathEnumerator(const Grid& grid, std::uint64_t cap = kDefaultCap);

  // Returns the next path, or nullptr when exhausted.  The pointee is
  // invalidated by the following call.
  const std::vector<VertexIndex>* next();

 private:
  void materialize();

  const Grid* grid_;
  std::vector<int> steps_;  // multiset permutation of axis labels
  std::vector<VertexIndex> path_;
  bool done_ = false;
  bool first_ = true;
};

}  // namespace lpp
