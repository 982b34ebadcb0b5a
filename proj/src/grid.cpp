#include "lpp/grid.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace lpp {

Grid::Grid(int n, int d, std::uint64_t max_vertices) : n_(n), d_(d) {
  if (n < 1) throw std::invalid_argument("grid: n must be >= 1");
  if (d < 2) throw std::invalid_argument("grid: d must be >= 2");

  const std::uint64_t side = static_cast<std::uint64_t>(n) + 1;
  std::uint64_t count = 1;
  strides_.assign(d, 0);
  for (int i = d - 1; i >= 0; --i) {
    strides_[i] = count;
    if (count > std::numeric_limits<std::uint64_t>::max() / side)
      throw std::invalid_argument("grid: vertex count overflows");
    count *= side;
  }
  if (count > max_vertices)
    throw std::invalid_argument("grid: vertex count exceeds memory budget");
  if (count > std::numeric_limits<VertexIndex>::max())
    throw std::invalid_argument("grid: vertex count exceeds index width");
  count_ = count;
}

std::vector<int> Grid::coords(VertexIndex v) const {
  if (!contains(v)) throw std::out_of_range("grid: vertex outside cube");
  std::vector<int> c(d_);
  std::uint64_t rest = v;
  for (int i = 0; i < d_; ++i) {
    c[i] = static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
  }
  return c;
}

VertexIndex Grid::index_of(const std::vector<int>& coords) const {
  if (static_cast<int>(coords.size()) != d_)
    throw std::invalid_argument("grid: coordinate arity mismatch");
  std::uint64_t idx = 0;
  for (int i = 0; i < d_; ++i) {
    if (coords[i] < 0 || coords[i] > n_)
      throw std::out_of_range("grid: coordinate outside cube");
    idx += static_cast<std::uint64_t>(coords[i]) * strides_[i];
  }
  return static_cast<VertexIndex>(idx);
}

int Grid::layer(VertexIndex v) const {
  if (!contains(v)) throw std::out_of_range("grid: vertex outside cube");
  int sum = 0;
  std::uint64_t rest = v;
  for (int i = 0; i < d_; ++i) {
    sum += static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
  }
  return sum;
}

std::vector<VertexIndex> Grid::up_neighbors(VertexIndex v) const {
  if (!contains(v)) throw std::out_of_range("grid: vertex outside cube");
  std::vector<VertexIndex> out;
  out.reserve(d_);
  std::uint64_t rest = v;
  for (int i = 0; i < d_; ++i) {
    const int ci = static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
    if (ci < n_) out.push_back(static_cast<VertexIndex>(v + strides_[i]));
  }
  return out;
}

std::vector<VertexIndex> Grid::down_neighbors(VertexIndex v) const {
  if (!contains(v)) throw std::out_of_range("grid: vertex outside cube");
  std::vector<VertexIndex> out;
  out.reserve(d_);
  std::uint64_t rest = v;
  for (int i = 0; i < d_; ++i) {
    const int ci = static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
    if (ci > 0) out.push_back(static_cast<VertexIndex>(v - strides_[i]));
  }
  return out;
}

std::vector<VertexIndex> Grid::layer_order() const {
  // Counting sort by layer keeps within-layer order by index.
  const int max_layer = d_ * n_;
  std::vector<std::uint32_t> bucket_size(max_layer + 1, 0);
  for (VertexIndex v = 0; v < count_; ++v) ++bucket_size[layer(v)];
  std::vector<std::uint32_t> offset(max_layer + 2, 0);
  for (int l = 0; l <= max_layer; ++l) offset[l + 1] = offset[l] + bucket_size[l];
  std::vector<VertexIndex> order(count_);
  std::vector<std::uint32_t> cursor(offset.begin(), offset.end() - 1);
  for (VertexIndex v = 0; v < count_; ++v) order[cursor[layer(v)]++] = v;
  return order;
}

std::uint64_t Grid::path_count() const {
  // (dn)!/(n!)^d as a product of binomials C(kn, n), k = 1..d.
  std::uint64_t total = 1;
  for (int k = 1; k <= d_; ++k) {
    std::uint64_t binom = 1;
    for (int j = 1; j <= n_; ++j) {
      const std::uint64_t numer =
          static_cast<std::uint64_t>(k - 1) * n_ + static_cast<std::uint64_t>(j);
      // binom = binom * numer / j, keeping exact integer arithmetic.
      const std::uint64_t g = std::gcd(binom, static_cast<std::uint64_t>(j));
      std::uint64_t b = binom / g;
      const std::uint64_t jj = static_cast<std::uint64_t>(j) / g;
      const std::uint64_t num2 = numer / jj;
      if (b > std::numeric_limits<std::uint64_t>::max() / num2)
        throw std::overflow_error("path_count: overflow");
      binom = b * num2;
    }
    if (binom != 0 && total > std::numeric_limits<std::uint64_t>::max() / binom)
      throw std::overflow_error("path_count: overflow");
    total *= binom;
  }
  return total;
}

PathEnumerator::PathEnumerator(const Grid& grid, std::uint64_t cap)
    : grid_(&grid) {
  const std::uint64_t count = grid.path_count();
  if (count > cap)
    throw PathCapExceeded("enumerate_paths: " + std::to_string(count) +
                          " paths exceed cap " + std::to_string(cap));
  // Lexicographically smallest multiset permutation of n copies of each
  // axis label; std::next_permutation walks all distinct orderings.
  steps_.reserve(static_cast<size_t>(grid.dim()) * grid.side());
  for (int axis = 0; axis < grid.dim(); ++axis)
    steps_.insert(steps_.end(), grid.side(), axis);
  path_.resize(steps_.size() + 1);
}

void PathEnumerator::materialize() {
  VertexIndex v = grid_->origin();
  path_[0] = v;
  for (size_t i = 0; i < steps_.size(); ++i) {
    v = static_cast<VertexIndex>(v + grid_->stride(steps_[i]));
    path_[i + 1] = v;
  }
}

const std::vector<VertexIndex>* PathEnumerator::next() {
  if (done_) return nullptr;
  if (first_) {
    first_ = false;
    materialize();
    return &path_;
  }
  if (!std::next_permutation(steps_.begin(), steps_.end())) {
    done_ = true;
    return nullptr;
  }
  materialize();
  return &path_;
}

}  // namespace lpp
