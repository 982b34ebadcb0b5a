#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "lpp/grid.hpp"

using namespace lpp;

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(Grid(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(Grid(100, 8), std::invalid_argument);  // budget
  CHECK_THROWS_AS(Grid(1000000, 4), std::invalid_argument);
  CHECK_NOTHROW(Grid(256, 2));
}

TEST_CASE("index <-> coordinate round trip") {
  for (const Grid& grid : {Grid(3, 2), Grid(2, 3), Grid(1, 4)}) {
    for (VertexIndex v = 0; v < grid.vertex_count(); ++v) {
      CHECK(grid.index_of(grid.coords(v)) == v);
    }
  }
  const Grid grid(3, 2);
  CHECK(grid.coords(grid.origin()) == std::vector<int>{0, 0});
  CHECK(grid.coords(grid.target()) == std::vector<int>{3, 3});
}

TEST_CASE("up neighbors") {
  const Grid grid(3, 2);
  auto at = [&](int a, int b) { return grid.index_of({a, b}); };
  auto ups = grid.up_neighbors(at(1, 1));
  std::set<VertexIndex> got(ups.begin(), ups.end());
  CHECK(got == std::set<VertexIndex>{at(2, 1), at(1, 2)});
  CHECK(grid.up_neighbors(at(3, 3)).empty());
  CHECK(grid.up_neighbors(grid.origin()).size() == 2);

  const Grid g31(1, 3);
  CHECK(g31.up_neighbors(g31.origin()).size() == 3);

  CHECK_THROWS_AS(grid.up_neighbors(static_cast<VertexIndex>(16)),
                  std::out_of_range);
}

TEST_CASE("layers increase along every edge") {
  const Grid grid(3, 3);
  for (VertexIndex v = 0; v < grid.vertex_count(); ++v) {
    for (VertexIndex u : grid.up_neighbors(v)) {
      CHECK(grid.layer(u) == grid.layer(v) + 1);
    }
  }
}

TEST_CASE("layer order") {
  const Grid tiny(1, 2);
  const auto order = tiny.layer_order();
  CHECK(order.front() == tiny.origin());
  CHECK(order.back() == tiny.target());

  const Grid grid(2, 2);
  const auto seq = grid.layer_order();
  CHECK(seq.size() == 9);
  int prev = -1;
  std::map<int, int> layer_sizes;
  for (VertexIndex v : seq) {
    const int l = grid.layer(v);
    CHECK(l >= prev);
    prev = l;
    ++layer_sizes[l];
  }
  CHECK(layer_sizes == std::map<int, int>{{0, 1}, {1, 2}, {2, 3}, {3, 2}, {4, 1}});
  // Deterministic: two calls agree.
  CHECK(grid.layer_order() == seq);
}

TEST_CASE("path counts") {
  CHECK(Grid(4, 2).path_count() == 70);
  CHECK(Grid(1, 2).path_count() == 2);
  CHECK(Grid(2, 3).path_count() == 90);
  CHECK(Grid(3, 3).path_count() == 1680);
}

TEST_CASE("path enumeration") {
  const Grid grid(4, 2);
  PathEnumerator paths(grid);
  std::set<std::vector<VertexIndex>> seen;
  std::uint64_t count = 0;
  while (const auto* path = paths.next()) {
    ++count;
    CHECK(path->size() == 9);  // d*n + 1
    CHECK(path->front() == grid.origin());
    CHECK(path->back() == grid.target());
    std::vector<int> steps_per_axis(2, 0);
    for (size_t i = 0; i + 1 < path->size(); ++i) {
      CHECK(grid.layer((*path)[i + 1]) == grid.layer((*path)[i]) + 1);
      const auto a = grid.coords((*path)[i]);
      const auto b = grid.coords((*path)[i + 1]);
      for (int axis = 0; axis < 2; ++axis)
        steps_per_axis[axis] += b[axis] - a[axis];
    }
    CHECK(steps_per_axis == std::vector<int>{4, 4});
    seen.insert(*path);
  }
  CHECK(count == 70);
  CHECK(seen.size() == 70);  // produced exactly once
  CHECK(paths.next() == nullptr);
}

TEST_CASE("enumeration respects the multinomial count in d=3") {
  const Grid grid(2, 3);
  PathEnumerator paths(grid);
  std::uint64_t count = 0;
  while (paths.next()) ++count;
  CHECK(count == 90);
}

TEST_CASE("path cap") {
  CHECK_THROWS_AS(PathEnumerator(Grid(12, 2), 1000), PathCapExceeded);
  CHECK_NOTHROW(PathEnumerator(Grid(4, 2), 70));
}
