#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "lpp/rng.hpp"

using namespace lpp;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors for the 10-round Philox4x32 function.
  auto out = rng::philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = rng::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                           {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = rng::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                           {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and order-independent") {
  rng::Stream a(42, 7, rng::Tag::base_weights);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 16; ++i) first.push_back(a.next_u64());

  rng::Stream b(42, 7, rng::Tag::base_weights);
  for (int i = 0; i < 16; ++i) CHECK(b.next_u64() == first[i]);

  // A stream created later yields the same values as one created earlier.
  rng::Stream other(42, 8, rng::Tag::base_weights);
  (void)other.next_u64();
  rng::Stream c(42, 7, rng::Tag::base_weights);
  CHECK(c.next_u64() == first[0]);
}

TEST_CASE("distinct ids, tags and seeds give distinct streams") {
  rng::Stream base(1, 0, rng::Tag::base_weights);
  rng::Stream other_id(1, 1, rng::Tag::base_weights);
  rng::Stream other_tag(1, 0, rng::Tag::refresh_weights);
  rng::Stream other_seed(2, 0, rng::Tag::base_weights);
  const std::uint64_t v = base.next_u64();
  CHECK(other_id.next_u64() != v);
  CHECK(other_tag.next_u64() != v);
  CHECK(other_seed.next_u64() != v);
}

TEST_CASE("u01 lies strictly inside (0,1)") {
  CHECK(rng::u01(0) > 0.0);
  CHECK(rng::u01(~std::uint64_t{0}) < 1.0);
  rng::Stream s(3, 5, rng::Tag::clocks);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.next_u01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform moments at 1e5 draws") {
  rng::Stream s(99, 0, rng::Tag::generic);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_u01();
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.005);       // ~5 sigma
  CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("derive_seed separates replicate streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r)
    seen.insert(rng::derive_seed(123456789, r));
  CHECK(seen.size() == 1000);
  CHECK(rng::derive_seed(1, 0) != rng::derive_seed(2, 0));
}
