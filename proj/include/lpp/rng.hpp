#pragma once

#include <array>
#include <cstdint>

// Counter-based random number generation (Philox4x32-10, Salmon et al.,
// SC 2011).  Every draw is a pure function of (seed, stream id, tag, block),
// so weight fields and replicate streams are reproducible regardless of
// evaluation order or thread count.

namespace lpp::rng {

struct Philox4x32 {
  std::array<std::uint32_t, 4> ctr;
  std::array<std::uint32_t, 2> key;
};

namespace detail {

constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kMult0, c[0], lo0, hi0);
  mul_hi_lo(kMult1, c[2], lo1, hi1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace detail

// Ten rounds, bumping the key between rounds.
inline std::array<std::uint32_t, 4> philox4x32_10(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kWeyl0;
      key[1] += detail::kWeyl1;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

// Substream tags.  Distinct tags give statistically independent fields for
// the same (seed, stream id) pair.
enum class Tag : std::uint32_t {
  base_weights = 1,
  refresh_weights = 2,
  clocks = 3,
  vertex_sample = 4,
  oracle = 5,
  generic = 6,
  seed_derive = 0xF00Du,
};

// Maps 64 random bits to a double strictly inside (0,1).  The 0.5 offset
// stays exactly representable at 52 bits, so neither endpoint is reachable.
inline double u01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// A deterministic stream of random values identified by (seed, id, tag).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id, Tag tag)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        id_lo_(static_cast<std::uint32_t>(id)),
        id_hi_(static_cast<std::uint32_t>(id >> 32)),
        tag_(static_cast<std::uint32_t>(tag)) {}

  std::uint64_t next_u64() {
    if (phase_ == 0) {
      block_words_ = philox4x32_10({block_, id_lo_, id_hi_, tag_}, key_);
      ++block_;
      phase_ = 1;
      return pack(block_words_[0], block_words_[1]);
    }
    phase_ = 0;
    return pack(block_words_[2], block_words_[3]);
  }

  double next_u01() { return u01(next_u64()); }

 private:
  static std::uint64_t pack(std::uint32_t lo, std::uint32_t hi) {
    return static_cast<std::uint64_t>(lo) |
           (static_cast<std::uint64_t>(hi) << 32);
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t id_lo_, id_hi_, tag_;
  std::uint32_t block_ = 0;
  int phase_ = 0;
  std::array<std::uint32_t, 4> block_words_{};
};

// One uniform variate at a fixed address, without stream state.
inline double u01_at(std::uint64_t seed, std::uint64_t id, Tag tag) {
  const auto w = philox4x32_10({0u, static_cast<std::uint32_t>(id),
                                static_cast<std::uint32_t>(id >> 32),
                                static_cast<std::uint32_t>(tag)},
                               {static_cast<std::uint32_t>(seed),
                                static_cast<std::uint32_t>(seed >> 32)});
  return u01(static_cast<std::uint64_t>(w[0]) |
             (static_cast<std::uint64_t>(w[1]) << 32));
}

// Derives an independent 64-bit seed for a child stream (e.g. one Monte
// Carlo replicate of a master run).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  const auto w = philox4x32_10(
      {0u, static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(Tag::seed_derive)},
      {static_cast<std::uint32_t>(master),
       static_cast<std::uint32_t>(master >> 32)});
  return static_cast<std::uint64_t>(w[0]) |
         (static_cast<std::uint64_t>(w[1]) << 32);
}

}  // namespace lpp::rng
