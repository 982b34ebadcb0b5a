#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lpp {

struct ParallelOptions {
  int threads = 0;  // 0: OpenMP default
  std::uint64_t block_size = 256;
  bool parallel = true;  // false selects the serial reference path
};

// Runs fn(replicate, accumulator) for every replicate in [0, replicates).
// Replicates are grouped into fixed blocks; blocks run in parallel but each
// block accumulates in replicate order and partials merge in block order,
// so the result is bit-identical for any thread count and identical to the
// serial reference path.  Acc needs a default constructor and merge().
template <typename Acc, typename Fn>
Acc run_replicates(std::uint64_t replicates, Fn&& fn,
                   const ParallelOptions& options = {}) {
  const std::uint64_t block = options.block_size > 0 ? options.block_size : 1;
  const std::uint64_t nblocks = (replicates + block - 1) / block;
  std::vector<Acc> partial(nblocks);

  if (options.parallel && nblocks > 1) {
#ifdef _OPENMP
    const int threads =
        options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
      const std::uint64_t lo = static_cast<std::uint64_t>(b) * block;
      const std::uint64_t hi = std::min(replicates, lo + block);
      for (std::uint64_t r = lo; r < hi; ++r) fn(r, partial[b]);
    }
  } else {
    for (std::uint64_t b = 0; b < nblocks; ++b) {
      const std::uint64_t lo = b * block;
      const std::uint64_t hi = std::min(replicates, lo + block);
      for (std::uint64_t r = lo; r < hi; ++r) fn(r, partial[b]);
    }
  }

  Acc total;
  for (const Acc& p : partial) total.merge(p);
  return total;
}

// Serial reference driver with the same block structure.
template <typename Acc, typename Fn>
Acc run_replicates_serial(std::uint64_t replicates, Fn&& fn,
                          ParallelOptions options = {}) {
  options.parallel = false;
  return run_replicates<Acc>(replicates, static_cast<Fn&&>(fn), options);
}

}  // namespace lpp
