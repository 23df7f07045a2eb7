#pragma once

#include <cstddef>
#include <cstdint>

namespace censorbias {

/// Identifies one reproducible stream of uniform draws.
struct RngHandle {
  std::uint64_t master_seed = 1963;
  std::uint64_t stream_id = 0;
};

/// Stream id for a (trial, purpose) pair; distinct pairs give unrelated streams.
std::uint64_t derive_stream(std::uint64_t trial_index, std::uint64_t tag);

/// xoshiro256** seeded from splitmix64(master_seed ^ splitmix64(stream_id)).
///
/// The draw sequence depends only on the handle, never on the platform or the
/// standard library, so simulated datasets are reproducible everywhere.
class Rng {
 public:
  explicit Rng(RngHandle handle);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform();

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n) without modulo bias. n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t s_[4];
};

}  // namespace censorbias
