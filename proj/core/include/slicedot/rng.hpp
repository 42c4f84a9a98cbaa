#pragma once

#include <cstdint>

#include "slicedot/tensor.hpp"

namespace slicedot {

/// Counter-based random stream.
///
/// Output i of stream (seed, stream_id) is a fixed bijective mix of the key
/// derived from (seed, stream_id) and the counter i, so sequences depend only
/// on those three integers: not on platform, standard library or scheduling.
/// Parallel work derives child streams by id instead of sharing one stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent stream keyed on (seed, stream_id, id). Does not advance *this.
  RngStream child(std::uint64_t id) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// i.i.d. N(0,1) entries drawn in row-major order.
Tensor sample_standard_normal(RngStream& rng, const Shape& shape);

}  // namespace slicedot
