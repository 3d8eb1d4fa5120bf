#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace swlb {

// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: maps a
// 128-bit counter and a 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Mix a parent seed with a sequence of tags into a child seed. Used to key
// nested substreams such as (master, replication, stage).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

// Counter-based random stream. The pair (seed, stream_id) fully determines the
// sequence, so replicate j can be regenerated on any thread in any order.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1): never returns 0 or 1.
  double uniform();

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  // Gamma(shape, scale 1). Marsaglia-Tsang squeeze for shape >= 1, boosted by
  // U^{1/shape} for shape < 1. May return exactly 0 when shape is tiny.
  double gamma(double shape);

  // Exponential with the given mean: -mean * ln(U).
  double exponential(double mean);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int available_ = 0;  // 64-bit words left in buffer_
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace swlb
