#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace quasiortho {

namespace detail {

// splitmix64 finalizer; used only to derive substream indices.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Seeded uniform and Gaussian source. A (seed, stream_index) pair fully
/// determines the draw sequence, on every platform: the engine is
/// mt19937_64 initialised through std::seed_seq, and all derived variates
/// are computed here rather than through the implementation-defined
/// standard distributions.
///
/// Not thread safe. Parallel drivers give each trial its own substream().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_index = 0)
      : seed_(seed), stream_index_(stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Independent child stream, a pure function of (seed, stream_index, k).
  RngStream substream(std::uint64_t k) const {
    return RngStream(seed_, detail::mix64(detail::mix64(stream_index_) ^ (k + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Standard complex Gaussian: real and imaginary parts independent with
  /// variance 1/2 each, so |g|^2 is a unit-mean exponential.
  std::complex<double> complex_gaussian() {
    const double r = std::sqrt(-std::log(uniform_pos()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(angle), r * std::sin(angle)};
  }

  /// Standard real normal (variance 1).
  double gaussian() { return std::numbers::sqrt2 * complex_gaussian().real(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

}  // namespace quasiortho
