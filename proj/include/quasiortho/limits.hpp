#pragma once

#include <cstddef>
#include <cstdint>

namespace quasiortho {

/// Resource caps applied by every constructor that allocates dense storage.
struct Limits {
  std::size_t max_state_dim = std::size_t{1} << 14;
  std::size_t max_unitary_dim = std::size_t{1} << 11;
  /// Bound on M*M*d scalar operations for all-pairs family verification.
  double max_pair_ops = 1e10;
  /// Bound on M*d stored amplitudes for one family.
  std::size_t max_family_amplitudes = std::size_t{1} << 26;
};

/// Process-wide caps. Adjust before starting any parallel work.
inline Limits& limits() {
  static Limits instance;
  return instance;
}

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quasiortho
