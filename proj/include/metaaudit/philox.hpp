#pragma once

#include <array>
#include <cstdint>

namespace metaaudit {

/// Philox4x32 with 10 rounds (Salmon et al., Random123). Counter-based:
/// every output block is a pure function of (counter, key).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// Uniform strictly inside (0, 1): the top 52 bits of hi:lo, centred in their cell.
double uniform_open01(std::uint32_t hi, std::uint32_t lo) noexcept;

}  // namespace metaaudit
