#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace pdsq {

using Vertex = std::uint32_t;

/// Unordered vertex pair, always stored with lo < hi.
struct VertexPair {
  Vertex lo = 0;
  Vertex hi = 0;

  static VertexPair of(Vertex i, Vertex j) noexcept {
    return i < j ? VertexPair{i, j} : VertexPair{j, i};
  }
  std::uint64_t key() const noexcept {
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
  }
  friend bool operator==(const VertexPair&, const VertexPair&) = default;
  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

enum class Hypothesis : std::uint8_t { null = 0, alternative = 1 };

constexpr std::string_view to_string(Hypothesis h) noexcept {
  return h == Hypothesis::null ? "H0" : "H1";
}

}  // namespace pdsq
