#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace gom {

enum class OpId : std::uint32_t {};
enum class SortId : std::uint32_t {};

constexpr std::uint32_t index_of(OpId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index_of(SortId id) { return static_cast<std::uint32_t>(id); }

/// Handle to an interned node. Two refs from the same store are equal iff the
/// terms they denote are structurally equal.
struct NodeRef {
  std::uint32_t store = 0;  // 0 = null ref
  std::uint32_t index = 0;

  constexpr bool valid() const { return store != 0; }
  friend constexpr auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

}  // namespace gom

template <>
struct std::hash<gom::NodeRef> {
  std::size_t operator()(const gom::NodeRef& r) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{r.store} << 32) | r.index);
  }
};
