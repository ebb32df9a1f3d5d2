#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace netpg {

// Raised for contract violations: bad arguments, malformed configs, broken
// simulation invariants.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense node index 0..N-1.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

}  // namespace netpg

template <>
struct std::hash<netpg::NodeId> {
  std::size_t operator()(netpg::NodeId n) const noexcept {
    return std::hash<std::uint32_t>{}(n.value);
  }
};
