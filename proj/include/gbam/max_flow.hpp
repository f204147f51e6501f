#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace gbam {

/// Dense max-flow network for tiny graphs (at most kMaxNodes nodes).
///
/// Flow is kept antisymmetric (flow(v,u) == -flow(u,v)), so residual(u,v)
/// covers both forward slack and cancellable reverse flow. augment() continues
/// from the current flow, which lets callers raise a capacity and push more
/// without disturbing flow already routed out of the source.
class SmallFlowNetwork {
 public:
  static constexpr std::size_t kMaxNodes = 34;
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max() / 4;

  explicit SmallFlowNetwork(std::size_t nodes);

  std::size_t size() const { return n_; }

  void set_capacity(std::size_t u, std::size_t v, std::int64_t cap) { cap_[idx(u, v)] = cap; }
  std::int64_t capacity(std::size_t u, std::size_t v) const { return cap_[idx(u, v)]; }
  std::int64_t flow(std::size_t u, std::size_t v) const { return flow_[idx(u, v)]; }
  std::int64_t residual(std::size_t u, std::size_t v) const {
    return cap_[idx(u, v)] - flow_[idx(u, v)];
  }

  /// Pushes up to `limit` additional units from s to t along shortest
  /// augmenting paths (Edmonds-Karp). Returns the amount pushed.
  std::int64_t augment(std::size_t s, std::size_t t, std::int64_t limit = kUnbounded);

  /// Moves `amount` units along u->v and records it as flow; the caller is
  /// responsible for keeping conservation intact.
  void push(std::size_t u, std::size_t v, std::int64_t amount) {
    flow_[idx(u, v)] += amount;
    flow_[idx(v, u)] -= amount;
  }

  void clear_flow();

  /// A network whose capacities are this network's residual capacities and
  /// whose flow is zero.
  SmallFlowNetwork residual_network() const;

 private:
  std::size_t idx(std::size_t u, std::size_t v) const { return u * n_ + v; }

  std::size_t n_;
  std::array<std::int64_t, kMaxNodes * kMaxNodes> cap_;
  std::array<std::int64_t, kMaxNodes * kMaxNodes> flow_;
};

}  // namespace gbam
