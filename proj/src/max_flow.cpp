#include "gbam/max_flow.hpp"

#include <algorithm>
#include <stdexcept>

namespace gbam {

SmallFlowNetwork::SmallFlowNetwork(std::size_t nodes) : n_(nodes) {
  if (nodes > kMaxNodes) throw std::invalid_argument("SmallFlowNetwork: too many nodes");
  std::fill_n(cap_.begin(), n_ * n_, 0);
  std::fill_n(flow_.begin(), n_ * n_, 0);
}

void SmallFlowNetwork::clear_flow() { std::fill_n(flow_.begin(), n_ * n_, 0); }

SmallFlowNetwork SmallFlowNetwork::residual_network() const {
  SmallFlowNetwork r(n_);
  for (std::size_t k = 0; k < n_ * n_; ++k) r.cap_[k] = cap_[k] - flow_[k];
  return r;
}

std::int64_t SmallFlowNetwork::augment(std::size_t s, std::size_t t, std::int64_t limit) {
  if (s >= n_ || t >= n_) throw std::out_of_range("SmallFlowNetwork: node out of range");
  if (s == t) return 0;
  std::int64_t pushed = 0;
  std::array<int, kMaxNodes> parent{};
  std::array<std::size_t, kMaxNodes> queue{};
  while (pushed < limit) {
    std::fill_n(parent.begin(), n_, -1);
    parent[s] = static_cast<int>(s);
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = s;
    while (head < tail && parent[t] < 0) {
      const std::size_t u = queue[head++];
      const std::int64_t* cap_row = &cap_[idx(u, 0)];
      const std::int64_t* flow_row = &flow_[idx(u, 0)];
      for (std::size_t v = 0; v < n_; ++v) {
        if (parent[v] < 0 && cap_row[v] > flow_row[v]) {
          parent[v] = static_cast<int>(u);
          queue[tail++] = v;
        }
      }
    }
    if (parent[t] < 0) break;

    std::int64_t bottleneck = limit - pushed;
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
      const auto u = static_cast<std::size_t>(parent[v]);
      bottleneck = std::min(bottleneck, residual(u, v));
    }
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
      push(static_cast<std::size_t>(parent[v]), v, bottleneck);
    }
    pushed += bottleneck;
  }
  return pushed;
}

}  // namespace gbam
