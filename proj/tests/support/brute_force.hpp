#pragma once

// Test-only reference implementations that share no code with the flow-based
// allocator: exhaustive enumeration of integer loan packings, a greedy
// nearest-lender packer (known to be incomplete), and random instance
// generators.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "gbam/model.hpp"

namespace gbam::testing {

// Lender-side bookkeeping while enumerating.
struct LenderRoom {
  std::uint64_t htl = 0;   // remaining HTL cap
  std::uint64_t lth = 0;   // remaining LTH cap
  std::uint64_t pool = 0;  // remaining BC - max(private, own usage)
};

inline std::vector<LenderRoom> initial_rooms(const BamConfig& cfg,
                                             const std::vector<std::uint64_t>& n) {
  std::vector<LenderRoom> rooms(cfg.class_count());
  for (std::size_t l = 0; l < rooms.size(); ++l) {
    const std::uint64_t bc = cfg.bc(l).kbps();
    const std::uint64_t own = std::min(n[l], bc);
    const std::uint64_t priv = bc - std::max(cfg.htl_cap(l).kbps(), cfg.lth_cap(l).kbps());
    rooms[l] = {cfg.htl_cap(l).kbps(), cfg.lth_cap(l).kbps(), bc - std::max(priv, own)};
  }
  return rooms;
}

namespace detail {

// Tries every split of borrower b's remaining overflow over lenders
// l >= next, then moves on to borrower b + 1.
inline bool enumerate(const std::vector<std::uint64_t>& overflow, std::vector<LenderRoom>& rooms,
                      std::size_t b, std::size_t next, std::uint64_t remaining) {
  const std::size_t n = overflow.size();
  if (remaining == 0) {
    for (std::size_t nb = b + 1; nb < n; ++nb) {
      if (overflow[nb] > 0) return enumerate(overflow, rooms, nb, 0, overflow[nb]);
    }
    return true;
  }
  for (std::size_t l = next; l < n; ++l) {
    if (l == b) continue;
    auto& room = rooms[l];
    std::uint64_t& dir = l > b ? room.htl : room.lth;
    const std::uint64_t most = std::min({remaining, dir, room.pool});
    for (std::uint64_t x = most; x >= 1; --x) {
      dir -= x;
      room.pool -= x;
      const bool ok = enumerate(overflow, rooms, b, l + 1, remaining - x);
      dir += x;
      room.pool += x;
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Exhaustive search over integer packings with own usage min(N_i, BC_i).
/// Exponential; keep instances tiny.
inline bool brute_force_feasible(const BamConfig& cfg, const std::vector<std::uint64_t>& n) {
  std::uint64_t sum = 0;
  for (auto v : n) sum += v;
  if (sum > cfg.capacity().kbps()) return false;
  std::vector<std::uint64_t> overflow(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    overflow[i] = n[i] - std::min(n[i], cfg.bc(i).kbps());
  }
  auto rooms = initial_rooms(cfg, n);
  for (std::size_t b = 0; b < n.size(); ++b) {
    if (overflow[b] > 0) return detail::enumerate(overflow, rooms, b, 0, overflow[b]);
  }
  return true;
}

/// Serves borrowers in `order`, each taking as much as it can from the
/// nearest lender first. Sound but incomplete.
inline bool greedy_feasible(const BamConfig& cfg, const std::vector<std::uint64_t>& n,
                            const std::vector<std::size_t>& order) {
  auto rooms = initial_rooms(cfg, n);
  const std::size_t c = n.size();
  for (std::size_t b : order) {
    std::uint64_t need = n[b] - std::min(n[b], cfg.bc(b).kbps());
    std::vector<std::size_t> lenders;
    for (std::size_t l = 0; l < c; ++l) {
      if (l != b) lenders.push_back(l);
    }
    std::stable_sort(lenders.begin(), lenders.end(), [b](std::size_t x, std::size_t y) {
      auto dist = [b](std::size_t l) { return l > b ? l - b : b - l; };
      return dist(x) < dist(y);
    });
    for (std::size_t l : lenders) {
      auto& dir = l > b ? rooms[l].htl : rooms[l].lth;
      const std::uint64_t take = std::min({need, dir, rooms[l].pool});
      dir -= take;
      rooms[l].pool -= take;
      need -= take;
    }
    if (need > 0) return false;
  }
  return true;
}

inline std::vector<Bandwidth> to_bandwidths(const std::vector<std::uint64_t>& v) {
  std::vector<Bandwidth> out;
  for (auto x : v) out.emplace_back(x);
  return out;
}

/// Random valid config with `classes` classes on a link of `capacity`
/// units; BCs sum to at most capacity and caps are arbitrary within BC.
inline BamConfig random_config(std::mt19937_64& rng, std::size_t classes, std::uint64_t capacity,
                               bool fill_capacity = false) {
  std::vector<std::uint64_t> bcs(classes, 0);
  std::uint64_t budget =
      fill_capacity ? capacity : std::uniform_int_distribution<std::uint64_t>(0, capacity)(rng);
  // Random composition of budget into `classes` parts.
  std::vector<std::uint64_t> cuts{0, budget};
  for (std::size_t i = 1; i < classes; ++i) {
    cuts.push_back(std::uniform_int_distribution<std::uint64_t>(0, budget)(rng));
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i < classes; ++i) bcs[i] = cuts[i + 1] - cuts[i];

  RawConfig raw{Bandwidth{capacity}, {}};
  for (auto bc : bcs) {
    std::uniform_int_distribution<std::uint64_t> cap(0, bc);
    raw.classes.push_back({Bandwidth{bc}, Bandwidth{cap(rng)}, Bandwidth{cap(rng)}});
  }
  return validate_config(raw).value();
}

/// Random BC partition of exactly `capacity`, with every BC at least 1.
inline std::vector<Bandwidth> random_partition(std::mt19937_64& rng, std::size_t classes,
                                               std::uint64_t capacity) {
  std::vector<std::uint64_t> cuts{0, capacity};
  std::uniform_int_distribution<std::uint64_t> pick(1, capacity - 1);
  while (cuts.size() < classes + 1) {
    const auto x = pick(rng);
    if (std::find(cuts.begin(), cuts.end(), x) == cuts.end()) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Bandwidth> out;
  for (std::size_t i = 0; i < classes; ++i) out.emplace_back(cuts[i + 1] - cuts[i]);
  return out;
}

}  // namespace gbam::testing
