#include "gbam/link_allocator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "gbam/max_flow.hpp"

namespace gbam {

namespace {

constexpr std::uint64_t kMaxFlowValue = std::uint64_t{1} << 62;

// Node numbering of the admission flow network for C classes.
struct Layout {
  std::size_t classes;

  std::size_t source() const { return 0; }
  std::size_t borrower(ClassIndex b) const { return 1 + b; }
  std::size_t htl(ClassIndex l) const { return 1 + classes + l; }
  std::size_t lth(ClassIndex l) const { return 1 + 2 * classes + l; }
  std::size_t lender(ClassIndex l) const { return 1 + 3 * classes + l; }
  std::size_t sink() const { return 1 + 4 * classes; }
  std::size_t nodes() const { return 2 + 4 * classes; }
  std::size_t entry(ClassIndex borrower_class, ClassIndex lender_class) const {
    return lender_class > borrower_class ? htl(lender_class) : lth(lender_class);
  }
};

std::int64_t as_flow(Bandwidth b) {
  if (b.kbps() > kMaxFlowValue) throw std::overflow_error("bandwidth too large for flow solver");
  return static_cast<std::int64_t>(b.kbps());
}

void require_size(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  if (totals.size() != cfg.class_count()) {
    throw std::invalid_argument("totals length " + std::to_string(totals.size()) +
                                " does not match class count " +
                                std::to_string(cfg.class_count()));
  }
}

// Necessary condition: every unit of load sits inside some BC.
bool within_bc_sum(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  unsigned __int128 sum = 0;
  for (auto n : totals) sum += n.kbps();
  return sum <= cfg.bc_sum().kbps();
}

bool all_within_own_bc(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  for (ClassIndex i = 0; i < totals.size(); ++i) {
    if (totals[i] > cfg.bc(i)) return false;
  }
  return true;
}

struct Network {
  SmallFlowNetwork graph;
  std::int64_t demand = 0;
};

Network build_network(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  const Layout at{cfg.class_count()};
  Network net{SmallFlowNetwork(at.nodes()), 0};
  auto& g = net.graph;
  for (ClassIndex i = 0; i < at.classes; ++i) {
    const auto& c = cfg.at(i);
    const Bandwidth own = std::min(totals[i], c.bc);
    const std::int64_t overflow = as_flow(totals[i] - own);
    g.set_capacity(at.source(), at.borrower(i), overflow);
    net.demand += overflow;

    g.set_capacity(at.htl(i), at.lender(i), as_flow(c.htl_cap));
    g.set_capacity(at.lth(i), at.lender(i), as_flow(c.lth_cap));
    g.set_capacity(at.lender(i), at.sink(),
                   as_flow(c.bc - std::max(private_bandwidth(cfg, i), own)));

    for (ClassIndex l = 0; l < at.classes; ++l) {
      if (l != i) g.set_capacity(at.borrower(i), at.entry(i, l), SmallFlowNetwork::kUnbounded);
    }
  }
  return net;
}

// Shifts flow onto borrower->entry edges in canonical order, keeping every
// earlier edge's flow fixed. `g` must hold a flow saturating all overflows.
void canonicalize(const Layout& at, SmallFlowNetwork& g) {
  std::vector<bool> fixed(g.size() * g.size(), false);
  auto fix = [&](std::size_t u, std::size_t v) {
    fixed[u * g.size() + v] = true;
    fixed[v * g.size() + u] = true;
  };

  std::vector<ClassIndex> order(at.classes);
  for (ClassIndex b = 0; b < at.classes; ++b) {
    if (g.capacity(at.source(), at.borrower(b)) == 0) continue;
    std::iota(order.begin(), order.end(), ClassIndex{0});
    std::stable_sort(order.begin(), order.end(), [b](ClassIndex x, ClassIndex y) {
      const auto dx = x > b ? x - b : b - x;
      const auto dy = y > b ? y - b : b - y;
      return dx != dy ? dx < dy : x < y;
    });
    for (ClassIndex l : order) {
      if (l == b) continue;
      const std::size_t u = at.borrower(b);
      const std::size_t v = at.entry(b, l);

      // More flow on u->v means a circulation u->v ~> u in the residual graph
      // that avoids every fixed edge.
      SmallFlowNetwork r = g.residual_network();
      for (std::size_t x = 0; x < g.size(); ++x) {
        for (std::size_t y = 0; y < g.size(); ++y) {
          if (fixed[x * g.size() + y]) r.set_capacity(x, y, 0);
        }
      }
      const std::int64_t limit = r.capacity(u, v);
      r.set_capacity(u, v, 0);
      r.set_capacity(v, u, 0);
      const std::int64_t extra = r.augment(v, u, limit);
      if (extra > 0) {
        for (std::size_t x = 0; x < g.size(); ++x) {
          for (std::size_t y = 0; y < g.size(); ++y) {
            if (r.flow(x, y) > 0) g.push(x, y, r.flow(x, y));
          }
        }
        g.push(u, v, extra);
      }
      fix(u, v);
    }
  }
}

}  // namespace

bool is_feasible(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  require_size(cfg, totals);
  if (!within_bc_sum(cfg, totals)) return false;
  if (all_within_own_bc(cfg, totals)) return true;
  auto net = build_network(cfg, totals);
  const Layout at{cfg.class_count()};
  return net.graph.augment(at.source(), at.sink()) == net.demand;
}

FeasibilityResult feasible(const BamConfig& cfg, std::span<const Bandwidth> totals) {
  require_size(cfg, totals);
  const std::size_t n = cfg.class_count();
  if (!within_bc_sum(cfg, totals)) return {false, std::nullopt};

  LoanPacking packing = LoanPacking::empty(n);
  for (ClassIndex i = 0; i < n; ++i) packing.own_usage[i] = std::min(totals[i], cfg.bc(i));
  if (all_within_own_bc(cfg, totals)) return {true, std::move(packing)};

  const Layout at{n};
  auto net = build_network(cfg, totals);
  if (net.graph.augment(at.source(), at.sink()) != net.demand) return {false, std::nullopt};
  canonicalize(at, net.graph);

  for (ClassIndex b = 0; b < n; ++b) {
    for (ClassIndex l = 0; l < n; ++l) {
      if (l == b) continue;
      const auto f = net.graph.flow(at.borrower(b), at.entry(b, l));
      if (f > 0) packing.lent.set(b, l, Bandwidth{static_cast<std::uint64_t>(f)});
    }
  }
  return {true, std::move(packing)};
}

Bandwidth headroom(const BamConfig& cfg, std::span<const Bandwidth> totals, ClassIndex i) {
  require_size(cfg, totals);
  cfg.at(i);
  if (!is_feasible(cfg, totals)) return {};

  std::vector<Bandwidth> probe(totals.begin(), totals.end());
  const Bandwidth bc = cfg.bc(i);
  if (totals[i] < bc) {
    // Growing inside its own BC shrinks the class's lender pool, which may
    // strand loans it is currently making. Feasibility is monotone in N_i.
    probe[i] = bc;
    if (!is_feasible(cfg, probe)) {
      std::uint64_t lo = totals[i].kbps();
      std::uint64_t hi = bc.kbps();
      while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        probe[i] = Bandwidth{mid};
        (is_feasible(cfg, probe) ? lo : hi) = mid;
      }
      return Bandwidth{lo} - totals[i];
    }
  }

  // At or above its BC the class's pool is empty; what is left is pure loan.
  const Layout at{cfg.class_count()};
  auto net = build_network(cfg, probe);
  net.graph.augment(at.source(), at.sink());
  net.graph.set_capacity(at.source(), at.borrower(i),
                         net.graph.capacity(at.source(), at.borrower(i)) +
                             as_flow(cfg.capacity()));
  const auto extra = net.graph.augment(at.source(), at.sink());
  return (probe[i] - totals[i]) + Bandwidth{static_cast<std::uint64_t>(extra)};
}

std::vector<std::string> check_invariants(const BamConfig& cfg,
                                          std::span<const Bandwidth> totals,
                                          const LoanPacking& packing) {
  std::vector<std::string> out;
  const std::size_t n = cfg.class_count();
  if (totals.size() != n || packing.own_usage.size() != n || packing.lent.size() != n) {
    out.push_back("size mismatch between config, totals and packing");
    return out;
  }
  auto kb = [](Bandwidth b) { return std::to_string(b.kbps()); };
  auto cls = [](ClassIndex i) { return "class " + std::to_string(i) + ": "; };

  unsigned __int128 sum = 0;
  for (auto t : totals) sum += t.kbps();
  if (sum > cfg.capacity().kbps()) out.push_back("sum of N_i exceeds link capacity");

  for (ClassIndex i = 0; i < n; ++i) {
    const Bandwidth u = packing.own_usage[i];
    const Bandwidth borrowed = packing.lent.borrowed_by(i);
    if (u + borrowed != totals[i]) {
      out.push_back(cls(i) + "N_i " + kb(totals[i]) + " != U_i " + kb(u) + " + borrowed " +
                    kb(borrowed));
    }
    if (u > cfg.bc(i)) out.push_back(cls(i) + "U_i exceeds BC_i");
    if (u != std::min(totals[i], cfg.bc(i))) out.push_back(cls(i) + "own BC not used first");
    if (totals[i] > effective_max_allocation(cfg, i)) {
      out.push_back(cls(i) + "N_i " + kb(totals[i]) + " exceeds static max allocation " +
                    kb(effective_max_allocation(cfg, i)));
    }

    const Bandwidth lent_htl = packing.lent.lent_by(i, LoanDirection::kHighToLow);
    const Bandwidth lent_lth = packing.lent.lent_by(i, LoanDirection::kLowToHigh);
    const Bandwidth lent = lent_htl + lent_lth;
    if (lent_htl > cfg.htl_cap(i)) out.push_back(cls(i) + "HTL lending exceeds cap");
    if (lent_lth > cfg.lth_cap(i)) out.push_back(cls(i) + "LTH lending exceeds cap");
    if (lent + u > cfg.bc(i)) out.push_back(cls(i) + "lent + U_i exceeds BC_i");
    if (lent > cfg.bc(i) - private_bandwidth(cfg, i)) {
      out.push_back(cls(i) + "private bandwidth lent out");
    }
    if (u <= cfg.bc(i) && lent > cfg.bc(i) - std::max(private_bandwidth(cfg, i), u)) {
      out.push_back(cls(i) + "lending exceeds BC_i - max(PRIVATE_i, U_i)");
    }
  }
  if (out.empty()) {
    for (ClassIndex i = 0; i < n; ++i) {
      if (totals[i] > dynamic_bound(cfg, packing, i)) {
        out.push_back(cls(i) + "N_i exceeds dynamic bound");
      }
    }
  }
  return out;
}

LinkAllocator::LinkAllocator(BamConfig cfg, PackingMode mode, std::string label)
    : cfg_(std::move(cfg)),
      mode_(mode),
      label_(std::move(label)),
      totals_(cfg_.class_count()) {
  if (cfg_.capacity().kbps() > kMaxFlowValue) {
    throw std::invalid_argument("link capacity too large");
  }
  packing_ = LoanPacking::empty(cfg_.class_count());
}

Decision LinkAllocator::admit(const LspRequest& req) {
  if (req.class_index >= cfg_.class_count()) {
    throw AdmissionError(AdmissionErrorKind::kClassOutOfRange,
                         "class " + std::to_string(req.class_index) + " out of range");
  }
  if (lsps_.count(req.id) || retired_.count(req.id)) {
    throw AdmissionError(AdmissionErrorKind::kDuplicateLspId,
                         "LSP id " + std::to_string(req.id.value) + " already used");
  }

  if (!req.bandwidth.is_zero()) {
    std::vector<Bandwidth> next = totals_;
    next[req.class_index] += req.bandwidth;
    if (!is_feasible(cfg_, next)) {
      return Decision::blocked(
          saturating_sub(req.bandwidth, headroom(cfg_, totals_, req.class_index)));
    }
    totals_ = std::move(next);
    packing_.reset();
  }
  lsps_.emplace(req.id, Entry{req.class_index, req.bandwidth});
  if (mode_ == PackingMode::kEager) {
    refresh_packing();
    return Decision::admitted(*packing_);
  }
  return Decision::admitted();
}

ReleaseRecord LinkAllocator::release(LspId id) {
  auto it = lsps_.find(id);
  if (it == lsps_.end()) {
    throw AdmissionError(AdmissionErrorKind::kUnknownLspId,
                         "unknown LSP id " + std::to_string(id.value));
  }
  const ReleaseRecord record{id, it->second.class_index, it->second.bandwidth};
  lsps_.erase(it);
  retired_.insert(id);
  if (!record.bandwidth.is_zero()) {
    totals_[record.class_index] -= record.bandwidth;
    packing_.reset();
    if (mode_ == PackingMode::kEager) refresh_packing();
  }
  return record;
}

void LinkAllocator::refresh_packing() const {
  if (packing_) return;
  auto result = feasible(cfg_, totals_);
  if (!result.feasible) {
    // Only reachable if admission let an infeasible state through.
    throw std::logic_error("link state became infeasible");
  }
  packing_ = std::move(result.packing);
}

const LoanPacking& LinkAllocator::packing() const {
  refresh_packing();
  return *packing_;
}

LoanSplit LinkAllocator::loan_split() const {
  const auto& p = packing();
  LoanSplit split{std::vector<Bandwidth>(class_count()), std::vector<Bandwidth>(class_count())};
  for (ClassIndex i = 0; i < class_count(); ++i) {
    split.via_htl[i] = p.lent.borrowed_by(i, LoanDirection::kHighToLow);
    split.via_lth[i] = p.lent.borrowed_by(i, LoanDirection::kLowToHigh);
  }
  return split;
}

std::unique_ptr<AdmissionEngine> LinkAllocator::fresh() const {
  return std::make_unique<LinkAllocator>(cfg_, mode_, label_);
}

LinkSnapshot LinkAllocator::snapshot() const {
  const auto& p = packing();
  const std::size_t n = class_count();
  LinkSnapshot snap;
  snap.totals = totals_;
  snap.own_usage = p.own_usage;
  snap.lent = p.lent;
  Bandwidth used;
  for (ClassIndex i = 0; i < n; ++i) {
    used += totals_[i];
    const Bandwidth lent = p.lent.lent_by(i);
    snap.htl_available.push_back(loanable_residual(
        cfg_, i, p.own_usage[i], p.lent.lent_by(i, LoanDirection::kHighToLow), lent,
        LoanDirection::kHighToLow));
    snap.lth_available.push_back(loanable_residual(
        cfg_, i, p.own_usage[i], p.lent.lent_by(i, LoanDirection::kLowToHigh), lent,
        LoanDirection::kLowToHigh));
    snap.dynamic_bounds.push_back(dynamic_bound(cfg_, p, i));
  }
  snap.free = cfg_.capacity() - used;
  return snap;
}

}  // namespace gbam
