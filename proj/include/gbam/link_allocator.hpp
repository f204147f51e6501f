#pragma once

// Stateful G-BAM admission control for a single link.
//
// Admission is a feasibility question over class totals: can every class's
// load above its own BC be served by loans that respect each lender's
// direction caps, its private floor and its own usage? That is answered
// exactly with a small max-flow problem
//
//   source -> borrower b            (overflow O_b = N_b - min(N_b, BC_b))
//   borrower b -> HTL node of l     (l > b)
//   borrower b -> LTH node of l     (l < b)
//   HTL/LTH node of l -> lender l   (htl_cap_l / lth_cap_l)
//   lender l -> sink                (BC_l - max(PRIVATE_l, U_l))
//
// and feasibility holds iff the max flow saturates every overflow.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gbam/engine.hpp"
#include "gbam/model.hpp"

namespace gbam {

struct FeasibilityResult {
  bool feasible = false;
  /// Canonical packing, present iff feasible.
  std::optional<LoanPacking> packing;
};

/// Exact feasibility of `totals` under `cfg`, with the canonical packing.
///
/// Each class uses its own BC first (U_i = min(N_i, BC_i)). Loans are then
/// assigned borrower by borrower in ascending class order; for each borrower
/// lenders are visited nearest-priority first (lower index on ties) and given
/// the largest amount that still leaves the remainder feasible.
/// Throws std::invalid_argument on a length mismatch.
FeasibilityResult feasible(const BamConfig& cfg, std::span<const Bandwidth> totals);

/// Same verdict as feasible(), without building the packing.
bool is_feasible(const BamConfig& cfg, std::span<const Bandwidth> totals);

/// Largest extra bandwidth class i could be granted on top of a feasible
/// `totals` vector. Zero if `totals` itself is infeasible.
Bandwidth headroom(const BamConfig& cfg, std::span<const Bandwidth> totals, ClassIndex i);

/// Checks every LinkState invariant for a totals vector and a packing of it.
/// Returns one human-readable line per violation; empty means clean.
std::vector<std::string> check_invariants(const BamConfig& cfg,
                                          std::span<const Bandwidth> totals,
                                          const LoanPacking& packing);

struct LinkSnapshot {
  std::vector<Bandwidth> totals;      // N_i
  std::vector<Bandwidth> own_usage;   // U_i
  LoanMatrix lent;                    // lent[borrower][lender]
  std::vector<Bandwidth> htl_available;  // runtime HTL_DISP_i
  std::vector<Bandwidth> lth_available;  // runtime LTH_DISP_i
  Bandwidth free;
  std::vector<Bandwidth> dynamic_bounds;

  friend bool operator==(const LinkSnapshot&, const LinkSnapshot&) = default;
};

enum class PackingMode {
  kEager,  // recompute the canonical packing on every admit/release
  kLazy,   // only when snapshot()/packing() asks for it
};

class LinkAllocator final : public AdmissionEngine {
 public:
  explicit LinkAllocator(BamConfig cfg, PackingMode mode = PackingMode::kEager,
                         std::string label = "gbam");

  const BamConfig& config() const { return cfg_; }

  std::string name() const override { return label_; }
  Bandwidth capacity() const override { return cfg_.capacity(); }
  std::size_t class_count() const override { return cfg_.class_count(); }

  Decision admit(const LspRequest& req) override;
  ReleaseRecord release(LspId id) override;

  const std::vector<Bandwidth>& totals() const override { return totals_; }
  LoanSplit loan_split() const override;
  std::unique_ptr<AdmissionEngine> fresh() const override;

  const LoanPacking& packing() const;
  LinkSnapshot snapshot() const;
  std::size_t lsp_count() const { return lsps_.size(); }
  bool contains(LspId id) const { return lsps_.count(id) != 0; }

 private:
  struct Entry {
    ClassIndex class_index;
    Bandwidth bandwidth;
  };

  void refresh_packing() const;

  BamConfig cfg_;
  PackingMode mode_;
  std::string label_;
  std::map<LspId, Entry> lsps_;
  std::unordered_set<LspId, LspIdHash> retired_;
  std::vector<Bandwidth> totals_;
  mutable std::optional<LoanPacking> packing_;
};

}  // namespace gbam
