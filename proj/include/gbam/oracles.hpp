#pragma once

// Reference admission rules for MAM, RDM and AllocTC-Sharing, written
// directly from each model's sharing rule. They share no code with the
// flow-based LinkAllocator so that agreement between the two is evidence.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gbam/engine.hpp"

namespace gbam {

enum class OracleModel { kMam, kRdm, kAllocTc };

const char* to_string(OracleModel model);

struct OracleState {
  OracleModel model;
  std::vector<Bandwidth> bcs;
  Bandwidth capacity;
  std::vector<Bandwidth> totals;
  std::map<LspId, ReleaseRecord> lsps;

  static OracleState make(OracleModel model, std::vector<Bandwidth> bcs, Bandwidth capacity);
};

/// MAM: N_c + b <= BC_c, classes fully isolated.
Decision mam_admit(OracleState& state, const LspRequest& req);
/// RDM (per-class BC frame): for every t <= c, sum_{k>=t} N_k + b <= sum_{k>=t} BC_k.
Decision rdm_admit(OracleState& state, const LspRequest& req);
/// AllocTC-Sharing: sum_k N_k + b <= capacity.
Decision alloctc_admit(OracleState& state, const LspRequest& req);
/// Dispatches on state.model.
Decision oracle_admit(OracleState& state, const LspRequest& req);
ReleaseRecord oracle_release(OracleState& state, LspId id);

// Stateless forms: how much more class c may take given the totals. The
// request is admissible iff its bandwidth does not exceed this.
Bandwidth mam_headroom(std::span<const Bandwidth> bcs, std::span<const Bandwidth> totals,
                       ClassIndex c);
Bandwidth rdm_headroom(std::span<const Bandwidth> bcs, std::span<const Bandwidth> totals,
                       ClassIndex c);
Bandwidth alloctc_headroom(Bandwidth capacity, std::span<const Bandwidth> totals);

class OracleEngine final : public AdmissionEngine {
 public:
  OracleEngine(OracleModel model, std::vector<Bandwidth> bcs, Bandwidth capacity);

  const OracleState& state() const { return state_; }

  std::string name() const override { return to_string(state_.model); }
  Bandwidth capacity() const override { return state_.capacity; }
  std::size_t class_count() const override { return state_.bcs.size(); }
  Decision admit(const LspRequest& req) override { return oracle_admit(state_, req); }
  ReleaseRecord release(LspId id) override { return oracle_release(state_, id); }
  const std::vector<Bandwidth>& totals() const override { return state_.totals; }
  /// MAM never borrows, RDM borrows only high-to-low. For AllocTC the split
  /// follows nearest-lender-first, which is exact there since any lender
  /// can serve any borrower.
  LoanSplit loan_split() const override;
  std::unique_ptr<AdmissionEngine> fresh() const override;

 private:
  OracleState state_;
};

// --- Trace replay --------------------------------------------------------

struct AdmitOp {
  LspRequest request;
};
struct ReleaseOp {
  LspId id;
};
using TraceOp = std::variant<AdmitOp, ReleaseOp>;

struct StepResult {
  enum class Kind { kAdmit, kRelease, kReleaseOfBlocked };
  Kind kind;
  Decision decision;              // kAdmit
  std::optional<ReleaseRecord> released;  // kRelease

  bool same_as(const StepResult& other) const;
};

using DecisionTrace = std::vector<StepResult>;

/// Throws AdmissionError(kMalformedTrace) if an admit id repeats, or a
/// release names an id that was never offered or is released twice.
void check_trace(std::span<const TraceOp> trace);

/// Replays `trace` on a fresh copy of `prototype`. Releasing an id whose
/// admit was blocked is a no-op reported as kReleaseOfBlocked, so a single
/// trace can be fed to engines that disagree.
DecisionTrace replay(std::span<const TraceOp> trace, const AdmissionEngine& prototype);

}  // namespace gbam
