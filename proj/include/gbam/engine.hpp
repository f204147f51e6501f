#pragma once

// Types shared by every admission engine: the G-BAM link allocator and the
// classic MAM/RDM/AllocTC oracles.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbam/model.hpp"

namespace gbam {

struct LspId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(LspId, LspId) = default;
};

struct LspIdHash {
  std::size_t operator()(LspId id) const noexcept { return std::hash<std::uint64_t>{}(id.value); }
};

struct LspRequest {
  LspId id;
  ClassIndex class_index = 0;
  Bandwidth bandwidth;
};

enum class Outcome { kAdmitted, kBlocked };

struct Decision {
  Outcome outcome = Outcome::kBlocked;
  /// Requested bandwidth minus what the class could still have taken.
  /// Zero when admitted.
  Bandwidth shortfall;
  /// Canonical packing after an admission, when the engine tracks one.
  std::optional<LoanPacking> packing;

  static Decision admitted(std::optional<LoanPacking> packing = std::nullopt) {
    return {Outcome::kAdmitted, {}, std::move(packing)};
  }
  static Decision blocked(Bandwidth shortfall) { return {Outcome::kBlocked, shortfall, {}}; }

  bool is_admitted() const { return outcome == Outcome::kAdmitted; }
  /// Outcome and shortfall match; packing detail is ignored.
  bool same_verdict(const Decision& other) const {
    return outcome == other.outcome && shortfall == other.shortfall;
  }
};

struct ReleaseRecord {
  LspId id;
  ClassIndex class_index = 0;
  Bandwidth bandwidth;
  friend bool operator==(const ReleaseRecord&, const ReleaseRecord&) = default;
};

enum class AdmissionErrorKind { kDuplicateLspId, kClassOutOfRange, kUnknownLspId, kMalformedTrace };

class AdmissionError : public std::runtime_error {
 public:
  AdmissionError(AdmissionErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AdmissionErrorKind kind() const { return kind_; }

 private:
  AdmissionErrorKind kind_;
};

/// Per-class bandwidth currently served by loans, split by loan direction.
struct LoanSplit {
  std::vector<Bandwidth> via_htl;
  std::vector<Bandwidth> via_lth;
};

/// Single-link admission control. One writer at a time; instances are
/// independent of each other.
class AdmissionEngine {
 public:
  virtual ~AdmissionEngine() = default;

  virtual std::string name() const = 0;
  virtual Bandwidth capacity() const = 0;
  virtual std::size_t class_count() const = 0;

  virtual Decision admit(const LspRequest& req) = 0;
  virtual ReleaseRecord release(LspId id) = 0;

  /// N_i per class.
  virtual const std::vector<Bandwidth>& totals() const = 0;
  virtual LoanSplit loan_split() const = 0;

  /// An empty engine with the same configuration.
  virtual std::unique_ptr<AdmissionEngine> fresh() const = 0;
};

}  // namespace gbam
