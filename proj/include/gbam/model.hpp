#pragma once

// Static G-BAM parameter model: per-class bandwidth constraints with
// high-to-low (HTL) and low-to-high (LTH) loan caps over a single link.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbam/bandwidth.hpp"

namespace gbam {

/// Traffic class position. Higher index means higher priority; 0 is best effort.
using ClassIndex = std::size_t;

inline constexpr std::size_t kMaxClasses = 8;

enum class LoanDirection { kHighToLow, kLowToHigh };

const char* to_string(LoanDirection dir);

struct ClassConfig {
  Bandwidth bc;
  Bandwidth htl_cap;  // lendable to lower-priority classes
  Bandwidth lth_cap;  // lendable to higher-priority classes

  friend bool operator==(const ClassConfig&, const ClassConfig&) = default;
};

struct RawConfig {
  Bandwidth capacity;
  std::vector<ClassConfig> classes;
};

enum class ConfigErrorKind {
  kEmptyClassList,
  kTooManyClasses,
  kSumExceedsCapacity,
  kCapExceedsBc,
  kPrivateExceedsBc,
};

struct ConfigError {
  ConfigErrorKind kind;
  std::optional<ClassIndex> class_index;
  std::optional<LoanDirection> cap;  // set for kCapExceedsBc
  std::string detail;

  std::string message() const;
  friend bool operator==(const ConfigError& a, const ConfigError& b) {
    return a.kind == b.kind && a.class_index == b.class_index && a.cap == b.cap;
  }
};

/// Thrown by the factory helpers when their input violates the model rules.
class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(std::vector<ConfigError> errors);
  const std::vector<ConfigError>& errors() const { return errors_; }

 private:
  std::vector<ConfigError> errors_;
};

struct ConfigResult;

/// A validated G-BAM configuration. Only obtainable through validate_config
/// (or the factories), so in every instance the BCs fit the link and each
/// cap fits its BC.
class BamConfig {
 public:
  Bandwidth capacity() const { return capacity_; }
  std::size_t class_count() const { return classes_.size(); }
  std::span<const ClassConfig> classes() const { return classes_; }
  const ClassConfig& at(ClassIndex i) const;

  Bandwidth bc(ClassIndex i) const { return at(i).bc; }
  Bandwidth htl_cap(ClassIndex i) const { return at(i).htl_cap; }
  Bandwidth lth_cap(ClassIndex i) const { return at(i).lth_cap; }
  Bandwidth cap(ClassIndex i, LoanDirection dir) const {
    return dir == LoanDirection::kHighToLow ? htl_cap(i) : lth_cap(i);
  }
  Bandwidth bc_sum() const;

  RawConfig raw() const { return {capacity_, classes_}; }

  /// FNV-1a over the canonical text form; stable across platforms.
  std::string digest() const;

  friend bool operator==(const BamConfig&, const BamConfig&) = default;

 private:
  friend ConfigResult validate_config(const RawConfig& raw);
  BamConfig(Bandwidth capacity, std::vector<ClassConfig> classes)
      : capacity_(capacity), classes_(std::move(classes)) {}

  Bandwidth capacity_;
  std::vector<ClassConfig> classes_;
};

struct ConfigResult {
  std::optional<BamConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const { return config.has_value(); }
  /// Returns the config or throws InvalidConfig with every error.
  const BamConfig& value() const;
};

/// Checks that BCs fit the link, caps fit their BC and the class count is
/// in range; reports every violation.
ConfigResult validate_config(const RawConfig& raw);

/// BC_i - max(HTL_i, LTH_i).
Bandwidth private_bandwidth(const BamConfig& cfg, ClassIndex i);

/// Design-time bound on N_i: BC_i + sum_{j>i} HTL_j + sum_{k<i} LTH_k.
/// Not clamped to the link capacity; see effective_max_allocation.
Bandwidth static_max_allocation(const BamConfig& cfg, ClassIndex i);

/// min(static_max_allocation, capacity).
Bandwidth effective_max_allocation(const BamConfig& cfg, ClassIndex i);

/// Bandwidth class i can still lend in `dir`:
///   max(0, min(cap_dir, BC_i - max(PRIVATE_i, own_usage)) - already_lent).
/// own_usage is the part of the class's load served from its own BC.
/// Throws std::invalid_argument if own_usage > BC_i.
Bandwidth loanable(const BamConfig& cfg, ClassIndex i, Bandwidth own_usage,
                   Bandwidth already_lent, LoanDirection dir);

/// Direction-aware residual used when a lender has loans outstanding in
/// both directions: min(cap_dir - lent_dir, pool - lent_total), clamped at 0.
/// Equals loanable() when lent_total == lent_dir.
Bandwidth loanable_residual(const BamConfig& cfg, ClassIndex i, Bandwidth own_usage,
                            Bandwidth lent_dir, Bandwidth lent_total, LoanDirection dir);

/// lent[borrower][lender]; diagonal is always zero.
class LoanMatrix {
 public:
  LoanMatrix() = default;
  explicit LoanMatrix(std::size_t classes)
      : n_(classes), cells_(classes * classes, Bandwidth{}) {}

  std::size_t size() const { return n_; }
  Bandwidth get(ClassIndex borrower, ClassIndex lender) const {
    return cells_.at(borrower * n_ + lender);
  }
  void set(ClassIndex borrower, ClassIndex lender, Bandwidth v) {
    if (borrower == lender && !v.is_zero()) {
      throw std::invalid_argument("a class cannot lend to itself");
    }
    cells_.at(borrower * n_ + lender) = v;
  }

  Bandwidth borrowed_by(ClassIndex borrower) const;
  Bandwidth borrowed_by(ClassIndex borrower, LoanDirection dir) const;
  Bandwidth lent_by(ClassIndex lender) const;
  Bandwidth lent_by(ClassIndex lender, LoanDirection dir) const;
  bool all_zero() const;

  friend bool operator==(const LoanMatrix&, const LoanMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Bandwidth> cells_;
};

/// Per-class own-BC usage plus who lends what to whom.
struct LoanPacking {
  std::vector<Bandwidth> own_usage;
  LoanMatrix lent;

  static LoanPacking empty(std::size_t classes) {
    return {std::vector<Bandwidth>(classes), LoanMatrix(classes)};
  }
  friend bool operator==(const LoanPacking&, const LoanPacking&) = default;
};

/// Runtime bound on N_i:
///   BC_i + sum_{j>i} avail_HTL(j) + sum_{k<i} avail_LTH(k)
/// where avail is each lender's residual after loans it has made to classes
/// other than i. With no loans outstanding this is the textbook rule.
Bandwidth dynamic_bound(const BamConfig& cfg, const LoanPacking& packing, ClassIndex i);

/// Fully private classes, no sharing.
BamConfig mam_config(std::span<const Bandwidth> bcs, Bandwidth capacity);
/// HTL loans at 100% of BC (class 0 has nobody below it).
BamConfig rdm_config(std::span<const Bandwidth> bcs, Bandwidth capacity);
/// HTL and LTH loans at 100% of BC, except at the ends of the priority range.
BamConfig alloctc_config(std::span<const Bandwidth> bcs, Bandwidth capacity);
/// RDM with a configurable private part per class; class 0 stays fully private.
BamConfig grdm_config(std::span<const Bandwidth> bcs, std::span<const Bandwidth> privates,
                      Bandwidth capacity);

}  // namespace gbam
