#include "gbam/model.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace gbam {

std::string format_mbps(Bandwidth bw) {
  const auto whole = bw.kbps() / 1000;
  const auto frac = bw.kbps() % 1000;
  char buf[48];
  if (frac % 10 == 0) {
    std::snprintf(buf, sizeof buf, "%llu.%02llu", static_cast<unsigned long long>(whole),
                  static_cast<unsigned long long>(frac / 10));
  } else {
    std::snprintf(buf, sizeof buf, "%llu.%03llu", static_cast<unsigned long long>(whole),
                  static_cast<unsigned long long>(frac));
  }
  return buf;
}

const char* to_string(LoanDirection dir) {
  return dir == LoanDirection::kHighToLow ? "HTL" : "LTH";
}

std::string ConfigError::message() const {
  std::string out;
  switch (kind) {
    case ConfigErrorKind::kEmptyClassList:
      out = "EmptyClassList: at least one traffic class is required";
      break;
    case ConfigErrorKind::kTooManyClasses:
      out = "TooManyClasses: at most 8 traffic classes are supported";
      break;
    case ConfigErrorKind::kSumExceedsCapacity:
      out = "SumExceedsCapacity: sum of BCs exceeds link capacity";
      break;
    case ConfigErrorKind::kCapExceedsBc:
      out = std::string("CapExceedsBc: ") + (cap ? to_string(*cap) : "?") + " cap of class " +
            std::to_string(class_index.value_or(0)) + " exceeds its BC";
      break;
    case ConfigErrorKind::kPrivateExceedsBc:
      out = "PrivateExceedsBc: private bandwidth of class " +
            std::to_string(class_index.value_or(0)) + " exceeds its BC";
      break;
  }
  if (!detail.empty()) out += " (" + detail + ")";
  return out;
}

namespace {

std::string join_messages(const std::vector<ConfigError>& errors) {
  std::string out = "invalid G-BAM configuration";
  for (const auto& e : errors) out += "; " + e.message();
  return out;
}

std::string kbps_text(Bandwidth b) { return std::to_string(b.kbps()) + " kbps"; }

void require_index(const BamConfig& cfg, ClassIndex i) {
  if (i >= cfg.class_count()) {
    throw std::out_of_range("class index " + std::to_string(i) + " out of range for " +
                            std::to_string(cfg.class_count()) + " classes");
  }
}

}  // namespace

InvalidConfig::InvalidConfig(std::vector<ConfigError> errors)
    : std::invalid_argument(join_messages(errors)), errors_(std::move(errors)) {}

const ClassConfig& BamConfig::at(ClassIndex i) const {
  require_index(*this, i);
  return classes_[i];
}

Bandwidth BamConfig::bc_sum() const {
  Bandwidth sum;
  for (const auto& c : classes_) sum += c.bc;
  return sum;
}

std::string BamConfig::digest() const {
  std::string text = "gbam-v1;" + std::to_string(capacity_.kbps());
  for (const auto& c : classes_) {
    text += ";" + std::to_string(c.bc.kbps()) + "," + std::to_string(c.htl_cap.kbps()) + "," +
            std::to_string(c.lth_cap.kbps());
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const BamConfig& ConfigResult::value() const {
  if (!config) throw InvalidConfig(errors);
  return *config;
}

ConfigResult validate_config(const RawConfig& raw) {
  ConfigResult result;
  if (raw.classes.empty()) {
    result.errors.push_back({ConfigErrorKind::kEmptyClassList, {}, {}, {}});
  }
  if (raw.classes.size() > kMaxClasses) {
    result.errors.push_back({ConfigErrorKind::kTooManyClasses, {}, {},
                             std::to_string(raw.classes.size()) + " classes given"});
  }

  // Sum in 128 bits so absurd raw input is reported, not thrown.
  unsigned __int128 sum = 0;
  for (const auto& c : raw.classes) sum += c.bc.kbps();
  if (sum > raw.capacity.kbps()) {
    result.errors.push_back(
        {ConfigErrorKind::kSumExceedsCapacity, {}, {},
         "capacity " + kbps_text(raw.capacity) +
             (sum <= UINT64_MAX ? ", sum " + std::to_string(static_cast<std::uint64_t>(sum)) +
                                      " kbps"
                                : std::string())});
  }

  for (ClassIndex i = 0; i < raw.classes.size(); ++i) {
    const auto& c = raw.classes[i];
    if (c.htl_cap > c.bc) {
      result.errors.push_back({ConfigErrorKind::kCapExceedsBc, i, LoanDirection::kHighToLow,
                               kbps_text(c.htl_cap) + " > " + kbps_text(c.bc)});
    }
    if (c.lth_cap > c.bc) {
      result.errors.push_back({ConfigErrorKind::kCapExceedsBc, i, LoanDirection::kLowToHigh,
                               kbps_text(c.lth_cap) + " > " + kbps_text(c.bc)});
    }
  }

  if (result.errors.empty()) result.config = BamConfig(raw.capacity, raw.classes);
  return result;
}

Bandwidth private_bandwidth(const BamConfig& cfg, ClassIndex i) {
  const auto& c = cfg.at(i);
  return c.bc - std::max(c.htl_cap, c.lth_cap);
}

Bandwidth static_max_allocation(const BamConfig& cfg, ClassIndex i) {
  Bandwidth bound = cfg.bc(i);
  for (ClassIndex j = i + 1; j < cfg.class_count(); ++j) bound += cfg.htl_cap(j);
  for (ClassIndex k = 0; k < i; ++k) bound += cfg.lth_cap(k);
  return bound;
}

Bandwidth effective_max_allocation(const BamConfig& cfg, ClassIndex i) {
  return std::min(static_max_allocation(cfg, i), cfg.capacity());
}

namespace {

Bandwidth lender_pool(const BamConfig& cfg, ClassIndex i, Bandwidth own_usage) {
  const auto& c = cfg.at(i);
  if (own_usage > c.bc) {
    throw std::invalid_argument("own usage of class " + std::to_string(i) +
                                " exceeds its BC: " + kbps_text(own_usage) + " > " +
                                kbps_text(c.bc));
  }
  return c.bc - std::max(private_bandwidth(cfg, i), own_usage);
}

}  // namespace

Bandwidth loanable(const BamConfig& cfg, ClassIndex i, Bandwidth own_usage,
                   Bandwidth already_lent, LoanDirection dir) {
  const Bandwidth pool = lender_pool(cfg, i, own_usage);
  return saturating_sub(std::min(cfg.cap(i, dir), pool), already_lent);
}

Bandwidth loanable_residual(const BamConfig& cfg, ClassIndex i, Bandwidth own_usage,
                            Bandwidth lent_dir, Bandwidth lent_total, LoanDirection dir) {
  const Bandwidth pool = lender_pool(cfg, i, own_usage);
  return std::min(saturating_sub(cfg.cap(i, dir), lent_dir), saturating_sub(pool, lent_total));
}

Bandwidth LoanMatrix::borrowed_by(ClassIndex borrower) const {
  Bandwidth sum;
  for (ClassIndex j = 0; j < n_; ++j) sum += get(borrower, j);
  return sum;
}

Bandwidth LoanMatrix::borrowed_by(ClassIndex borrower, LoanDirection dir) const {
  Bandwidth sum;
  // HTL loans come from higher classes, LTH loans from lower ones.
  if (dir == LoanDirection::kHighToLow) {
    for (ClassIndex j = borrower + 1; j < n_; ++j) sum += get(borrower, j);
  } else {
    for (ClassIndex j = 0; j < borrower; ++j) sum += get(borrower, j);
  }
  return sum;
}

Bandwidth LoanMatrix::lent_by(ClassIndex lender) const {
  Bandwidth sum;
  for (ClassIndex i = 0; i < n_; ++i) sum += get(i, lender);
  return sum;
}

Bandwidth LoanMatrix::lent_by(ClassIndex lender, LoanDirection dir) const {
  Bandwidth sum;
  if (dir == LoanDirection::kHighToLow) {
    for (ClassIndex i = 0; i < lender; ++i) sum += get(i, lender);
  } else {
    for (ClassIndex i = lender + 1; i < n_; ++i) sum += get(i, lender);
  }
  return sum;
}

bool LoanMatrix::all_zero() const {
  return std::all_of(cells_.begin(), cells_.end(), [](Bandwidth b) { return b.is_zero(); });
}

Bandwidth dynamic_bound(const BamConfig& cfg, const LoanPacking& packing, ClassIndex i) {
  require_index(cfg, i);
  const auto n = cfg.class_count();
  if (packing.own_usage.size() != n || packing.lent.size() != n) {
    throw std::invalid_argument("packing size does not match class count");
  }
  auto avail = [&](ClassIndex lender, LoanDirection dir) {
    // Loans already made to i are part of what i can reach, so they are not
    // subtracted.
    const Bandwidth to_i = packing.lent.get(i, lender);
    return loanable_residual(cfg, lender, packing.own_usage[lender],
                             packing.lent.lent_by(lender, dir) - to_i,
                             packing.lent.lent_by(lender) - to_i, dir);
  };
  Bandwidth bound = cfg.bc(i);
  for (ClassIndex j = i + 1; j < n; ++j) bound += avail(j, LoanDirection::kHighToLow);
  for (ClassIndex k = 0; k < i; ++k) bound += avail(k, LoanDirection::kLowToHigh);
  return bound;
}

namespace {

BamConfig build(std::span<const Bandwidth> bcs, Bandwidth capacity,
                const std::vector<Bandwidth>& htl, const std::vector<Bandwidth>& lth) {
  RawConfig raw{capacity, {}};
  for (std::size_t i = 0; i < bcs.size(); ++i) raw.classes.push_back({bcs[i], htl[i], lth[i]});
  return validate_config(raw).value();
}

}  // namespace

BamConfig mam_config(std::span<const Bandwidth> bcs, Bandwidth capacity) {
  const std::vector<Bandwidth> zeros(bcs.size());
  return build(bcs, capacity, zeros, zeros);
}

BamConfig rdm_config(std::span<const Bandwidth> bcs, Bandwidth capacity) {
  std::vector<Bandwidth> htl(bcs.begin(), bcs.end());
  if (!htl.empty()) htl.front() = Bandwidth{};
  return build(bcs, capacity, htl, std::vector<Bandwidth>(bcs.size()));
}

BamConfig alloctc_config(std::span<const Bandwidth> bcs, Bandwidth capacity) {
  std::vector<Bandwidth> htl(bcs.begin(), bcs.end());
  std::vector<Bandwidth> lth(bcs.begin(), bcs.end());
  if (!htl.empty()) {
    htl.front() = Bandwidth{};
    lth.back() = Bandwidth{};
  }
  return build(bcs, capacity, htl, lth);
}

BamConfig grdm_config(std::span<const Bandwidth> bcs, std::span<const Bandwidth> privates,
                      Bandwidth capacity) {
  if (privates.size() != bcs.size()) {
    throw std::invalid_argument("grdm_config: privates and bcs differ in length");
  }
  std::vector<ConfigError> errors;
  std::vector<Bandwidth> htl(bcs.size());
  for (std::size_t i = 0; i < bcs.size(); ++i) {
    if (privates[i] > bcs[i]) {
      errors.push_back({ConfigErrorKind::kPrivateExceedsBc, i, {},
                        kbps_text(privates[i]) + " > " + kbps_text(bcs[i])});
    } else if (i > 0) {
      htl[i] = bcs[i] - privates[i];
    }
  }
  if (!errors.empty()) {
    RawConfig raw{capacity, {}};
    for (auto b : bcs) raw.classes.push_back({b, {}, {}});
    auto rest = validate_config(raw).errors;
    errors.insert(errors.end(), rest.begin(), rest.end());
    throw InvalidConfig(std::move(errors));
  }
  return build(bcs, capacity, htl, std::vector<Bandwidth>(bcs.size()));
}

}  // namespace gbam
