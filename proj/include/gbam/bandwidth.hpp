#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gbam {

class BandwidthOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Non-negative bandwidth in integer kbps (1 Mbps = 1000 kbps).
///
/// Arithmetic is checked: overflow and subtraction below zero throw
/// BandwidthOverflow instead of wrapping.
class Bandwidth {
 public:
  using rep = std::uint64_t;

  constexpr Bandwidth() = default;
  constexpr explicit Bandwidth(rep kbps) : kbps_(kbps) {}

  static constexpr Bandwidth zero() { return Bandwidth{}; }
  static constexpr Bandwidth from_mbps(rep mbps) { return Bandwidth{mbps * 1000}; }

  constexpr rep kbps() const { return kbps_; }
  constexpr bool is_zero() const { return kbps_ == 0; }

  constexpr Bandwidth& operator+=(Bandwidth other) {
    if (kbps_ > std::numeric_limits<rep>::max() - other.kbps_) {
      throw BandwidthOverflow("bandwidth addition overflows");
    }
    kbps_ += other.kbps_;
    return *this;
  }

  constexpr Bandwidth& operator-=(Bandwidth other) {
    if (other.kbps_ > kbps_) {
      throw BandwidthOverflow("bandwidth subtraction below zero: " + std::to_string(kbps_) +
                              " - " + std::to_string(other.kbps_));
    }
    kbps_ -= other.kbps_;
    return *this;
  }

  friend constexpr Bandwidth operator+(Bandwidth a, Bandwidth b) { return a += b; }
  friend constexpr Bandwidth operator-(Bandwidth a, Bandwidth b) { return a -= b; }
  friend constexpr auto operator<=>(Bandwidth, Bandwidth) = default;

  /// a - b clamped at zero.
  friend constexpr Bandwidth saturating_sub(Bandwidth a, Bandwidth b) {
    return a.kbps_ > b.kbps_ ? Bandwidth{a.kbps_ - b.kbps_} : Bandwidth{};
  }

 private:
  rep kbps_ = 0;
};

namespace literals {
constexpr Bandwidth operator""_kbps(unsigned long long v) { return Bandwidth{v}; }
constexpr Bandwidth operator""_mbps(unsigned long long v) { return Bandwidth::from_mbps(v); }
}  // namespace literals

/// "248.80" for 248800 kbps. Locale independent.
std::string format_mbps(Bandwidth bw);

}  // namespace gbam
