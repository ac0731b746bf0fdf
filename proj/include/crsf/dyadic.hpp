#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "crsf/bigint.hpp"

namespace crsf {

// Exact value numerator / 2^log2_denominator, kept in lowest terms.
class DyadicRational {
 public:
  DyadicRational() = default;
  DyadicRational(BigInt numerator, std::uint64_t log2_denominator = 0)
      : num_(std::move(numerator)), log2_den_(log2_denominator) {
    normalize();
  }

  const BigInt& numerator() const noexcept { return num_; }
  std::uint64_t log2_denominator() const noexcept { return log2_den_; }

  DyadicRational& operator+=(const DyadicRational& o) {
    if (log2_den_ >= o.log2_den_) {
      num_ += o.num_ << static_cast<unsigned>(log2_den_ - o.log2_den_);
    } else {
      num_ = (num_ << static_cast<unsigned>(o.log2_den_ - log2_den_)) + o.num_;
      log2_den_ = o.log2_den_;
    }
    normalize();
    return *this;
  }

  friend DyadicRational operator+(DyadicRational a, const DyadicRational& b) {
    a += b;
    return a;
  }

  // Multiplies by 2^k exactly.
  DyadicRational scaled_by_pow2(std::int64_t k) const {
    if (k >= 0) {
      const auto uk = static_cast<std::uint64_t>(k);
      if (uk >= log2_den_) return DyadicRational(num_ << static_cast<unsigned>(uk - log2_den_), 0);
      return DyadicRational(num_, log2_den_ - uk);
    }
    return DyadicRational(num_, log2_den_ + static_cast<std::uint64_t>(-k));
  }

  // Integer value, only when the denominator is 1.
  bool is_integer() const noexcept { return log2_den_ == 0; }

  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;

  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const std::uint64_t k = std::max(a.log2_den_, b.log2_den_);
    const BigInt lhs = a.num_ << static_cast<unsigned>(k - a.log2_den_);
    const BigInt rhs = b.num_ << static_cast<unsigned>(k - b.log2_den_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(pow2(log2_den_));
  }

  // "num" or "num/2^k".
  std::string to_string() const {
    if (log2_den_ == 0) return num_.str();
    return num_.str() + "/2^" + std::to_string(log2_den_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      log2_den_ = 0;
      return;
    }
    const auto tz = boost::multiprecision::lsb(num_ < 0 ? BigInt(-num_) : num_);
    const std::uint64_t shift = std::min<std::uint64_t>(tz, log2_den_);
    if (shift > 0) {
      num_ >>= static_cast<unsigned>(shift);
      log2_den_ -= shift;
    }
  }

  BigInt num_ = 0;
  std::uint64_t log2_den_ = 0;
};

}  // namespace crsf
