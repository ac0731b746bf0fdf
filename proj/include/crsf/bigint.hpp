#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace crsf {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow2(std::uint64_t k) {
  BigInt r = 1;
  r <<= static_cast<unsigned>(k);
  return r;
}

// Decimal rendering of num/den with `digits` fractional digits, rounded half
// away from zero. Pure integer arithmetic, so the text is platform-independent.
inline std::string format_ratio(const BigInt& num, const BigInt& den, unsigned digits) {
  if (den <= 0) throw std::domain_error("format_ratio needs a positive denominator");
  const bool negative = num < 0;
  BigInt a = negative ? BigInt(-num) : num;
  BigInt scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  BigInt scaled = (a * scale * 2 + den) / (den * 2);
  const BigInt whole = scaled / scale;
  BigInt frac = scaled % scale;
  std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
  if (digits > 0) {
    std::string fs = frac.str();
    out += '.';
    out += std::string(digits - fs.size(), '0');
    out += fs;
  }
  return out;
}

}  // namespace crsf
