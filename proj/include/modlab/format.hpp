#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <string>

namespace modlab {

// Shortest decimal text that parses back to exactly `value`.
inline std::string shortest(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

// Fixed significant-digit formatting used for printed moduli and CSV tables.
inline std::string significant(double value, int digits = 12) {
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, digits);
  return std::string(buf.data(), res.ptr);
}

}  // namespace modlab
