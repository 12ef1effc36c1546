#pragma once

#include <compare>
#include <cstddef>
#include <ostream>

namespace oiekit {

// Half-open interval [l, r) over a sentence's leaf-token indices.
struct TokenSpan {
  std::size_t l = 0;
  std::size_t r = 0;

  std::size_t size() const { return r - l; }
  bool contains(std::size_t i) const { return i >= l && i < r; }
  bool covers(const TokenSpan& other) const { return l <= other.l && r >= other.r; }
  bool overlaps(const TokenSpan& other) const { return l < other.r && other.l < r; }

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
  friend auto operator<=>(const TokenSpan&, const TokenSpan&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const TokenSpan& s) {
  return os << '[' << s.l << ',' << s.r << ')';
}

}  // namespace oiekit
