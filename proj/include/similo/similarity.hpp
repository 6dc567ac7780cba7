#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "similo/detail/text.hpp"
#include "similo/levenshtein.hpp"

namespace similo {

// How an edit distance L is turned into a similarity in [0,1].
enum class StringNormalization {
  // 1 - L / max(|a|, |b|). Reproduces the published comparison values.
  MaxLength,
  // 1 - 2L / (|a| + |b| + L), the generalized Levenshtein normalization.
  Ned2,
};

inline double normalize_distance(std::size_t distance, std::size_t len_a, std::size_t len_b,
                                 StringNormalization mode) {
  auto l = static_cast<double>(distance);
  switch (mode) {
    case StringNormalization::Ned2: {
      double denom = static_cast<double>(len_a + len_b) + l;
      return denom == 0 ? 1.0 : 1.0 - 2.0 * l / denom;
    }
    case StringNormalization::MaxLength:
    default: {
      auto longest = static_cast<double>(std::max(len_a, len_b));
      return longest == 0 ? 1.0 : 1.0 - l / longest;
    }
  }
}

// Both blank scores 1, exactly one blank scores 0. Case-sensitive.
inline double string_similarity(std::string_view a, std::string_view b,
                                StringNormalization mode = StringNormalization::MaxLength) {
  bool blank_a = detail::is_blank(a);
  bool blank_b = detail::is_blank(b);
  if (blank_a && blank_b) return 1.0;
  if (blank_a || blank_b) return 0.0;
  if (a == b) return 1.0;
  std::size_t len_a = a.size();
  std::size_t len_b = b.size();
  if (!detail::is_ascii(a) || !detail::is_ascii(b)) {
    len_a = detail::decode_utf8(a).size();
    len_b = detail::decode_utf8(b).size();
  }
  return normalize_distance(levenshtein(a, b), len_a, len_b, mode);
}

// Case-insensitive equality; blank never matches, not even blank.
inline double exact_similarity(std::string_view a, std::string_view b) {
  if (detail::is_blank(a) || detail::is_blank(b)) return 0.0;
  return detail::iequals(a, b) ? 1.0 : 0.0;
}

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Linear falloff with Euclidean distance, zero at `radius` and beyond.
inline double location_similarity(Point p1, Point p2, double radius = 100.0) {
  double d = std::hypot(p1.x - p2.x, p1.y - p2.y);
  if (radius <= 0) return d == 0 ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - d / radius);
}

// Relative difference of two non-negative magnitudes (area, shape).
inline double scalar_similarity(double v1, double v2) {
  double hi = std::max(v1, v2);
  if (hi <= 0) return 1.0;
  return 1.0 - std::min(1.0, std::abs(v1 - v2) / hi);
}

// |A ∩ B| / max(|A|, |B|) over sorted, deduplicated word lists.
inline double word_set_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t largest = std::max(a.size(), b.size());
  if (largest == 0) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(largest);
}

}  // namespace similo
