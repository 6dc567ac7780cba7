#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "similo/detail/text.hpp"

namespace similo {

namespace detail {

// Bit masks of the positions at which each symbol occurs in the pattern,
// one 64-bit word per block of 64 pattern positions.
template <class CharT>
class PatternMasks {
 public:
  PatternMasks(std::basic_string_view<CharT> pattern) : words_((pattern.size() + 63) / 64) {
    ascii_.assign(256 * words_, 0);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      auto c = static_cast<std::uint32_t>(pattern[i]);
      std::uint64_t bit = std::uint64_t{1} << (i % 64);
      if (c < 256) {
        ascii_[c * words_ + i / 64] |= bit;
      } else {
        auto& v = other_[c];
        v.resize(words_, 0);
        v[i / 64] |= bit;
      }
    }
  }

  std::size_t words() const { return words_; }

  std::uint64_t get(std::size_t word, CharT ch) const {
    auto c = static_cast<std::uint32_t>(ch);
    if (c < 256) return ascii_[c * words_ + word];
    auto it = other_.find(c);
    return it == other_.end() ? 0 : it->second[word];
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> ascii_;
  std::unordered_map<std::uint32_t, std::vector<std::uint64_t>> other_;
};

// Myers' bit-vector algorithm in Hyyro's block formulation: the pattern runs
// down the columns in 64-row blocks, horizontal deltas carry between blocks.
template <class CharT>
std::size_t levenshtein_bitparallel(std::basic_string_view<CharT> pattern,
                                    std::basic_string_view<CharT> text) {
  const std::size_t m = pattern.size();
  PatternMasks<CharT> masks(pattern);
  const std::size_t words = masks.words();
  const std::uint64_t last = std::uint64_t{1} << ((m - 1) % 64);
  std::vector<std::uint64_t> vp(words, ~std::uint64_t{0});
  std::vector<std::uint64_t> vn(words, 0);
  std::size_t dist = m;

  for (CharT ch : text) {
    std::uint64_t hp_carry = 1;
    std::uint64_t hn_carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t eq = masks.get(w, ch);
      std::uint64_t pv = vp[w];
      std::uint64_t mv = vn[w];
      std::uint64_t x = eq | hn_carry;
      std::uint64_t d0 = (((x & pv) + pv) ^ pv) | x | mv;
      std::uint64_t hp = mv | ~(d0 | pv);
      std::uint64_t hn = pv & d0;
      std::uint64_t hp_in = hp_carry;
      std::uint64_t hn_in = hn_carry;
      if (w + 1 < words) {
        hp_carry = hp >> 63;
        hn_carry = hn >> 63;
      } else {
        hp_carry = (hp & last) != 0;
        hn_carry = (hn & last) != 0;
      }
      hp = (hp << 1) | hp_in;
      hn = (hn << 1) | hn_in;
      vp[w] = hn | ~(d0 | hp);
      vn[w] = hp & d0;
    }
    dist += hp_carry;
    dist -= hn_carry;
  }
  return dist;
}

template <class CharT>
std::size_t levenshtein_impl(std::basic_string_view<CharT> a, std::basic_string_view<CharT> b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  a.remove_prefix(prefix);
  b.remove_prefix(prefix);
  std::size_t suffix = 0;
  while (suffix < a.size() && suffix < b.size() && a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;
  a.remove_suffix(suffix);
  b.remove_suffix(suffix);
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  // Shorter string as the pattern keeps the block count minimal.
  if (a.size() > b.size()) std::swap(a, b);
  return levenshtein_bitparallel(a, b);
}

}  // namespace detail

// Unit-cost edit distance over Unicode code points (UTF-8 input).
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (detail::is_ascii(a) && detail::is_ascii(b)) return detail::levenshtein_impl(a, b);
  auto ua = detail::decode_utf8(a);
  auto ub = detail::decode_utf8(b);
  return detail::levenshtein_impl(std::u32string_view(ua), std::u32string_view(ub));
}

}  // namespace similo
