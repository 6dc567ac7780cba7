#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "similo/detail/text.hpp"

namespace similo::detail {

// The named character references that show up in real pages often enough to
// matter for text comparison. Anything else is kept verbatim.
inline constexpr std::array<std::pair<std::string_view, char32_t>, 52> kNamedEntities{{
    {"AElig", 0xC6}, {"Aacute", 0xC1}, {"Eacute", 0xC9}, {"Uuml", 0xDC},
    {"aacute", 0xE1}, {"acute", 0xB4}, {"amp", '&'}, {"apos", '\''},
    {"auml", 0xE4}, {"bull", 0x2022}, {"ccedil", 0xE7}, {"cent", 0xA2},
    {"copy", 0xA9}, {"deg", 0xB0}, {"eacute", 0xE9}, {"egrave", 0xE8},
    {"euro", 0x20AC}, {"gt", '>'}, {"hellip", 0x2026}, {"iacute", 0xED},
    {"iexcl", 0xA1}, {"iquest", 0xBF}, {"laquo", 0xAB}, {"larr", 0x2190},
    {"ldquo", 0x201C}, {"lsaquo", 0x2039}, {"lsquo", 0x2018}, {"lt", '<'},
    {"mdash", 0x2014}, {"middot", 0xB7}, {"nbsp", 0xA0}, {"ndash", 0x2013},
    {"ntilde", 0xF1}, {"oacute", 0xF3}, {"ouml", 0xF6}, {"para", 0xB6},
    {"pound", 0xA3}, {"quot", '"'}, {"raquo", 0xBB}, {"rarr", 0x2192},
    {"rdquo", 0x201D}, {"reg", 0xAE}, {"rsaquo", 0x203A}, {"rsquo", 0x2019},
    {"sect", 0xA7}, {"szlig", 0xDF}, {"times", 0xD7}, {"trade", 0x2122},
    {"uacute", 0xFA}, {"uarr", 0x2191}, {"uuml", 0xFC}, {"yen", 0xA5},
}};

// Legacy references that browsers accept without the trailing semicolon.
inline constexpr std::array<std::string_view, 7> kLegacyNoSemicolon{
    "amp", "copy", "gt", "lt", "nbsp", "quot", "reg"};

inline const char32_t* find_named_entity(std::string_view name) {
  auto it = std::lower_bound(kNamedEntities.begin(), kNamedEntities.end(), name,
                             [](const auto& e, std::string_view n) { return e.first < n; });
  if (it != kNamedEntities.end() && it->first == name) return &it->second;
  return nullptr;
}

inline bool is_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Decodes character references in text or attribute values.
inline std::string decode_entities(std::string_view s) {
  if (s.find('&') == std::string_view::npos) return std::string(s);
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '#') {
      ++j;
      bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      std::size_t start = j;
      char32_t cp = 0;
      while (j < s.size() && (hex ? std::isxdigit(static_cast<unsigned char>(s[j])) != 0
                                  : (s[j] >= '0' && s[j] <= '9'))) {
        int d = s[j] <= '9' ? s[j] - '0' : to_lower(s[j]) - 'a' + 10;
        cp = std::min<char32_t>(cp * (hex ? 16 : 10) + d, 0x110000);
        ++j;
      }
      if (j == start) {
        out.push_back(s[i++]);
        continue;
      }
      if (j < s.size() && s[j] == ';') ++j;
      append_utf8(out, cp == 0 ? 0xFFFD : cp);
      i = j;
      continue;
    }
    std::size_t start = j;
    while (j < s.size() && is_alnum(s[j])) ++j;
    std::string_view name = s.substr(start, j - start);
    bool semicolon = j < s.size() && s[j] == ';';
    const char32_t* cp = find_named_entity(name);
    if (cp != nullptr &&
        (semicolon || std::find(kLegacyNoSemicolon.begin(), kLegacyNoSemicolon.end(), name) !=
                          kLegacyNoSemicolon.end())) {
      append_utf8(out, *cp);
      i = semicolon ? j + 1 : j;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace similo::detail
