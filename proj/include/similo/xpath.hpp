#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "similo/detail/text.hpp"
#include "similo/dom.hpp"

namespace similo {

class XPathError : public Error {
 public:
  using Error::Error;
};

// The supported dialect is the subset every generated locator and every
// oracle path is written in:
//
//   path      := ( 'id(' literal ')' | ('/' | '//') step ) ( ('/' | '//') step )*
//   step      := ( name | '*' ) predicate*
//   predicate := '[' integer ']' | '[' condition ( 'and' condition )* ']'
//   condition := '@'name '=' literal | 'text()' '=' literal
//              | 'contains(' ( '@'name | 'text()' ) ',' literal ')'
//
// text() compares against the element's whitespace-collapsed direct text.
// Anything outside the grammar is rejected with the offending token.
namespace xpath {

enum class Axis { Child, Descendant };

struct AttributeEquals {
  std::string name;
  std::string value;
  friend bool operator==(const AttributeEquals&, const AttributeEquals&) = default;
};
struct TextEquals {
  std::string value;
  friend bool operator==(const TextEquals&, const TextEquals&) = default;
};
struct AttributeContains {
  std::string name;
  std::string value;
  friend bool operator==(const AttributeContains&, const AttributeContains&) = default;
};
struct TextContains {
  std::string value;
  friend bool operator==(const TextContains&, const TextContains&) = default;
};

using Condition = std::variant<AttributeEquals, TextEquals, AttributeContains, TextContains>;

struct Position {
  std::size_t index = 1;  // 1-based
  friend bool operator==(const Position&, const Position&) = default;
};

struct Conjunction {
  std::vector<Condition> terms;
  friend bool operator==(const Conjunction&, const Conjunction&) = default;
};

using Predicate = std::variant<Position, Conjunction>;

struct Step {
  Axis axis = Axis::Child;
  std::string tag;  // lowercased, "*" for any
  std::vector<Predicate> predicates;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Expression {
  std::optional<std::string> id_anchor;
  std::vector<Step> steps;
  friend bool operator==(const Expression&, const Expression&) = default;
};

// Literal quoting: single quotes unless the value contains one. Returns
// nullopt when the value contains both quote characters (no escaping exists).
inline std::optional<std::string> quote(std::string_view value) {
  bool single = value.find('\'') != std::string_view::npos;
  bool dbl = value.find('"') != std::string_view::npos;
  if (single && dbl) return std::nullopt;
  char q = single ? '"' : '\'';
  std::string out;
  out.reserve(value.size() + 2);
  out.push_back(q);
  out.append(value);
  out.push_back(q);
  return out;
}

inline bool condition_holds(const DomTree& tree, ElementRef el, const Condition& c) {
  return std::visit(
      [&](const auto& term) -> bool {
        using T = std::decay_t<decltype(term)>;
        if constexpr (std::is_same_v<T, AttributeEquals>) {
          auto v = tree.attribute(el, term.name);
          return v && *v == term.value;
        } else if constexpr (std::is_same_v<T, TextEquals>) {
          return tree.text(el) == term.value;
        } else if constexpr (std::is_same_v<T, AttributeContains>) {
          auto v = tree.attribute(el, term.name);
          return v && v->find(term.value) != std::string_view::npos;
        } else {
          return tree.text(el).find(term.value) != std::string::npos;
        }
      },
      c);
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expression parse() {
    Expression expr;
    skip_space();
    if (at_end()) fail("<empty>");
    if (starts_with("id(")) {
      pos_ += 3;
      skip_space();
      expr.id_anchor = literal();
      skip_space();
      expect(')');
    } else if (peek() != '/') {
      fail(token());
    }
    while (true) {
      skip_space();
      if (at_end()) break;
      if (peek() != '/') fail(token());
      ++pos_;
      Axis axis = Axis::Child;
      if (!at_end() && peek() == '/') {
        axis = Axis::Descendant;
        ++pos_;
      }
      expr.steps.push_back(step(axis));
    }
    if (!expr.id_anchor && expr.steps.empty()) fail("/");
    return expr;
  }

 private:
  [[noreturn]] void fail(std::string_view tok) const {
    throw XPathError("unsupported xpath construct: '" + std::string(tok) + "'");
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (!at_end() && similo::detail::is_space(peek())) ++pos_;
  }

  // The offending token for error messages: a name, or one character.
  std::string token() const {
    if (at_end()) return "<end>";
    std::size_t end = pos_;
    while (end < src_.size() && is_name_char(src_[end])) ++end;
    if (end == pos_) ++end;
    return std::string(src_.substr(pos_, end - pos_));
  }

  void expect(char c) {
    skip_space();
    if (at_end() || peek() != c) fail(token());
    ++pos_;
  }

  static bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.' || c == ':';
  }

  std::string name() {
    skip_space();
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    if (start == pos_) fail(token());
    auto n = src_.substr(start, pos_ - start);
    if (n.find("::") != std::string_view::npos) {  // axes
      pos_ = start;
      fail(std::string(n));
    }
    return similo::detail::to_lower(n);
  }

  std::string literal() {
    skip_space();
    if (at_end() || (peek() != '\'' && peek() != '"')) fail(token());
    char q = src_[pos_++];
    auto end = src_.find(q, pos_);
    if (end == std::string_view::npos) fail(src_.substr(pos_ - 1));
    std::string out(src_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  Step step(Axis axis) {
    Step s;
    s.axis = axis;
    skip_space();
    if (!at_end() && peek() == '*') {
      ++pos_;
      s.tag = "*";
    } else {
      s.tag = name();
    }
    while (true) {
      skip_space();
      if (at_end() || peek() != '[') break;
      ++pos_;
      s.predicates.push_back(predicate());
      expect(']');
    }
    return s;
  }

  Predicate predicate() {
    skip_space();
    if (!at_end() && peek() >= '0' && peek() <= '9') {
      std::size_t value = 0;
      while (!at_end() && peek() >= '0' && peek() <= '9') {
        value = value * 10 + static_cast<std::size_t>(peek() - '0');
        if (value > 1'000'000'000) fail(token());
        ++pos_;
      }
      if (value == 0) fail("0");
      return Position{value};
    }
    Conjunction conj;
    conj.terms.push_back(condition());
    while (true) {
      skip_space();
      if (starts_with("and") && pos_ + 3 < src_.size() && !is_name_char(src_[pos_ + 3])) {
        pos_ += 3;
        conj.terms.push_back(condition());
      } else {
        break;
      }
    }
    return conj;
  }

  Condition condition() {
    skip_space();
    if (!at_end() && peek() == '@') {
      ++pos_;
      std::string attr = name();
      expect('=');
      return AttributeEquals{std::move(attr), literal()};
    }
    if (starts_with("text()")) {
      pos_ += 6;
      expect('=');
      return TextEquals{literal()};
    }
    if (starts_with("contains(")) {
      pos_ += 9;
      skip_space();
      std::optional<std::string> attr;
      if (!at_end() && peek() == '@') {
        ++pos_;
        attr = name();
      } else if (starts_with("text()")) {
        pos_ += 6;
      } else {
        fail(token());
      }
      expect(',');
      std::string value = literal();
      expect(')');
      if (attr) return AttributeContains{std::move(*attr), std::move(value)};
      return TextContains{std::move(value)};
    }
    fail(token());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline std::string format_literal(std::string_view v) {
  return quote(v).value_or("'" + std::string(v) + "'");
}

inline std::string format_condition(const Condition& c) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, AttributeEquals>)
          return "@" + t.name + "=" + format_literal(t.value);
        else if constexpr (std::is_same_v<T, TextEquals>)
          return "text()=" + format_literal(t.value);
        else if constexpr (std::is_same_v<T, AttributeContains>)
          return "contains(@" + t.name + "," + format_literal(t.value) + ")";
        else
          return "contains(text()," + format_literal(t.value) + ")";
      },
      c);
}

}  // namespace detail

inline Expression parse(std::string_view text) { return detail::Parser(text).parse(); }

inline std::string format_step(const Step& s) {
  std::string out = s.tag;
  for (const auto& p : s.predicates) {
    out += '[';
    if (const auto* pos = std::get_if<Position>(&p)) {
      out += std::to_string(pos->index);
    } else {
      const auto& terms = std::get<Conjunction>(p).terms;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) out += " and ";
        out += detail::format_condition(terms[i]);
      }
    }
    out += ']';
  }
  return out;
}

inline std::string format(const Expression& e) {
  std::string out;
  if (e.id_anchor) out = "id(" + detail::format_literal(*e.id_anchor) + ")";
  for (const auto& s : e.steps) {
    out += s.axis == Axis::Descendant ? "//" : "/";
    out += format_step(s);
  }
  return out;
}

// Keeps the members of `group` (siblings, in document order) that satisfy the
// predicates applied left to right, positions counted after earlier filters.
inline std::vector<ElementRef> apply_predicates(const DomTree& tree, std::vector<ElementRef> group,
                                                const std::vector<Predicate>& predicates) {
  for (const auto& p : predicates) {
    if (group.empty()) break;
    if (const auto* pos = std::get_if<Position>(&p)) {
      if (pos->index > group.size()) {
        group.clear();
      } else {
        ElementRef keep = group[pos->index - 1];
        group.assign(1, keep);
      }
      continue;
    }
    const auto& terms = std::get<Conjunction>(p).terms;
    std::erase_if(group, [&](ElementRef el) {
      return !std::all_of(terms.begin(), terms.end(),
                          [&](const Condition& c) { return condition_holds(tree, el, c); });
    });
  }
  return group;
}

inline bool tag_matches(const DomTree& tree, ElementRef el, const std::string& tag) {
  return tag == "*" || tree.tag(el) == tag;
}

// Top-down set evaluation. Results are unique and in document order.
inline std::vector<ElementRef> evaluate(const DomTree& tree, const Expression& expr) {
  // A context entry of nullopt stands for the document node above the root.
  std::vector<std::optional<ElementRef>> context;
  if (expr.id_anchor) {
    auto anchor = tree.element_by_id(*expr.id_anchor);
    if (!anchor) return {};
    context.push_back(*anchor);
  } else {
    context.push_back(std::nullopt);
  }

  std::vector<char> seen(tree.size(), 0);
  std::vector<ElementRef> group;
  auto select_children = [&](std::optional<ElementRef> parent, const Step& step,
                             std::vector<ElementRef>& out) {
    group.clear();
    if (!parent) {
      if (tag_matches(tree, tree.root(), step.tag)) group.push_back(tree.root());
    } else {
      for (ElementRef c : tree.children(*parent))
        if (tag_matches(tree, c, step.tag)) group.push_back(c);
    }
    for (ElementRef el : apply_predicates(tree, std::move(group), step.predicates)) {
      if (!seen[el.index]) {
        seen[el.index] = 1;
        out.push_back(el);
      }
    }
  };

  std::vector<ElementRef> result;
  if (expr.steps.empty()) {
    if (context.front()) result.push_back(*context.front());
    return result;
  }
  for (const auto& step : expr.steps) {
    std::fill(seen.begin(), seen.end(), 0);
    result.clear();
    std::vector<char> visited(step.axis == Axis::Descendant ? tree.size() : 0, 0);
    for (const auto& ctx : context) {
      if (step.axis == Axis::Child) {
        select_children(ctx, step, result);
        continue;
      }
      // descendant-or-self::node()/child::step
      select_children(ctx, step, result);
      std::uint32_t begin = ctx ? ctx->index : 0;
      std::uint32_t end = ctx ? tree.subtree_end(*ctx).index : static_cast<std::uint32_t>(tree.size());
      for (std::uint32_t i = begin; i < end; ++i) {
        if (visited[i]) continue;
        visited[i] = 1;
        if (ctx && i == ctx->index) continue;  // already handled as self
        select_children(ElementRef{i}, step, result);
      }
    }
    std::sort(result.begin(), result.end());
    context.assign(result.begin(), result.end());
    if (context.empty()) break;
  }
  return result;
}

}  // namespace xpath

using XPathString = std::string;

inline std::vector<ElementRef> evaluate(const DomTree& tree, std::string_view expression) {
  return xpath::evaluate(tree, xpath::parse(expression));
}

// 1-based position of `el` among its parent's children with the same tag.
inline std::size_t same_tag_position(const DomTree& tree, ElementRef el) {
  auto parent = tree.parent(el);
  if (!parent) return 1;
  std::size_t pos = 0;
  for (ElementRef c : tree.children(*parent)) {
    if (tree.tag(c) == tree.tag(el)) ++pos;
    if (c == el) break;
  }
  return pos;
}

namespace detail {
inline void append_steps(const DomTree& tree, ElementRef from_exclusive, ElementRef el,
                         std::string& out, bool from_document) {
  std::vector<ElementRef> chain;
  for (std::optional<ElementRef> cur = el; cur; cur = tree.parent(*cur)) {
    if (!from_document && *cur == from_exclusive) break;
    chain.push_back(*cur);
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    out += '/';
    out += tree.tag(*it);
    out += '[';
    out += std::to_string(same_tag_position(tree, *it));
    out += ']';
  }
}
}  // namespace detail

// "/html[1]/body[1]/.../tag[k]" with k counted among same-tag siblings.
inline XPathString absolute_xpath(const DomTree& tree, ElementRef el) {
  std::string out;
  detail::append_steps(tree, el, el, out, true);
  return out;
}

// Anchors at the nearest element (self included) carrying an id that id()
// resolves back to that same element; falls back to the absolute path.
inline XPathString id_relative_xpath(const DomTree& tree, ElementRef el) {
  for (std::optional<ElementRef> cur = el; cur; cur = tree.parent(*cur)) {
    auto id = tree.attribute(*cur, "id");
    if (!id || id->empty()) continue;
    if (tree.element_by_id(*id) != cur) continue;
    if (id->find('"') != std::string_view::npos) continue;
    std::string out = "id(\"" + std::string(*id) + "\")";
    detail::append_steps(tree, *cur, el, out, false);
    return out;
  }
  return absolute_xpath(tree, el);
}

// Canonical step strings (lowercased tag, explicit [1]) for oracle comparison.
inline std::vector<std::string> normalized_steps(std::string_view path) {
  std::vector<std::string> out;
  try {
    auto expr = xpath::parse(path);
    if (expr.id_anchor) out.push_back("id(" + xpath::detail::format_literal(*expr.id_anchor) + ")");
    for (auto step : expr.steps) {
      bool positional = std::any_of(step.predicates.begin(), step.predicates.end(), [](const auto& p) {
        return std::holds_alternative<xpath::Position>(p);
      });
      if (!positional) step.predicates.push_back(xpath::Position{1});
      out.push_back((step.axis == xpath::Axis::Descendant ? "//" : "") + xpath::format_step(step));
    }
  } catch (const XPathError&) {
    // Not in the dialect: fall back to plain segment splitting.
    out.clear();
    std::string_view rest = path;
    while (!rest.empty()) {
      auto slash = rest.find('/');
      auto seg = detail::trim(rest.substr(0, slash));
      if (!seg.empty()) out.push_back(detail::to_lower(seg));
      if (slash == std::string_view::npos) break;
      rest.remove_prefix(slash + 1);
    }
  }
  return out;
}

// Equal step sequences, or equal after dropping exactly one trailing step
// from exactly one side.
inline bool tolerant_match(std::string_view candidate, std::string_view oracle) {
  auto a = normalized_steps(candidate);
  auto b = normalized_steps(oracle);
  if (a == b) return true;
  if (a.size() + 1 == b.size()) return std::equal(a.begin(), a.end(), b.begin());
  if (b.size() + 1 == a.size()) return std::equal(b.begin(), b.end(), a.begin());
  return false;
}

}  // namespace similo
