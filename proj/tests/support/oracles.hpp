#pragma once

// Slow reference implementations used to cross-check the library.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "similo/dom.hpp"
#include "similo/xpath.hpp"

namespace oracle {

// Textbook O(n*m) edit distance over code points.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ---------------------------------------------------------------------------
// Brute-force XPath: scan every node and decide membership bottom-up, by
// checking the last step against the node and earlier steps against its
// ancestors. Shares only the parser with the library.

namespace detail {

using similo::DomTree;
using similo::ElementRef;
namespace xp = similo::xpath;

inline std::string collapse(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

inline std::optional<std::string> attr(const DomTree& t, ElementRef el, const std::string& name) {
  for (const auto& a : t.attributes(el))
    if (a.name == name) return a.value;
  return std::nullopt;
}

inline std::string direct_text(const DomTree& t, ElementRef el) {
  std::string joined;
  for (const auto& run : t.text_runs(el)) joined += run.text;
  return collapse(joined);
}

inline bool holds(const DomTree& t, ElementRef el, const xp::Condition& c) {
  if (auto* ae = std::get_if<xp::AttributeEquals>(&c)) return attr(t, el, ae->name) == ae->value;
  if (auto* ac = std::get_if<xp::AttributeContains>(&c)) {
    auto v = attr(t, el, ac->name);
    return v && v->find(ac->value) != std::string::npos;
  }
  if (auto* te = std::get_if<xp::TextEquals>(&c)) return direct_text(t, el) == te->value;
  auto* tc = std::get_if<xp::TextContains>(&c);
  return direct_text(t, el).find(tc->value) != std::string::npos;
}

inline std::vector<ElementRef> siblings(const DomTree& t, ElementRef el) {
  auto p = t.parent(el);
  if (!p) return {el};
  auto kids = t.children(*p);
  return {kids.begin(), kids.end()};
}

// Whether `el` survives the step's tag test and predicates within its own
// sibling group.
inline bool passes_step(const DomTree& t, ElementRef el, const xp::Step& step) {
  auto tag_ok = [&](ElementRef e) { return step.tag == "*" || t.tag(e) == step.tag; };
  if (!tag_ok(el)) return false;
  std::vector<ElementRef> group;
  for (ElementRef s : siblings(t, el))
    if (tag_ok(s)) group.push_back(s);
  for (const auto& pred : step.predicates) {
    if (auto* pos = std::get_if<xp::Position>(&pred)) {
      if (pos->index == 0 || pos->index > group.size()) return false;
      group = {group[pos->index - 1]};
    } else {
      const auto& terms = std::get<xp::Conjunction>(pred).terms;
      std::vector<ElementRef> kept;
      for (ElementRef g : group) {
        bool all = true;
        for (const auto& c : terms) all = all && holds(t, g, c);
        if (all) kept.push_back(g);
      }
      group = std::move(kept);
    }
  }
  return std::find(group.begin(), group.end(), el) != group.end();
}

inline std::optional<ElementRef> first_with_id(const DomTree& t, const std::string& id) {
  for (std::uint32_t i = 0; i < t.size(); ++i)
    if (attr(t, ElementRef{i}, "id") == id) return ElementRef{i};
  return std::nullopt;
}

// Does `el` match steps[0..k]? `anchor` is the id() context, if any.
inline bool matches(const DomTree& t, ElementRef el, const std::vector<xp::Step>& steps, std::size_t k,
                    std::optional<ElementRef> anchor) {
  if (!passes_step(t, el, steps[k])) return false;
  auto parent = t.parent(el);
  // The context this step's parent must belong to: either the previous step's
  // matches, or the initial context (document node or id anchor).
  auto is_context = [&](std::optional<ElementRef> node) -> bool {
    if (k == 0) return anchor ? node == anchor : !node.has_value();
    return node && matches(t, *node, steps, k - 1, anchor);
  };
  if (steps[k].axis == xp::Axis::Child) return is_context(parent);
  // Descendant: some ancestor-or-self of the parent is a context node.
  for (std::optional<ElementRef> a = parent;; a = t.parent(*a)) {
    if (is_context(a)) return true;
    if (!a) return false;
  }
}

}  // namespace detail

inline std::vector<similo::ElementRef> evaluate(const similo::DomTree& t, std::string_view text) {
  auto expr = similo::xpath::parse(text);
  std::optional<similo::ElementRef> anchor;
  if (expr.id_anchor) {
    anchor = detail::first_with_id(t, *expr.id_anchor);
    if (!anchor) return {};
    if (expr.steps.empty()) return {*anchor};
  }
  std::vector<similo::ElementRef> out;
  for (std::uint32_t i = 0; i < t.size(); ++i)
    if (detail::matches(t, similo::ElementRef{i}, expr.steps, expr.steps.size() - 1, anchor))
      out.push_back(similo::ElementRef{i});
  return out;
}

}  // namespace oracle
