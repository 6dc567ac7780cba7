#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "similo/dom.hpp"
#include "similo/scoring.hpp"
#include "similo/xpath.hpp"

namespace similo {

struct ExtractionOptions {
  // Elements whose top-left corners lie within this distance are neighbors.
  double neighbor_radius = 100.0;
};

// First non-blank of the element's text, value, and placeholder.
inline std::string visible_text(const DomTree& tree, ElementRef el) {
  std::string text = tree.subtree_text(el);
  if (!detail::is_blank(text)) return text;
  for (std::string_view attr : {"value", "placeholder"}) {
    auto v = tree.attribute(el, attr);
    if (v && !detail::is_blank(*v)) return detail::collapse_whitespace(*v);
  }
  return {};
}

inline bool is_button(const DomTree& tree, ElementRef el) {
  const auto& tag = tree.tag(el);
  if (tag == "button") return true;
  if (tag == "input") {
    auto type = detail::to_lower(tree.attribute_or_empty(el, "type"));
    if (detail::one_of(type, {"button", "submit", "reset", "image"})) return true;
  }
  // Class tokens, further split on '-' and '_' so "btn-primary" counts.
  std::string cls = detail::to_lower(tree.attribute_or_empty(el, "class"));
  std::string token;
  auto flush = [&] {
    bool hit = token == "btn" || token == "button";
    token.clear();
    return hit;
  };
  for (char c : cls) {
    if (detail::is_space(c) || c == '-' || c == '_') {
      if (flush()) return true;
    } else {
      token.push_back(c);
    }
  }
  return flush();
}

// A parsed document with optional layout data and per-element values that
// every snapshot needs (paths, visible text) computed once up front.
class Page {
 public:
  explicit Page(DomTree tree, std::optional<Rendering> rendering = std::nullopt,
                CandidatePolicy policy = {})
      : tree_(std::move(tree)), rendering_(std::move(rendering)), policy_(std::move(policy)) {
    const std::size_t n = tree_.size();
    absolute_.reserve(n);
    id_relative_.reserve(n);
    visible_text_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      ElementRef el{i};
      absolute_.push_back(similo::absolute_xpath(tree_, el));
      id_relative_.push_back(similo::id_relative_xpath(tree_, el));
      visible_text_.push_back(similo::visible_text(tree_, el));
      by_absolute_.emplace(absolute_.back(), el);
    }
    candidates_ = similo::candidates(tree_, policy_, rendering_ ? &*rendering_ : nullptr);
    is_candidate_.assign(n, 0);
    for (ElementRef c : candidates_) is_candidate_[c.index] = 1;
  }

  const DomTree& tree() const { return tree_; }
  const Rendering* rendering() const { return rendering_ ? &*rendering_ : nullptr; }
  const CandidatePolicy& policy() const { return policy_; }
  const std::vector<ElementRef>& candidates() const { return candidates_; }
  bool is_candidate(ElementRef el) const { return is_candidate_.at(el.index) != 0; }

  const XPathString& absolute_xpath(ElementRef el) const { return absolute_.at(el.index); }
  const XPathString& id_relative_xpath(ElementRef el) const { return id_relative_.at(el.index); }
  const std::string& visible_text(ElementRef el) const { return visible_text_.at(el.index); }

  std::optional<Geometry> geometry(ElementRef el) const {
    return rendering_ ? rendering_->geometry(el) : std::nullopt;
  }

  // Resolves an absolute path by canonical string first, evaluating the
  // expression only when the string is not in canonical form.
  std::optional<ElementRef> find_absolute(std::string_view path) const {
    auto it = by_absolute_.find(std::string(path));
    if (it != by_absolute_.end()) return it->second;
    auto matches = evaluate(tree_, path);
    if (matches.size() == 1) return matches.front();
    return std::nullopt;
  }

 private:
  DomTree tree_;
  std::optional<Rendering> rendering_;
  CandidatePolicy policy_;
  std::vector<XPathString> absolute_;
  std::vector<XPathString> id_relative_;
  std::vector<std::string> visible_text_;
  std::unordered_map<std::string, ElementRef> by_absolute_;
  std::vector<ElementRef> candidates_;
  std::vector<char> is_candidate_;
};

namespace detail {

inline void add_words(std::vector<std::string>& out, std::string_view text) {
  auto words = split_words(text);
  out.insert(out.end(), words.begin(), words.end());
}

inline std::vector<std::string> neighbor_words(const Page& page, ElementRef el,
                                               const ExtractionOptions& options) {
  std::vector<std::string> words;
  add_words(words, page.visible_text(el));
  auto geom = page.geometry(el);
  if (geom) {
    for (ElementRef c : page.candidates()) {
      if (c == el) continue;
      auto g = page.geometry(c);
      if (!g) continue;
      if (std::hypot(g->x - geom->x, g->y - geom->y) <= options.neighbor_radius)
        add_words(words, page.visible_text(c));
    }
  } else {
    // Without layout, the tree neighborhood stands in for spatial proximity.
    const auto& tree = page.tree();
    auto consider = [&](ElementRef n) {
      if (n != el && page.is_candidate(n)) add_words(words, page.visible_text(n));
    };
    if (auto parent = tree.parent(el)) {
      consider(*parent);
      for (ElementRef s : tree.children(*parent)) consider(s);
    }
    for (ElementRef c : tree.children(el)) consider(c);
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

}  // namespace detail

inline ElementSnapshot extract_snapshot(const Page& page, ElementRef el, const ExtractionOptions& options = {}) {
  const auto& tree = page.tree();
  ElementSnapshot s;
  s.tag = tree.tag(el);
  s.class_name = std::string(tree.attribute_or_empty(el, "class"));
  s.name = std::string(tree.attribute_or_empty(el, "name"));
  s.id = std::string(tree.attribute_or_empty(el, "id"));
  s.href = std::string(tree.attribute_or_empty(el, "href"));
  s.alt = std::string(tree.attribute_or_empty(el, "alt"));
  s.absolute_xpath = page.absolute_xpath(el);
  s.id_relative_xpath = page.id_relative_xpath(el);
  s.is_button = is_button(tree, el);
  if (auto g = page.geometry(el)) {
    s.location = Point{g->x, g->y};
    s.area = g->width * g->height;
    if (g->height > 0) s.shape = g->width / g->height;
  }
  s.visible_text = page.visible_text(el);
  s.neighbor_texts = detail::neighbor_words(page, el, options);
  return s;
}

inline std::vector<Candidate> candidate_snapshots(const Page& page, const ExtractionOptions& options = {}) {
  std::vector<Candidate> out;
  out.reserve(page.candidates().size());
  for (ElementRef c : page.candidates()) out.push_back({c, extract_snapshot(page, c, options)});
  return out;
}

}  // namespace similo
