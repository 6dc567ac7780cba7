#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "similo/dom.hpp"
#include "similo/xpath.hpp"

namespace similo {

enum class LocatorKind { AbsoluteXPath, IdRelativeXPath, SeleniumIde, Montoto, RobulaPlus };

inline constexpr std::array<LocatorKind, 5> kLocatorKinds{
    LocatorKind::AbsoluteXPath, LocatorKind::IdRelativeXPath, LocatorKind::SeleniumIde,
    LocatorKind::Montoto, LocatorKind::RobulaPlus};

inline constexpr std::string_view locator_kind_name(LocatorKind k) {
  switch (k) {
    case LocatorKind::AbsoluteXPath: return "absolute";
    case LocatorKind::IdRelativeXPath: return "id_relative";
    case LocatorKind::SeleniumIde: return "selenium_ide";
    case LocatorKind::Montoto: return "montoto";
    case LocatorKind::RobulaPlus: return "robula_plus";
  }
  return "?";
}

inline std::optional<LocatorKind> locator_kind_from_name(std::string_view name) {
  for (auto k : kLocatorKinds)
    if (locator_kind_name(k) == name) return k;
  return std::nullopt;
}

struct LocatorExpr {
  LocatorKind kind = LocatorKind::AbsoluteXPath;
  XPathString expr;
  bool unique_at_generation = false;
};

struct LocatorSet {
  XPathString target;  // absolute path of the element on the generation tree
  std::vector<LocatorExpr> locators;

  const LocatorExpr* find(LocatorKind k) const {
    for (const auto& l : locators)
      if (l.kind == k) return &l;
    return nullptr;
  }
};

struct GeneratorConfig {
  // Attributes tried first, in this order; the rest follow in document order.
  // id is always handled by its own transformation.
  std::vector<std::string> priority{"name", "class"};
  // Never used in predicates.
  std::vector<std::string> blacklist{"style"};
  bool blacklist_event_handlers = true;  // on*
  bool blacklist_query_urls = true;      // href/src values carrying a query string
  // Most steps a ROBULA+ expression may grow to before falling back.
  std::size_t max_depth = 5;
  // Largest attribute combination the attribute-set transformation builds.
  std::size_t max_attribute_set = 3;
  // Candidate expressions examined before giving up on ROBULA+.
  std::size_t search_budget = 4000;

  bool usable_attribute(const Attribute& a) const {
    if (a.value.empty()) return false;
    if (std::find(blacklist.begin(), blacklist.end(), a.name) != blacklist.end()) return false;
    if (blacklist_event_handlers && a.name.size() > 2 && a.name.rfind("on", 0) == 0) return false;
    if (blacklist_query_urls && (a.name == "href" || a.name == "src") &&
        a.value.find('?') != std::string::npos)
      return false;
    return xpath::quote(a.value).has_value();
  }
};

namespace detail {

inline bool locates_exactly(const DomTree& tree, const xpath::Expression& e, ElementRef el) {
  auto r = xpath::evaluate(tree, e);
  return r.size() == 1 && r.front() == el;
}

inline bool locates_exactly(const DomTree& tree, std::string_view e, ElementRef el) {
  auto r = evaluate(tree, e);
  return r.size() == 1 && r.front() == el;
}

inline xpath::Step descendant_step(std::string tag, std::vector<xpath::Condition> terms = {}) {
  xpath::Step s;
  s.axis = xpath::Axis::Descendant;
  s.tag = std::move(tag);
  if (!terms.empty()) s.predicates.push_back(xpath::Conjunction{std::move(terms)});
  return s;
}

inline std::size_t complexity(const xpath::Expression& e) {
  std::size_t n = e.id_anchor ? 1 : 0;
  for (const auto& s : e.steps) {
    n += 1;
    for (const auto& p : s.predicates) {
      if (const auto* c = std::get_if<xpath::Conjunction>(&p))
        n += c->terms.size();
      else
        n += 1;
    }
  }
  return n;
}

// Usable attributes of `el`, priority list first, then document order.
inline std::vector<Attribute> prioritized_attributes(const DomTree& tree, ElementRef el,
                                                     const GeneratorConfig& config) {
  std::vector<Attribute> out;
  for (const auto& name : config.priority) {
    for (const auto& a : tree.attributes(el))
      if (a.name == name && a.name != "id" && config.usable_attribute(a)) out.push_back(a);
  }
  for (const auto& a : tree.attributes(el)) {
    bool listed = std::find(config.priority.begin(), config.priority.end(), a.name) != config.priority.end();
    if (!listed && a.name != "id" && config.usable_attribute(a)) out.push_back(a);
  }
  return out;
}

}  // namespace detail

// Complexity of a locator: steps plus predicate terms.
inline std::size_t locator_complexity(std::string_view expr) {
  return detail::complexity(xpath::parse(expr));
}

// First unique of: id, link text, name, single-attribute paths; else absolute.
inline LocatorExpr gen_selenium_ide(const DomTree& tree, ElementRef el, const GeneratorConfig& config = {}) {
  auto attempt = [&](xpath::Step step) -> std::optional<std::string> {
    xpath::Expression e;
    e.steps.push_back(std::move(step));
    if (detail::locates_exactly(tree, e, el)) return xpath::format(e);
    return std::nullopt;
  };
  auto try_attr = [&](std::string tag, const Attribute& a) -> std::optional<std::string> {
    if (!config.usable_attribute(a)) return std::nullopt;
    return attempt(detail::descendant_step(std::move(tag), {xpath::AttributeEquals{a.name, a.value}}));
  };
  for (const auto& a : tree.attributes(el))
    if (a.name == "id")
      if (auto r = try_attr("*", a)) return {LocatorKind::SeleniumIde, *r, true};
  if (tree.tag(el) == "a" && !tree.text(el).empty() && xpath::quote(tree.text(el)))
    if (auto r = attempt(detail::descendant_step("a", {xpath::TextEquals{tree.text(el)}})))
      return {LocatorKind::SeleniumIde, *r, true};
  for (const auto& a : tree.attributes(el))
    if (a.name == "name")
      if (auto r = try_attr("*", a)) return {LocatorKind::SeleniumIde, *r, true};
  for (const auto& a : tree.attributes(el))
    if (auto r = try_attr(tree.tag(el), a)) return {LocatorKind::SeleniumIde, *r, true};
  return {LocatorKind::SeleniumIde, absolute_xpath(tree, el), true};
}

// Bottom-up: the element's text and attributes, then one ancestor at a time
// with its attributes, until unique. Absent if the root is reached first.
inline std::optional<LocatorExpr> gen_montoto(const DomTree& tree, ElementRef el,
                                              const GeneratorConfig& config = {}) {
  auto predicates_for = [&](ElementRef node, bool with_text) {
    std::vector<xpath::Condition> terms;
    if (with_text && !tree.text(node).empty() && xpath::quote(tree.text(node)))
      terms.push_back(xpath::TextEquals{tree.text(node)});
    for (const auto& a : tree.attributes(node))
      if (config.usable_attribute(a)) terms.push_back(xpath::AttributeEquals{a.name, a.value});
    return terms;
  };

  xpath::Expression e;
  e.steps.push_back(detail::descendant_step(tree.tag(el), predicates_for(el, true)));
  std::optional<ElementRef> cur = el;
  while (true) {
    if (detail::locates_exactly(tree, e, el)) return LocatorExpr{LocatorKind::Montoto, xpath::format(e), true};
    cur = tree.parent(*cur);
    if (!cur) return std::nullopt;
    e.steps.front().axis = xpath::Axis::Child;
    e.steps.insert(e.steps.begin(), detail::descendant_step(tree.tag(*cur), predicates_for(*cur, false)));
  }
}

namespace detail {

// One ROBULA+ search state: steps[0] is the head ("//" axis) and describes
// the ancestor of the target `steps.size() - 1` levels up.
class RobulaSearch {
 public:
  RobulaSearch(const DomTree& tree, ElementRef el, const GeneratorConfig& config)
      : tree_(tree), el_(el), config_(config) {
    for (std::optional<ElementRef> cur = el; cur; cur = tree.parent(*cur)) lineage_.push_back(*cur);
  }

  std::optional<xpath::Expression> run() {
    std::deque<xpath::Expression> queue;
    queue.push_back(xpath::Expression{{}, {descendant_step("*")}});
    std::size_t examined = 0;
    while (!queue.empty()) {
      xpath::Expression xp = std::move(queue.front());
      queue.pop_front();
      std::vector<xpath::Expression> next;
      convert_star(xp, next);
      add_id(xp, next);
      add_text(xp, next);
      add_attribute(xp, next);
      add_attribute_set(xp, next);
      add_position(xp, next);
      add_level(xp, next);
      for (auto& candidate : next) {
        if (++examined > config_.search_budget) return std::nullopt;
        if (locates_exactly(tree_, candidate, el_)) return candidate;
        queue.push_back(std::move(candidate));
      }
    }
    return std::nullopt;
  }

 private:
  ElementRef head_element(const xpath::Expression& xp) const { return lineage_[xp.steps.size() - 1]; }

  static bool has_any_predicate(const xpath::Step& s) { return !s.predicates.empty(); }

  static bool has_position(const xpath::Step& s) {
    return std::any_of(s.predicates.begin(), s.predicates.end(),
                       [](const auto& p) { return std::holds_alternative<xpath::Position>(p); });
  }

  static bool has_text(const xpath::Step& s) {
    for (const auto& p : s.predicates)
      if (const auto* c = std::get_if<xpath::Conjunction>(&p))
        for (const auto& t : c->terms)
          if (std::holds_alternative<xpath::TextContains>(t) || std::holds_alternative<xpath::TextEquals>(t))
            return true;
    return false;
  }

  static xpath::Expression with_head_predicate(const xpath::Expression& xp, xpath::Predicate p) {
    xpath::Expression out = xp;
    out.steps.front().predicates.push_back(std::move(p));
    return out;
  }

  void convert_star(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    if (xp.steps.front().tag != "*") return;
    xpath::Expression e = xp;
    e.steps.front().tag = tree_.tag(head_element(xp));
    out.push_back(std::move(e));
  }

  void add_id(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    if (has_any_predicate(xp.steps.front())) return;
    for (const auto& a : tree_.attributes(head_element(xp)))
      if (a.name == "id" && config_.usable_attribute(a))
        out.push_back(with_head_predicate(xp, xpath::Conjunction{{xpath::AttributeEquals{a.name, a.value}}}));
  }

  void add_text(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    const auto& head = xp.steps.front();
    if (has_position(head) || has_text(head)) return;
    const auto& text = tree_.text(head_element(xp));
    if (text.empty() || !xpath::quote(text)) return;
    out.push_back(with_head_predicate(xp, xpath::Conjunction{{xpath::TextContains{text}}}));
  }

  void add_attribute(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    if (has_any_predicate(xp.steps.front())) return;
    for (const auto& a : prioritized_attributes(tree_, head_element(xp), config_))
      out.push_back(with_head_predicate(xp, xpath::Conjunction{{xpath::AttributeEquals{a.name, a.value}}}));
  }

  void add_attribute_set(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    if (has_any_predicate(xp.steps.front())) return;
    auto attrs = prioritized_attributes(tree_, head_element(xp), config_);
    if (attrs.size() < 2 || config_.max_attribute_set < 2) return;
    // Subsets of size 2..max, smaller first, each in priority order.
    for (std::size_t k = 2; k <= std::min(config_.max_attribute_set, attrs.size()); ++k) {
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        xpath::Conjunction conj;
        for (auto i : idx) conj.terms.push_back(xpath::AttributeEquals{attrs[i].name, attrs[i].value});
        out.push_back(with_head_predicate(xp, std::move(conj)));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == attrs.size() - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
  }

  void add_position(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    const auto& head = xp.steps.front();
    if (has_position(head)) return;
    ElementRef node = head_element(xp);
    auto parent = tree_.parent(node);
    if (!parent) return;
    // Position among the siblings the head step already admits.
    std::vector<ElementRef> group;
    for (ElementRef c : tree_.children(*parent))
      if (xpath::tag_matches(tree_, c, head.tag)) group.push_back(c);
    group = xpath::apply_predicates(tree_, std::move(group), head.predicates);
    auto it = std::find(group.begin(), group.end(), node);
    if (it == group.end()) return;
    out.push_back(with_head_predicate(xp, xpath::Position{static_cast<std::size_t>(it - group.begin()) + 1}));
  }

  void add_level(const xpath::Expression& xp, std::vector<xpath::Expression>& out) const {
    if (xp.steps.size() >= lineage_.size() || xp.steps.size() >= config_.max_depth) return;
    xpath::Expression e = xp;
    e.steps.front().axis = xpath::Axis::Child;
    e.steps.insert(e.steps.begin(), descendant_step("*"));
    out.push_back(std::move(e));
  }

  const DomTree& tree_;
  ElementRef el_;
  const GeneratorConfig& config_;
  std::vector<ElementRef> lineage_;  // el, parent, grandparent, ...
};

}  // namespace detail

// Breadth-first specialization from "//*"; the first expression that selects
// exactly the element wins. Falls back to the absolute path when the search
// gives up or would end up longer than it.
inline LocatorExpr gen_robula_plus(const DomTree& tree, ElementRef el, const GeneratorConfig& config = {}) {
  auto absolute = absolute_xpath(tree, el);
  auto found = detail::RobulaSearch(tree, el, config).run();
  if (!found || detail::complexity(*found) > locator_complexity(absolute))
    return {LocatorKind::RobulaPlus, absolute, true};
  return {LocatorKind::RobulaPlus, xpath::format(*found), true};
}

inline LocatorSet gen_all(const DomTree& tree, ElementRef el, const GeneratorConfig& config = {}) {
  LocatorSet set;
  set.target = absolute_xpath(tree, el);
  auto add = [&](LocatorExpr l) {
    l.unique_at_generation = detail::locates_exactly(tree, l.expr, el);
    set.locators.push_back(std::move(l));
  };
  add({LocatorKind::AbsoluteXPath, set.target, true});
  add({LocatorKind::IdRelativeXPath, id_relative_xpath(tree, el), true});
  add(gen_selenium_ide(tree, el, config));
  if (auto m = gen_montoto(tree, el, config)) add(std::move(*m));
  add(gen_robula_plus(tree, el, config));
  return set;
}

}  // namespace similo
