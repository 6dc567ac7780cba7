#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "similo/detail/entities.hpp"
#include "similo/detail/text.hpp"

namespace similo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Handle to one element of one DomTree. The index is the element's pre-order
// (document-order) position, so ordering refs orders them in the document.
struct ElementRef {
  std::uint32_t index = 0;

  friend bool operator==(ElementRef, ElementRef) = default;
  friend auto operator<=>(ElementRef, ElementRef) = default;
};

struct Geometry {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct Attribute {
  std::string name;  // lowercased
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// A run of character data that precedes the element child at `before_child`
// (or trails all children when it equals the child count).
struct TextRun {
  std::uint32_t before_child = 0;
  std::string text;
};

namespace detail {
class HtmlTreeBuilder;
}

// Immutable element tree. Nodes are stored in pre-order; only elements are
// nodes, character data hangs off its parent element as TextRuns.
class DomTree {
 public:
  ElementRef root() const { return ElementRef{0}; }
  std::size_t size() const { return nodes_.size(); }

  const std::string& tag(ElementRef el) const { return node(el).tag; }
  std::span<const Attribute> attributes(ElementRef el) const { return node(el).attributes; }

  std::optional<std::string_view> attribute(ElementRef el, std::string_view name) const {
    for (const auto& a : node(el).attributes)
      if (detail::iequals(a.name, name)) return std::string_view(a.value);
    return std::nullopt;
  }

  std::string_view attribute_or_empty(ElementRef el, std::string_view name) const {
    return attribute(el, name).value_or(std::string_view{});
  }

  std::optional<ElementRef> parent(ElementRef el) const {
    const auto& n = node(el);
    if (n.parent == kNone) return std::nullopt;
    return ElementRef{n.parent};
  }

  std::span<const ElementRef> children(ElementRef el) const { return node(el).children; }
  std::span<const TextRun> text_runs(ElementRef el) const { return node(el).text; }

  // Direct character data, whitespace-collapsed.
  const std::string& text(ElementRef el) const { return node(el).direct_text; }

  // Rendered-order text of the whole subtree, whitespace-collapsed. Script and
  // style content never reaches the tree, so it is excluded by construction.
  std::string subtree_text(ElementRef el) const {
    std::string raw;
    append_subtree_text(el, raw);
    return detail::collapse_whitespace(raw);
  }

  std::uint32_t depth(ElementRef el) const { return node(el).depth; }

  // One past the last descendant in pre-order.
  ElementRef subtree_end(ElementRef el) const { return ElementRef{node(el).subtree_end}; }

  bool is_ancestor(ElementRef ancestor, ElementRef descendant) const {
    return ancestor.index < descendant.index && descendant.index < node(ancestor).subtree_end;
  }

  // True for elements strictly inside an <svg> subtree.
  bool in_svg(ElementRef el) const { return node(el).in_svg; }

  // First element in document order whose id attribute equals `id`.
  std::optional<ElementRef> element_by_id(std::string_view id) const {
    auto it = first_id_.find(std::string(id));
    if (it == first_id_.end()) return std::nullopt;
    return ElementRef{it->second};
  }

  bool contains(ElementRef el) const { return el.index < nodes_.size(); }

 private:
  friend class detail::HtmlTreeBuilder;
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  struct Node {
    std::string tag;
    std::vector<Attribute> attributes;
    std::uint32_t parent = kNone;
    std::vector<ElementRef> children;
    std::vector<TextRun> text;
    std::string direct_text;
    std::uint32_t depth = 0;
    std::uint32_t subtree_end = 0;
    bool in_svg = false;
  };

  const Node& node(ElementRef el) const { return nodes_.at(el.index); }

  static bool breaks_text(std::string_view tag) {
    static constexpr std::array<std::string_view, 22> kBlocks{
        "address", "article", "br", "dd", "div", "dl", "dt", "footer", "form", "h1", "h2",
        "h3", "h4", "h5", "h6", "header", "li", "nav", "p", "section", "td", "tr"};
    return std::find(kBlocks.begin(), kBlocks.end(), tag) != kBlocks.end() || tag == "th";
  }

  void append_subtree_text(ElementRef el, std::string& out) const {
    const auto& n = node(el);
    std::size_t run = 0;
    for (std::uint32_t c = 0; c <= n.children.size(); ++c) {
      while (run < n.text.size() && n.text[run].before_child == c) out += n.text[run++].text;
      if (c == n.children.size()) break;
      ElementRef child = n.children[c];
      bool block = breaks_text(tag(child));
      if (block) out.push_back(' ');
      append_subtree_text(child, out);
      if (block) out.push_back(' ');
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::uint32_t> first_id_;
};

namespace detail {

inline bool one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

inline bool is_void_element(std::string_view t) {
  return one_of(t, {"area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link",
                    "meta", "param", "source", "track", "wbr"});
}

inline bool is_raw_text_element(std::string_view t) {
  return one_of(t, {"script", "style", "textarea", "title", "xmp", "iframe", "noembed",
                    "noframes", "noscript", "template"});
}

// Raw text whose content is rendered as element text (entities decoded).
inline bool is_rcdata_element(std::string_view t) { return t == "textarea" || t == "title"; }

inline bool closes_paragraph(std::string_view t) {
  return one_of(t, {"address", "article", "aside", "blockquote", "center", "details", "dialog",
                    "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer", "form",
                    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "main",
                    "menu", "nav", "ol", "p", "pre", "section", "summary", "table", "ul", "li",
                    "dd", "dt"});
}

// The "special" category from the HTML tree-construction rules (trimmed to
// elements that can actually sit on the open-element stack).
inline bool is_special(std::string_view t) {
  return one_of(t, {"address", "applet", "article", "aside", "blockquote", "body", "button",
                    "caption", "center", "colgroup", "dd", "details", "dir", "div", "dl",
                    "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2",
                    "h3", "h4", "h5", "h6", "header", "hgroup", "html", "li", "main",
                    "marquee", "menu", "nav", "object", "ol", "p", "pre", "section",
                    "select", "summary", "table", "tbody", "td", "tfoot", "th", "thead",
                    "tr", "ul"});
}

inline bool is_heading(std::string_view t) {
  return t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6';
}

inline bool is_head_element(std::string_view t) {
  return one_of(t, {"base", "link", "meta", "title", "style", "script", "noscript"});
}

class HtmlTreeBuilder {
 public:
  DomTree build(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (is_blank(text)) throw ParseError("empty document");
    src_ = text;
    pos_ = 0;
    tokenize();
    if (tree_.nodes_.empty()) open_html();
    ensure_body();
    finalize();
    return std::move(tree_);
  }

 private:
  using Node = DomTree::Node;
  static constexpr std::uint32_t kNone = DomTree::kNone;

  // ---- tokenizer ----------------------------------------------------------

  void tokenize() {
    std::size_t text_start = 0;
    while (pos_ < src_.size()) {
      if (src_[pos_] != '<') {
        ++pos_;
        continue;
      }
      std::size_t lt = pos_;
      if (src_.compare(pos_, 4, "<!--") == 0) {
        flush_text(text_start, lt);
        auto end = src_.find("-->", pos_ + 4);
        pos_ = end == std::string_view::npos ? src_.size() : end + 3;
        text_start = pos_;
      } else if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '!' || src_[pos_ + 1] == '?')) {
        flush_text(text_start, lt);
        auto end = src_.find('>', pos_);
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
        text_start = pos_;
      } else if (pos_ + 2 < src_.size() && src_[pos_ + 1] == '/' && is_name_start(src_[pos_ + 2])) {
        flush_text(text_start, lt);
        pos_ += 2;
        std::string name = read_tag_name();
        auto end = src_.find('>', pos_);
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
        end_tag(name);
        text_start = pos_;
      } else if (pos_ + 1 < src_.size() && is_name_start(src_[pos_ + 1])) {
        flush_text(text_start, lt);
        ++pos_;
        std::string name = read_tag_name();
        bool self_closing = false;
        std::vector<Attribute> attrs = read_attributes(self_closing);
        start_tag(name, std::move(attrs), self_closing);
        if (is_raw_text_element(name) && !in_foreign()) {
          std::size_t close = find_raw_text_end(name);
          if (is_rcdata_element(name)) append_text(decode_entities(src_.substr(pos_, close - pos_)));
          pos_ = close;
          if (pos_ < src_.size()) {
            auto end = src_.find('>', pos_);
            pos_ = end == std::string_view::npos ? src_.size() : end + 1;
          }
          end_tag(name);
        }
        text_start = pos_;
      } else {
        ++pos_;
      }
    }
    flush_text(text_start, src_.size());
  }

  static bool is_name_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

  std::string read_tag_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '/' && src_[pos_] != '>')
      ++pos_;
    return to_lower(src_.substr(start, pos_ - start));
  }

  std::vector<Attribute> read_attributes(bool& self_closing) {
    std::vector<Attribute> attrs;
    while (pos_ < src_.size()) {
      while (pos_ < src_.size() && (is_space(src_[pos_]) || src_[pos_] == '/')) {
        if (src_[pos_] == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') self_closing = true;
        ++pos_;
      }
      if (pos_ >= src_.size()) break;
      if (src_[pos_] == '>') {
        ++pos_;
        break;
      }
      std::size_t start = pos_;
      ++pos_;  // the first character may be '=' per the tokenizer rules
      while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '/' && src_[pos_] != '>' &&
             src_[pos_] != '=')
        ++pos_;
      std::string name = to_lower(src_.substr(start, pos_ - start));
      std::size_t look = pos_;
      while (look < src_.size() && is_space(src_[look])) ++look;
      std::string value;
      if (look < src_.size() && src_[look] == '=') {
        pos_ = look + 1;
        while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          char quote = src_[pos_++];
          auto end = src_.find(quote, pos_);
          if (end == std::string_view::npos) end = src_.size();
          value = decode_entities(src_.substr(pos_, end - pos_));
          pos_ = std::min(end + 1, src_.size());
        } else {
          std::size_t vstart = pos_;
          while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
          value = decode_entities(src_.substr(vstart, pos_ - vstart));
        }
      }
      bool duplicate = std::any_of(attrs.begin(), attrs.end(),
                                   [&](const Attribute& a) { return a.name == name; });
      if (!duplicate) attrs.push_back({std::move(name), std::move(value)});
    }
    return attrs;
  }

  std::size_t find_raw_text_end(std::string_view name) const {
    std::size_t p = pos_;
    while (true) {
      p = src_.find("</", p);
      if (p == std::string_view::npos) return src_.size();
      if (p + 2 + name.size() <= src_.size() && iequals(src_.substr(p + 2, name.size()), name)) {
        std::size_t after = p + 2 + name.size();
        if (after >= src_.size() || is_space(src_[after]) || src_[after] == '>' || src_[after] == '/')
          return p;
      }
      p += 2;
    }
  }

  void flush_text(std::size_t begin, std::size_t end) {
    if (end <= begin) return;
    std::string_view raw = src_.substr(begin, end - begin);
    if (is_blank(raw) && !body_open()) return;
    append_text(decode_entities(raw));
  }

  // ---- tree construction --------------------------------------------------

  bool body_open() const { return body_ != kNone; }
  bool in_foreign() const { return foreign_depth_ > 0; }
  std::uint32_t current() const { return stack_.back(); }
  const std::string& current_tag() const { return tree_.nodes_[current()].tag; }

  std::uint32_t add_node(std::string tag, std::vector<Attribute> attrs, std::uint32_t parent) {
    auto index = static_cast<std::uint32_t>(tree_.nodes_.size());
    Node n;
    n.tag = std::move(tag);
    n.attributes = std::move(attrs);
    n.parent = parent;
    if (parent != kNone) {
      n.depth = tree_.nodes_[parent].depth + 1;
      tree_.nodes_[parent].children.push_back(ElementRef{index});
    }
    tree_.nodes_.push_back(std::move(n));
    return index;
  }

  void open_html(std::vector<Attribute> attrs = {}) {
    html_ = add_node("html", std::move(attrs), kNone);
    stack_ = {html_};
  }

  void merge_attributes(std::uint32_t target, std::vector<Attribute> attrs) {
    auto& existing = tree_.nodes_[target].attributes;
    for (auto& a : attrs) {
      bool present = std::any_of(existing.begin(), existing.end(),
                                 [&](const Attribute& e) { return e.name == a.name; });
      if (!present) existing.push_back(std::move(a));
    }
  }

  void ensure_head() {
    if (head_ != kNone) return;
    if (tree_.nodes_.empty()) open_html();
    head_ = add_node("head", {}, html_);
  }

  void ensure_body(std::vector<Attribute> attrs = {}) {
    if (body_open()) {
      merge_attributes(body_, std::move(attrs));
      return;
    }
    ensure_head();
    body_ = add_node("body", std::move(attrs), html_);
    stack_ = {html_, body_};
    foreign_depth_ = 0;
  }

  void append_text(std::string text) {
    if (text.empty()) return;
    if (!body_open()) {
      if (is_blank(text)) return;
      bool in_head_child = stack_.size() > 1 && head_ != kNone && stack_.back() != head_ &&
                           tree_.nodes_[stack_.back()].parent == head_;
      if (!in_head_child) ensure_body();
    }
    auto& n = tree_.nodes_[current()];
    auto pos = static_cast<std::uint32_t>(n.children.size());
    if (!n.text.empty() && n.text.back().before_child == pos)
      n.text.back().text += text;
    else
      n.text.push_back({pos, std::move(text)});
  }

  // Pops the stack down to and including the nearest element named in
  // `tags`, giving up at the first element for which `stops` holds.
  template <class StopFn>
  bool close_nearest(std::initializer_list<std::string_view> tags, StopFn stops) {
    for (std::size_t i = stack_.size(); i-- > 2;) {
      const auto& t = tree_.nodes_[stack_[i]].tag;
      if (one_of(t, tags)) {
        pop_to(i);
        return true;
      }
      if (stops(t)) return false;
    }
    return false;
  }

  bool close_nearest(std::initializer_list<std::string_view> tags,
                     std::initializer_list<std::string_view> barriers) {
    return close_nearest(tags, [&](std::string_view t) { return one_of(t, barriers); });
  }

  void pop_to(std::size_t depth) {
    while (stack_.size() > depth) {
      if (foreign_depth_ > 0) --foreign_depth_;
      stack_.pop_back();
    }
  }

  void push(std::uint32_t index) {
    stack_.push_back(index);
    if (foreign_depth_ > 0 || tree_.nodes_[index].tag == "svg" || tree_.nodes_[index].tag == "math")
      ++foreign_depth_;
  }

  void start_tag(const std::string& tag, std::vector<Attribute> attrs, bool self_closing) {
    if (tree_.nodes_.empty()) open_html(tag == "html" ? std::move(attrs) : std::vector<Attribute>{});
    if (tag == "html") {
      merge_attributes(html_, std::move(attrs));
      return;
    }
    if (!body_open() && (tag == "head" || is_head_element(tag))) {
      ensure_head();
      if (tag == "head") {
        merge_attributes(head_, std::move(attrs));
        stack_ = {html_, head_};
        return;
      }
      auto index = add_node(tag, std::move(attrs), head_);
      if (!is_void_element(tag)) stack_ = {html_, head_, index};
      return;
    }
    if (tag == "head") return;
    if (tag == "body") {
      ensure_body(std::move(attrs));
      return;
    }
    ensure_body();

    if (!in_foreign()) apply_implied_end_tags(tag);

    auto index = add_node(tag, std::move(attrs), current());
    bool foreign_self_close = self_closing && (in_foreign() || tag == "svg" || tag == "math");
    if (!is_void_element(tag) && !foreign_self_close) push(index);
  }

  void apply_implied_end_tags(const std::string& tag) {
    if (closes_paragraph(tag))
      close_nearest({"p"}, {"applet", "button", "caption", "marquee", "object", "table", "td", "th"});
    if (is_heading(tag) && is_heading(current_tag())) pop_to(stack_.size() - 1);
    auto list_barrier = [](std::string_view t) {
      return is_special(t) && !one_of(t, {"address", "div", "p"});
    };
    if (tag == "li") close_nearest({"li"}, list_barrier);
    if (tag == "dt" || tag == "dd") close_nearest({"dt", "dd"}, list_barrier);
    if (tag == "a") close_nearest({"a"}, {"table", "td", "th"});
    if (tag == "option" && current_tag() == "option") pop_to(stack_.size() - 1);
    if (tag == "optgroup") close_nearest({"option", "optgroup"}, {"select"});
    if (tag == "thead" || tag == "tbody" || tag == "tfoot") {
      close_nearest({"thead", "tbody", "tfoot"}, {"table"});
    }
    if (tag == "tr") {
      close_nearest({"tr"}, {"table", "thead", "tbody", "tfoot"});
      if (current_tag() == "table") push(add_node("tbody", {}, current()));
    }
    if (tag == "td" || tag == "th") {
      close_nearest({"td", "th"}, {"tr", "table"});
      if (current_tag() == "table") push(add_node("tbody", {}, current()));
      if (one_of(current_tag(), {"tbody", "thead", "tfoot"})) push(add_node("tr", {}, current()));
    }
  }

  void end_tag(const std::string& tag) {
    if (tree_.nodes_.empty() || tag == "html" || tag == "body" || tag == "br") return;
    if (tag == "head") {
      if (!body_open()) stack_ = {html_};
      return;
    }
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const auto& t = tree_.nodes_[stack_[i]].tag;
      if (t == tag) {
        pop_to(i);
        return;
      }
      if (t == "body") return;
    }
  }

  void finalize() {
    auto& nodes = tree_.nodes_;
    for (std::size_t i = nodes.size(); i-- > 0;) {
      auto& n = nodes[i];
      n.subtree_end = n.children.empty() ? static_cast<std::uint32_t>(i + 1)
                                         : nodes[n.children.back().index].subtree_end;
      std::string raw;
      for (const auto& run : n.text) raw += run.text;
      n.direct_text = collapse_whitespace(raw);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto& n = nodes[i];
      if (n.parent != kNone) {
        const auto& p = nodes[n.parent];
        n.in_svg = p.in_svg || p.tag == "svg";
      }
      for (const auto& a : n.attributes)
        if (a.name == "id" && !a.value.empty())
          tree_.first_id_.emplace(a.value, static_cast<std::uint32_t>(i));
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  DomTree tree_;
  std::vector<std::uint32_t> stack_;
  std::uint32_t html_ = kNone;
  std::uint32_t head_ = kNone;
  std::uint32_t body_ = kNone;
  int foreign_depth_ = 0;
};

}  // namespace detail

// Lenient HTML parsing: unclosed and misnested tags are recovered, and the
// html/head/body skeleton is synthesized when the source omits it, so
// absolute paths line up with what a browser would build.
inline DomTree parse_html(std::string_view text) { return detail::HtmlTreeBuilder{}.build(text); }

// Serializes back to HTML. Parsing the output yields the same tree shape.
inline std::string serialize(const DomTree& tree) {
  std::string out;
  auto emit = [&](auto&& self, ElementRef el) -> void {
    const auto& tag = tree.tag(el);
    out += '<';
    out += tag;
    for (const auto& a : tree.attributes(el)) {
      out += ' ';
      out += a.name;
      out += "=\"";
      out += detail::escape_attribute(a.value);
      out += '"';
    }
    if (detail::is_void_element(tag)) {
      out += '>';
      return;
    }
    bool childless_foreign = tree.in_svg(el) && tree.children(el).empty() && tree.text_runs(el).empty();
    if (childless_foreign) {
      out += "/>";
      return;
    }
    out += '>';
    auto children = tree.children(el);
    auto runs = tree.text_runs(el);
    std::size_t run = 0;
    for (std::uint32_t c = 0; c <= children.size(); ++c) {
      while (run < runs.size() && runs[run].before_child == c)
        out += detail::escape_text(runs[run++].text);
      if (c < children.size()) self(self, children[c]);
    }
    out += "</";
    out += tag;
    out += '>';
  };
  emit(emit, tree.root());
  return out;
}

// ---- candidate selection ----------------------------------------------------

struct CandidatePolicy {
  std::vector<std::string> tags{"input", "button", "select", "a",    "h1", "h2", "h3",
                                "h4",    "h5",     "li",     "span", "p",  "th", "tr",
                                "td",    "label",  "svg"};
  bool include_containers = false;

  bool accepts(std::string_view tag) const {
    if (include_containers && detail::one_of(tag, {"div", "frame", "iframe"})) return true;
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
  }
};

struct RenderInfo {
  bool visible = true;
  std::optional<Geometry> geometry;
};

// Per-element layout data merged in from a page capture. Elements the capture
// does not mention are treated as not rendered.
class Rendering {
 public:
  Rendering() = default;
  explicit Rendering(std::size_t element_count) : info_(element_count) {}

  void set(ElementRef el, RenderInfo info) {
    if (el.index >= info_.size()) info_.resize(el.index + 1);
    info_[el.index] = std::move(info);
  }

  const RenderInfo* get(ElementRef el) const {
    if (el.index >= info_.size() || !info_[el.index]) return nullptr;
    return &*info_[el.index];
  }

  bool visible(ElementRef el) const {
    const auto* i = get(el);
    return i != nullptr && i->visible;
  }

  std::optional<Geometry> geometry(ElementRef el) const {
    const auto* i = get(el);
    return i != nullptr ? i->geometry : std::nullopt;
  }

 private:
  std::vector<std::optional<RenderInfo>> info_;
};

// Policy-matching elements in document order. Descendants of <svg> are never
// candidates; with rendering data, only visible elements are.
inline std::vector<ElementRef> candidates(const DomTree& tree, const CandidatePolicy& policy = {},
                                          const Rendering* rendering = nullptr) {
  std::vector<ElementRef> out;
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    ElementRef el{i};
    if (tree.in_svg(el) || !policy.accepts(tree.tag(el))) continue;
    if (rendering != nullptr && !rendering->visible(el)) continue;
    out.push_back(el);
  }
  return out;
}

}  // namespace similo
