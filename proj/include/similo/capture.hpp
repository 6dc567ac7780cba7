#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "similo/dom.hpp"
#include "similo/page.hpp"
#include "similo/xpath.hpp"

namespace similo {

inline constexpr int kCaptureSchemaVersion = 1;

struct CapturedElement {
  XPathString absolute_xpath;
  std::string tag;
  std::map<std::string, std::string> attributes;
  bool visible = false;
  std::optional<Geometry> geometry;  // document coordinates, CSS pixels
  std::string visible_text;

  friend bool operator==(const CapturedElement&, const CapturedElement&) = default;
};

struct PageCapture {
  std::string url;
  std::string captured_at;  // ISO-8601
  std::vector<CapturedElement> elements;
  nlohmann::json metadata = nlohmann::json::object();

  friend bool operator==(const PageCapture&, const PageCapture&) = default;
};

struct SchemaIssue {
  std::string path;  // e.g. "elements[3].geometry.width"
  std::string reason;
};

class CaptureError : public Error {
 public:
  explicit CaptureError(std::vector<SchemaIssue> issues)
      : Error(describe(issues)), issues_(std::move(issues)) {}

  const std::vector<SchemaIssue>& issues() const { return issues_; }

 private:
  static std::string describe(const std::vector<SchemaIssue>& issues) {
    std::string s = "invalid page capture:";
    for (const auto& i : issues) s += "\n  " + i.path + ": " + i.reason;
    return s;
  }

  std::vector<SchemaIssue> issues_;
};

namespace detail {

inline bool is_iso8601(const std::string& s) {
  static const std::regex re(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)");
  return std::regex_match(s, re);
}

class CaptureReader {
 public:
  PageCapture read(const nlohmann::json& doc) {
    PageCapture out;
    if (!doc.is_object()) {
      issue("$", "expected an object");
      throw CaptureError(std::move(issues_));
    }
    if (auto v = field(doc, "schema_version", "$")) {
      if (!v->is_number_integer())
        issue("schema_version", "expected an integer");
      else if (v->get<int>() != kCaptureSchemaVersion)
        issue("schema_version", "unsupported version " + v->dump());
    }
    out.url = string_field(doc, "url", "$").value_or("");
    if (auto at = string_field(doc, "captured_at", "$"); at) {
      if (!is_iso8601(*at)) issue("captured_at", "not an ISO-8601 timestamp");
      out.captured_at = *at;
    }
    if (auto md = doc.find("metadata"); md != doc.end()) {
      if (md->is_object())
        out.metadata = *md;
      else
        issue("metadata", "expected an object");
    }
    if (auto els = field(doc, "elements", "$")) {
      if (!els->is_array()) {
        issue("elements", "expected an array");
      } else {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < els->size(); ++i) {
          auto el = element((*els)[i], "elements[" + std::to_string(i) + "]");
          if (!el.absolute_xpath.empty() && !seen.insert(el.absolute_xpath).second)
            issue("elements[" + std::to_string(i) + "].absolute_xpath",
                  "duplicate xpath " + el.absolute_xpath);
          out.elements.push_back(std::move(el));
        }
      }
    }
    if (!issues_.empty()) throw CaptureError(std::move(issues_));
    return out;
  }

 private:
  void issue(std::string path, std::string reason) { issues_.push_back({std::move(path), std::move(reason)}); }

  static std::string join(const std::string& parent, const char* key) {
    return parent == "$" ? std::string(key) : parent + "." + key;
  }

  const nlohmann::json* field(const nlohmann::json& obj, const char* key, const std::string& parent) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      issue(join(parent, key), "missing field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string_field(const nlohmann::json& obj, const char* key, const std::string& parent) {
    const auto* v = field(obj, key, parent);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) {
      issue(join(parent, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<Geometry> geometry(const nlohmann::json& g, const std::string& path) {
    if (!g.is_object()) {
      issue(path, "malformed geometry: expected an object");
      return std::nullopt;
    }
    Geometry out;
    bool ok = true;
    for (auto [key, slot] : {std::pair{"x", &out.x}, {"y", &out.y}, {"width", &out.width}, {"height", &out.height}}) {
      auto it = g.find(key);
      if (it == g.end() || !it->is_number()) {
        issue(path + "." + key, it == g.end() ? "malformed geometry: missing" : "malformed geometry: not a number");
        ok = false;
        continue;
      }
      *slot = it->get<double>();
    }
    if (ok && (out.width < 0 || out.height < 0)) {
      issue(path, "malformed geometry: negative size");
      ok = false;
    }
    return ok ? std::optional<Geometry>(out) : std::nullopt;
  }

  CapturedElement element(const nlohmann::json& e, const std::string& path) {
    CapturedElement out;
    if (!e.is_object()) {
      issue(path, "expected an object");
      return out;
    }
    out.absolute_xpath = string_field(e, "absolute_xpath", path).value_or("");
    out.tag = string_field(e, "tag", path).value_or("");
    out.visible_text = string_field(e, "visible_text", path).value_or("");
    if (const auto* attrs = field(e, "attributes", path)) {
      if (!attrs->is_object()) {
        issue(path + ".attributes", "expected an object");
      } else {
        for (const auto& [k, v] : attrs->items()) {
          if (v.is_string())
            out.attributes[k] = v.get<std::string>();
          else
            issue(path + ".attributes." + k, "expected a string");
        }
      }
    }
    auto g = e.find("geometry");
    bool has_geometry = g != e.end() && !g->is_null();
    auto vis = e.find("visible");
    if (vis == e.end()) {
      issue(path + ".visible", has_geometry ? "geometry present without visible flag" : "missing field");
    } else if (!vis->is_boolean()) {
      issue(path + ".visible", "expected a boolean");
    } else {
      out.visible = vis->get<bool>();
    }
    if (has_geometry) out.geometry = geometry(*g, path + ".geometry");
    return out;
  }

  std::vector<SchemaIssue> issues_;
};

}  // namespace detail

inline PageCapture capture_from_json(const nlohmann::json& doc) { return detail::CaptureReader{}.read(doc); }

inline nlohmann::json capture_to_json(const PageCapture& c) {
  nlohmann::json doc;
  doc["schema_version"] = kCaptureSchemaVersion;
  doc["url"] = c.url;
  doc["captured_at"] = c.captured_at;
  auto& els = doc["elements"] = nlohmann::json::array();
  for (const auto& e : c.elements) {
    nlohmann::json j;
    j["absolute_xpath"] = e.absolute_xpath;
    j["tag"] = e.tag;
    j["attributes"] = e.attributes;
    j["visible"] = e.visible;
    if (e.geometry)
      j["geometry"] = {{"x", e.geometry->x}, {"y", e.geometry->y},
                       {"width", e.geometry->width}, {"height", e.geometry->height}};
    j["visible_text"] = e.visible_text;
    els.push_back(std::move(j));
  }
  if (!c.metadata.empty()) doc["metadata"] = c.metadata;
  return doc;
}

inline PageCapture parse_capture(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CaptureError({{"$", std::string("invalid JSON: ") + e.what()}});
  }
  return capture_from_json(doc);
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << data;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace detail

inline PageCapture load_capture(const std::filesystem::path& path) {
  return parse_capture(detail::read_file(path));
}

inline void save_capture(const PageCapture& capture, const std::filesystem::path& path) {
  detail::write_file(path, capture_to_json(capture).dump(2) + "\n");
}

// Static capture of a page: every candidate, visible, without geometry.
inline PageCapture capture_from_page(const Page& page, std::string url = {}, std::string captured_at = {}) {
  PageCapture c;
  c.url = std::move(url);
  c.captured_at = captured_at.empty() ? "1970-01-01T00:00:00Z" : std::move(captured_at);
  for (ElementRef el : page.candidates()) {
    CapturedElement e;
    e.absolute_xpath = page.absolute_xpath(el);
    e.tag = page.tree().tag(el);
    for (const auto& a : page.tree().attributes(el)) e.attributes.emplace(a.name, a.value);
    e.visible = true;
    e.visible_text = page.visible_text(el);
    c.elements.push_back(std::move(e));
  }
  return c;
}

struct MergedRendering {
  Rendering rendering;
  std::vector<XPathString> unresolved;  // capture entries with no element in the tree
};

// Maps capture entries onto the tree by absolute XPath. Tree elements the
// capture does not mention end up without render info, hence invisible.
inline MergedRendering merge_capture(const DomTree& tree, const PageCapture& capture) {
  std::unordered_map<std::string, ElementRef> by_path;
  by_path.reserve(tree.size());
  for (std::uint32_t i = 0; i < tree.size(); ++i) by_path.emplace(absolute_xpath(tree, ElementRef{i}), ElementRef{i});
  MergedRendering out{Rendering(tree.size()), {}};
  for (const auto& e : capture.elements) {
    auto it = by_path.find(e.absolute_xpath);
    if (it == by_path.end()) {
      out.unresolved.push_back(e.absolute_xpath);
      continue;
    }
    out.rendering.set(it->second, RenderInfo{e.visible, e.geometry});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark datasets: one directory per site holding old.html, new.html,
// targets.json and optionally old.capture.json / new.capture.json.

struct Target {
  XPathString old_xpath;
  XPathString oracle_new_xpath;
};

struct BenchmarkCase {
  std::string site;
  std::shared_ptr<const Page> old_page;
  std::shared_ptr<const Page> new_page;
  std::vector<Target> targets;
};

struct CaseError {
  std::string site;
  std::string message;
};

struct BenchmarkDataset {
  std::vector<BenchmarkCase> cases;
  std::vector<CaseError> errors;
  std::vector<std::string> warnings;
  std::optional<std::size_t> manifest_targets;  // total declared in manifest.json

  std::size_t target_count() const {
    std::size_t n = 0;
    for (const auto& c : cases) n += c.targets.size();
    return n;
  }
};

namespace detail {

inline std::shared_ptr<const Page> load_page(const std::filesystem::path& html, const std::filesystem::path& capture,
                                             const CandidatePolicy& policy, std::vector<std::string>& warnings) {
  DomTree tree = parse_html(read_file(html));
  std::optional<Rendering> rendering;
  if (std::filesystem::exists(capture)) {
    auto merged = merge_capture(tree, load_capture(capture));
    if (!merged.unresolved.empty())
      warnings.push_back(capture.string() + ": " + std::to_string(merged.unresolved.size()) +
                         " captured element(s) not found in the HTML");
    rendering = std::move(merged.rendering);
  }
  return std::make_shared<const Page>(std::move(tree), std::move(rendering), policy);
}

inline std::vector<Target> parse_targets(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  std::vector<Target> out;
  const auto& list = doc.at("targets");
  if (!list.is_array()) throw Error("targets.json: \"targets\" must be an array");
  for (const auto& t : list)
    out.push_back({t.at("old_xpath").get<std::string>(), t.at("oracle_new_xpath").get<std::string>()});
  return out;
}

inline std::optional<ElementRef> resolve_unique(const Page& page, const std::string& path, std::string& why) {
  try {
    auto m = evaluate(page.tree(), path);
    if (m.size() == 1) return m.front();
    why = std::to_string(m.size()) + " matches";
  } catch (const Error& e) {
    why = e.what();
  }
  return std::nullopt;
}

}  // namespace detail

inline BenchmarkCase load_case(const std::filesystem::path& dir, const CandidatePolicy& policy,
                               std::vector<std::string>& warnings) {
  namespace fs = std::filesystem;
  BenchmarkCase c;
  c.site = dir.filename().string();
  for (const char* f : {"old.html", "new.html", "targets.json"})
    if (!fs::exists(dir / f)) throw Error(std::string("missing ") + f);
  c.old_page = detail::load_page(dir / "old.html", dir / "old.capture.json", policy, warnings);
  c.new_page = detail::load_page(dir / "new.html", dir / "new.capture.json", policy, warnings);
  try {
    c.targets = detail::parse_targets(detail::read_file(dir / "targets.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("targets.json: ") + e.what());
  }
  std::string problems;
  for (std::size_t i = 0; i < c.targets.size(); ++i) {
    std::string why;
    const auto& t = c.targets[i];
    if (!detail::resolve_unique(*c.old_page, t.old_xpath, why))
      problems += "target " + std::to_string(i) + ": old_xpath " + t.old_xpath + " does not resolve (" + why + "); ";
    if (!detail::resolve_unique(*c.new_page, t.oracle_new_xpath, why))
      problems += "target " + std::to_string(i) + ": oracle_new_xpath " + t.oracle_new_xpath +
                  " does not resolve (" + why + "); ";
  }
  if (!problems.empty()) {
    problems.resize(problems.size() - 2);
    throw Error(problems);
  }
  return c;
}

// Loads every site directory, in name order. Sites that fail validation are
// reported in `errors` and left out; the rest still load.
inline BenchmarkDataset load_benchmark(const std::filesystem::path& root, const CandidatePolicy& policy = {}) {
  namespace fs = std::filesystem;
  BenchmarkDataset out;
  if (!fs::is_directory(root)) {
    out.errors.push_back({root.string(), "not a directory"});
    return out;
  }
  std::vector<fs::path> sites;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) sites.push_back(entry.path());
  std::sort(sites.begin(), sites.end());
  if (sites.empty()) out.warnings.push_back(root.string() + ": no site directories");
  for (const auto& dir : sites) {
    try {
      out.cases.push_back(load_case(dir, policy, out.warnings));
    } catch (const std::exception& e) {
      out.errors.push_back({dir.filename().string(), e.what()});
    }
  }
  if (fs::exists(root / "manifest.json")) {
    try {
      auto m = nlohmann::json::parse(detail::read_file(root / "manifest.json"));
      std::size_t total = 0;
      for (const auto& s : m.at("sites")) total += s.at("targets").get<std::size_t>();
      out.manifest_targets = total;
      if (out.errors.empty() && total != out.target_count())
        out.warnings.push_back("manifest declares " + std::to_string(total) + " targets, loaded " +
                               std::to_string(out.target_count()));
    } catch (const nlohmann::json::exception& e) {
      out.warnings.push_back(std::string("manifest.json: ") + e.what());
    }
  }
  return out;
}

}  // namespace similo
