#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "similo/dom.hpp"
#include "similo/similarity.hpp"
#include "similo/xpath.hpp"

namespace similo {

// The fourteen locator parameters compared between a target and a candidate.
enum class Param : std::size_t {
  Tag,
  Class,
  Name,
  Id,
  HRef,
  Alt,
  AbsoluteXPath,
  IdRelativeXPath,
  IsButton,
  Location,
  Area,
  Shape,
  VisibleText,
  NeighborTexts,
};

inline constexpr std::size_t kParamCount = 14;

inline constexpr std::array<Param, kParamCount> kAllParams{
    Param::Tag,           Param::Class,           Param::Name,     Param::Id,
    Param::HRef,          Param::Alt,             Param::AbsoluteXPath,
    Param::IdRelativeXPath, Param::IsButton,      Param::Location, Param::Area,
    Param::Shape,         Param::VisibleText,     Param::NeighborTexts};

inline constexpr std::array<std::string_view, kParamCount> kParamNames{
    "tag",       "class",    "name",     "id",   "href",  "alt",          "absolute_xpath",
    "id_relative_xpath", "is_button", "location", "area", "shape", "visible_text", "neighbor_texts"};

inline constexpr std::string_view param_name(Param p) { return kParamNames[static_cast<std::size_t>(p)]; }

inline std::optional<Param> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kParamCount; ++i)
    if (kParamNames[i] == name) return static_cast<Param>(i);
  return std::nullopt;
}

class WeightVector {
 public:
  // 1.5 for the stable group (tag, name, id, visible text, neighbor texts),
  // 0.5 for the rest.
  static WeightVector defaults() {
    WeightVector w;
    w.weights_.fill(0.5);
    for (Param p : {Param::Tag, Param::Name, Param::Id, Param::VisibleText, Param::NeighborTexts})
      w[p] = 1.5;
    return w;
  }

  static WeightVector uniform(double value) {
    WeightVector w;
    w.weights_.fill(value);
    return w;
  }

  double& operator[](Param p) { return weights_[static_cast<std::size_t>(p)]; }
  double operator[](Param p) const { return weights_[static_cast<std::size_t>(p)]; }

  double sum() const {
    double s = 0;
    for (double v : weights_) s += v;
    return s;
  }

  WeightVector scaled(double c) const {
    WeightVector w = *this;
    for (double& v : w.weights_) v *= c;
    return w;
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::array<double, kParamCount> weights_{};
};

struct ElementSnapshot {
  std::string tag;
  std::string class_name;
  std::string name;
  std::string id;
  std::string href;
  std::string alt;
  XPathString absolute_xpath;
  XPathString id_relative_xpath;
  bool is_button = false;
  std::optional<Point> location;
  std::optional<double> area;
  std::optional<double> shape;
  std::string visible_text;
  std::vector<std::string> neighbor_texts;  // sorted, deduplicated, lowercased

  // Whether the parameter carries evidence. Absent parameters score 0.
  bool has(Param p) const {
    switch (p) {
      case Param::Tag: return !detail::is_blank(tag);
      case Param::Class: return !detail::is_blank(class_name);
      case Param::Name: return !detail::is_blank(name);
      case Param::Id: return !detail::is_blank(id);
      case Param::HRef: return !detail::is_blank(href);
      case Param::Alt: return !detail::is_blank(alt);
      case Param::AbsoluteXPath: return !detail::is_blank(absolute_xpath);
      case Param::IdRelativeXPath: return !detail::is_blank(id_relative_xpath);
      case Param::IsButton: return true;
      case Param::Location: return location.has_value();
      case Param::Area: return area.has_value();
      case Param::Shape: return shape.has_value();
      case Param::VisibleText: return !detail::is_blank(visible_text);
      case Param::NeighborTexts: return !neighbor_texts.empty();
    }
    return false;
  }

  friend bool operator==(const ElementSnapshot&, const ElementSnapshot&) = default;
};

struct ScoringOptions {
  WeightVector weights = WeightVector::defaults();
  StringNormalization normalization = StringNormalization::MaxLength;
  double location_radius = 100.0;
};

struct SimilarityBreakdown {
  std::array<double, kParamCount> similarity{};
  std::array<double, kParamCount> contribution{};
  double total = 0;

  double similarity_of(Param p) const { return similarity[static_cast<std::size_t>(p)]; }
  double contribution_of(Param p) const { return contribution[static_cast<std::size_t>(p)]; }
};

// Similarity of one parameter, 0 when either side lacks it.
inline double parameter_similarity(Param p, const ElementSnapshot& a, const ElementSnapshot& b,
                                   const ScoringOptions& options = {}) {
  if (!a.has(p) || !b.has(p)) return 0.0;
  auto text = [&](std::string_view x, std::string_view y) {
    return string_similarity(x, y, options.normalization);
  };
  switch (p) {
    case Param::Tag: return exact_similarity(a.tag, b.tag);
    case Param::Name: return exact_similarity(a.name, b.name);
    case Param::Id: return exact_similarity(a.id, b.id);
    case Param::IsButton:
      return exact_similarity(a.is_button ? "true" : "false", b.is_button ? "true" : "false");
    case Param::Class: return text(a.class_name, b.class_name);
    case Param::HRef: return text(a.href, b.href);
    case Param::Alt: return text(a.alt, b.alt);
    case Param::AbsoluteXPath: return text(a.absolute_xpath, b.absolute_xpath);
    case Param::IdRelativeXPath: return text(a.id_relative_xpath, b.id_relative_xpath);
    case Param::VisibleText: return text(a.visible_text, b.visible_text);
    case Param::Location: return location_similarity(*a.location, *b.location, options.location_radius);
    case Param::Area: return scalar_similarity(*a.area, *b.area);
    case Param::Shape: return scalar_similarity(*a.shape, *b.shape);
    case Param::NeighborTexts: return word_set_similarity(a.neighbor_texts, b.neighbor_texts);
  }
  return 0.0;
}

inline SimilarityBreakdown similarity_score(const ElementSnapshot& target, const ElementSnapshot& candidate,
                                            const ScoringOptions& options = {}) {
  SimilarityBreakdown out;
  for (Param p : kAllParams) {
    auto i = static_cast<std::size_t>(p);
    double w = options.weights[p];
    if (w == 0) continue;
    out.similarity[i] = parameter_similarity(p, target, candidate, options);
    out.contribution[i] = w * out.similarity[i];
    out.total += out.contribution[i];
  }
  return out;
}

struct Candidate {
  ElementRef ref;
  ElementSnapshot snapshot;
};

struct RankedMatch {
  ElementRef candidate;
  double score = 0;
  SimilarityBreakdown breakdown;
  std::size_t rank = 0;  // 1-based
};

// Full ranking, best first; ties go to the earlier element in the document.
// With a threshold, matches scoring below it are dropped, so an empty result
// means no acceptable match.
inline std::vector<RankedMatch> rank_candidates(const ElementSnapshot& target,
                                                std::span<const Candidate> candidates,
                                                const ScoringOptions& options = {},
                                                std::optional<double> threshold = std::nullopt) {
  std::vector<RankedMatch> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto breakdown = similarity_score(target, c.snapshot, options);
    if (threshold && breakdown.total < *threshold) continue;
    out.push_back({c.ref, breakdown.total, breakdown, 0});
  }
  std::sort(out.begin(), out.end(), [](const RankedMatch& a, const RankedMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate < b.candidate;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

// Single best candidate without building the ranking.
inline std::optional<RankedMatch> best_candidate(const ElementSnapshot& target,
                                                 std::span<const Candidate> candidates,
                                                 const ScoringOptions& options = {}) {
  std::optional<RankedMatch> best;
  for (const auto& c : candidates) {
    auto breakdown = similarity_score(target, c.snapshot, options);
    bool better = !best || breakdown.total > best->score ||
                  (breakdown.total == best->score && c.ref < best->candidate);
    if (better) best = RankedMatch{c.ref, breakdown.total, breakdown, 1};
  }
  return best;
}

}  // namespace similo
