#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "similo/dom.hpp"
#include "similo/locators.hpp"
#include "similo/xpath.hpp"

namespace similo {

struct LocatorOutcome {
  LocatorKind kind = LocatorKind::AbsoluteXPath;
  std::vector<ElementRef> matches;
  bool usable = false;  // exactly one match
  std::string error;    // evaluation failure, if any
};

enum class VotingVariant { UnweightedWorstOrder, UnweightedBestOrder, Weighted, TheoreticalLimit };

inline constexpr std::string_view voting_variant_name(VotingVariant v) {
  switch (v) {
    case VotingVariant::UnweightedWorstOrder: return "worst_order";
    case VotingVariant::UnweightedBestOrder: return "best_order";
    case VotingVariant::Weighted: return "weighted";
    case VotingVariant::TheoreticalLimit: return "theoretical_limit";
  }
  return "?";
}

inline std::optional<VotingVariant> voting_variant_from_name(std::string_view name) {
  for (auto v : {VotingVariant::UnweightedWorstOrder, VotingVariant::UnweightedBestOrder,
                 VotingVariant::Weighted, VotingVariant::TheoreticalLimit})
    if (voting_variant_name(v) == name) return v;
  return std::nullopt;
}

// Per-kind vote weights. The defaults are each locator's share of elements
// located across version changes in the reference robustness study.
struct LocatorWeights {
  std::array<double, 5> weight{125.0 / 598, 244.0 / 598, 319.0 / 598, 323.0 / 598, 387.0 / 598};

  double operator[](LocatorKind k) const { return weight[static_cast<std::size_t>(k)]; }
  double& operator[](LocatorKind k) { return weight[static_cast<std::size_t>(k)]; }

  bool valid() const {
    return std::all_of(weight.begin(), weight.end(), [](double w) { return w > 0; });
  }
};

struct VotingOptions {
  LocatorWeights weights;
  // Kind ranking used to break ties, earliest first.
  std::array<LocatorKind, 5> kind_order = kLocatorKinds;

  std::size_t rank(LocatorKind k) const {
    return static_cast<std::size_t>(std::find(kind_order.begin(), kind_order.end(), k) - kind_order.begin());
  }
};

// Runs every locator of the set against the new tree. Locators that fail to
// evaluate are recorded with no matches.
inline std::vector<LocatorOutcome> execute_locators(const LocatorSet& set, const DomTree& new_tree) {
  std::vector<LocatorOutcome> out;
  out.reserve(set.locators.size());
  for (const auto& l : set.locators) {
    LocatorOutcome o;
    o.kind = l.kind;
    try {
      o.matches = evaluate(new_tree, l.expr);
    } catch (const Error& e) {
      o.error = e.what();
    }
    o.usable = o.matches.size() == 1;
    out.push_back(std::move(o));
  }
  return out;
}

// Tallies usable outcomes. Ties between elements are broken by the earliest
// kind (per options.kind_order) supporting each: best order takes the element
// with the earliest such supporter, worst order the one with the latest. The
// weighted variant breaks its ties like best order. TheoreticalLimit needs an
// oracle and is handled by theoretical_limit(); here it behaves like best order.
inline std::optional<ElementRef> vote(const std::vector<LocatorOutcome>& outcomes, VotingVariant variant,
                                      const VotingOptions& options = {}) {
  struct Tally {
    double votes = 0;
    std::size_t first_kind = kLocatorKinds.size();
  };
  std::map<ElementRef, Tally> tally;
  for (const auto& o : outcomes) {
    if (!o.usable) continue;
    auto& t = tally[o.matches.front()];
    t.votes += variant == VotingVariant::Weighted ? options.weights[o.kind] : 1.0;
    t.first_kind = std::min(t.first_kind, options.rank(o.kind));
  }
  if (tally.empty()) return std::nullopt;
  bool pessimistic = variant == VotingVariant::UnweightedWorstOrder;
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    const auto& a = it->second;
    const auto& b = best->second;
    if (a.votes != b.votes) {
      if (a.votes > b.votes) best = it;
      continue;
    }
    bool wins = pessimistic ? a.first_kind > b.first_kind : a.first_kind < b.first_kind;
    if (wins) best = it;
  }
  return best->first;
}

// True when any usable outcome's element tolerantly matches the oracle path.
inline bool theoretical_limit(const std::vector<LocatorOutcome>& outcomes, const DomTree& new_tree,
                              std::string_view oracle) {
  return std::any_of(outcomes.begin(), outcomes.end(), [&](const LocatorOutcome& o) {
    return o.usable && tolerant_match(absolute_xpath(new_tree, o.matches.front()), oracle);
  });
}

}  // namespace similo
