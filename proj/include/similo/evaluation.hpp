#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "similo/capture.hpp"
#include "similo/locators.hpp"
#include "similo/multilocator.hpp"
#include "similo/page.hpp"
#include "similo/scoring.hpp"

namespace similo {

inline constexpr std::array<std::string_view, 10> kApproaches{
    "absolute",       "id_relative",   "selenium_ide", "montoto",   "robula_plus",
    "lml_worst_order", "lml_best_order", "lml_weighted", "lml_limit", "similo"};

inline bool is_approach(std::string_view name) {
  return std::find(kApproaches.begin(), kApproaches.end(), name) != kApproaches.end();
}

enum class Outcome { Located, NonLocated };

struct LocalizationResult {
  std::string approach;
  Outcome outcome = Outcome::NonLocated;
  std::optional<XPathString> chosen;  // absolute xpath of the picked element
  double elapsed_us = 0;              // ranking time, Similo only
  std::string error;
  std::string site;
  std::size_t target = 0;
};

struct EvaluationConfig {
  ScoringOptions scoring;
  ExtractionOptions extraction;
  GeneratorConfig generator;
  VotingOptions voting;
  std::optional<double> threshold;
  std::size_t repeats = 3;
  std::vector<std::string> approaches;  // empty: all
  std::size_t jobs = 1;

  bool wants(std::string_view approach) const {
    return approaches.empty() || std::find(approaches.begin(), approaches.end(), approach) != approaches.end();
  }
};

struct CaseTiming {
  std::size_t targets = 0;      // timed targets
  std::size_t comparisons = 0;  // target-candidate pairs scored per repeat
  double total_us = 0;          // mean over repeats of the summed ranking time
};

struct CaseResult {
  std::string site;
  std::size_t targets = 0;
  std::vector<LocalizationResult> results;
  CaseTiming timing;
};

namespace detail {

inline LocalizationResult judge(std::string_view approach, const Page& page, std::optional<ElementRef> picked,
                                std::string_view oracle) {
  LocalizationResult r;
  r.approach = std::string(approach);
  if (picked) {
    r.chosen = page.absolute_xpath(*picked);
    if (tolerant_match(*r.chosen, oracle)) r.outcome = Outcome::Located;
  }
  return r;
}

inline std::optional<ElementRef> old_element(const BenchmarkCase& c, const Target& t, std::string& error) {
  try {
    auto m = evaluate(c.old_page->tree(), t.old_xpath);
    if (m.size() == 1) return m.front();
    error = "old_xpath matches " + std::to_string(m.size()) + " elements";
  } catch (const Error& e) {
    error = e.what();
  }
  return std::nullopt;
}

}  // namespace detail

// Localizes every target with each selected approach. Similo's ranking is
// timed `repeats` times per target unless `timed` is false.
inline CaseResult run_case(const BenchmarkCase& c, const EvaluationConfig& config, bool timed = true) {
  CaseResult out;
  out.site = c.site;
  out.targets = c.targets.size();
  const Page& np = *c.new_page;
  std::vector<Candidate> pool;
  if (config.wants("similo")) pool = candidate_snapshots(np, config.extraction);

  for (std::size_t ti = 0; ti < c.targets.size(); ++ti) {
    const Target& t = c.targets[ti];
    std::vector<LocalizationResult> rs;
    std::string error;
    auto el = detail::old_element(c, t, error);
    if (!el) {
      for (auto a : kApproaches) {
        if (!config.wants(a)) continue;
        LocalizationResult r;
        r.approach = std::string(a);
        r.error = error;
        rs.push_back(std::move(r));
      }
    } else {
      bool need_locators = std::any_of(kApproaches.begin(), kApproaches.end() - 1,
                                       [&](std::string_view a) { return config.wants(a); });
      if (need_locators) {
        auto set = gen_all(c.old_page->tree(), *el, config.generator);
        auto outcomes = execute_locators(set, np.tree());
        for (const auto& o : outcomes) {
          auto name = locator_kind_name(o.kind);
          if (!config.wants(name)) continue;
          auto r = detail::judge(name, np, o.usable ? std::optional(o.matches.front()) : std::nullopt,
                                 t.oracle_new_xpath);
          r.error = o.error;
          rs.push_back(std::move(r));
        }
        // No Montoto locator could be generated: it still counts, as a miss.
        bool has_montoto = std::any_of(outcomes.begin(), outcomes.end(),
                                       [](const LocatorOutcome& o) { return o.kind == LocatorKind::Montoto; });
        if (!has_montoto && config.wants("montoto")) {
          LocalizationResult r;
          r.approach = "montoto";
          r.error = "no unique locator at generation";
          rs.push_back(std::move(r));
        }
        const std::pair<std::string_view, VotingVariant> variants[] = {
            {"lml_worst_order", VotingVariant::UnweightedWorstOrder},
            {"lml_best_order", VotingVariant::UnweightedBestOrder},
            {"lml_weighted", VotingVariant::Weighted}};
        for (auto [name, v] : variants)
          if (config.wants(name))
            rs.push_back(detail::judge(name, np, vote(outcomes, v, config.voting), t.oracle_new_xpath));
        if (config.wants("lml_limit")) {
          LocalizationResult r;
          r.approach = "lml_limit";
          if (theoretical_limit(outcomes, np.tree(), t.oracle_new_xpath)) r.outcome = Outcome::Located;
          rs.push_back(std::move(r));
        }
      }
      if (config.wants("similo")) {
        auto target = extract_snapshot(*c.old_page, *el, config.extraction);
        auto ranked = rank_candidates(target, pool, config.scoring, config.threshold);
        std::optional<ElementRef> top;
        if (!ranked.empty()) top = ranked.front().candidate;
        auto r = detail::judge("similo", np, top, t.oracle_new_xpath);
        if (timed) {
          std::size_t reps = std::max<std::size_t>(1, config.repeats);
          double sum = 0;
          for (std::size_t k = 0; k < reps; ++k) {
            auto t0 = std::chrono::steady_clock::now();
            auto again = rank_candidates(target, pool, config.scoring, config.threshold);
            auto t1 = std::chrono::steady_clock::now();
            sum += std::chrono::duration<double, std::micro>(t1 - t0).count();
            if (again.size() != ranked.size()) throw Error("non-deterministic ranking");
          }
          r.elapsed_us = sum / static_cast<double>(reps);
          out.timing.targets += 1;
          out.timing.comparisons += pool.size();
          out.timing.total_us += r.elapsed_us;
        }
        rs.push_back(std::move(r));
      }
    }
    for (auto& r : rs) {
      r.site = c.site;
      r.target = ti;
      out.results.push_back(std::move(r));
    }
  }
  return out;
}

struct ApproachTotals {
  std::string approach;
  std::size_t located = 0;
  std::size_t non_located = 0;

  std::size_t total() const { return located + non_located; }
  double non_located_pct() const { return total() == 0 ? 0.0 : 100.0 * non_located / total(); }
};

struct SiteBreakdown {
  std::string site;
  std::size_t targets = 0;
  std::vector<ApproachTotals> approaches;
};

struct TimingSummary {
  std::size_t repeats = 0;
  std::size_t targets = 0;
  std::size_t comparisons = 0;
  double total_ms = 0;
  double per_target_ms = 0;
  double per_comparison_ms = 0;
};

struct BenchmarkReport {
  std::vector<ApproachTotals> approaches;
  std::vector<SiteBreakdown> sites;
  TimingSummary timing;
  std::vector<CaseError> errors;
  std::vector<LocalizationResult> results;

  const ApproachTotals* find(std::string_view approach) const {
    for (const auto& a : approaches)
      if (a.approach == approach) return &a;
    return nullptr;
  }
};

namespace detail {

inline std::vector<ApproachTotals> tally(const std::vector<LocalizationResult>& results,
                                         const EvaluationConfig& config) {
  std::vector<ApproachTotals> out;
  for (auto a : kApproaches)
    if (config.wants(a)) out.push_back({std::string(a), 0, 0});
  for (const auto& r : results) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ApproachTotals& t) { return t.approach == r.approach; });
    if (it == out.end()) continue;
    (r.outcome == Outcome::Located ? it->located : it->non_located) += 1;
  }
  return out;
}

}  // namespace detail

// Aggregates per-case results. Sites appear in name order, so the report does
// not depend on the order cases were given or finished in.
inline BenchmarkReport make_report(std::vector<CaseResult> cases, const EvaluationConfig& config,
                                   std::vector<CaseError> errors = {}) {
  std::sort(cases.begin(), cases.end(), [](const CaseResult& a, const CaseResult& b) { return a.site < b.site; });
  BenchmarkReport rep;
  rep.errors = std::move(errors);
  double total_us = 0;
  for (auto& c : cases) {
    rep.sites.push_back({c.site, c.targets, detail::tally(c.results, config)});
    rep.timing.targets += c.timing.targets;
    rep.timing.comparisons += c.timing.comparisons;
    total_us += c.timing.total_us;
    for (auto& r : c.results) rep.results.push_back(std::move(r));
  }
  rep.approaches = detail::tally(rep.results, config);
  rep.timing.repeats = std::max<std::size_t>(1, config.repeats);
  rep.timing.total_ms = total_us / 1000.0;
  if (rep.timing.targets > 0) rep.timing.per_target_ms = rep.timing.total_ms / rep.timing.targets;
  if (rep.timing.comparisons > 0) rep.timing.per_comparison_ms = rep.timing.total_ms / rep.timing.comparisons;
  return rep;
}

// With jobs > 1 the localization runs on worker threads; the timed ranking
// then runs afterwards on the calling thread, one case at a time.
inline BenchmarkReport run_benchmark(const BenchmarkDataset& dataset, const EvaluationConfig& config) {
  std::vector<CaseResult> results(dataset.cases.size());
  std::size_t jobs = std::max<std::size_t>(1, config.jobs);
  if (jobs == 1 || dataset.cases.size() < 2) {
    for (std::size_t i = 0; i < dataset.cases.size(); ++i) results[i] = run_case(dataset.cases[i], config);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(dataset.cases.size());
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, dataset.cases.size()); ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next++) < dataset.cases.size();) {
          try {
            results[i] = run_case(dataset.cases[i], config, false);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
    if (config.wants("similo")) {
      EvaluationConfig only = config;
      only.approaches = {"similo"};
      for (std::size_t i = 0; i < dataset.cases.size(); ++i) {
        auto timed = run_case(dataset.cases[i], only, true);
        results[i].timing = timed.timing;
        std::size_t k = 0;
        for (auto& r : results[i].results)
          if (r.approach == "similo") r.elapsed_us = timed.results[k++].elapsed_us;
      }
    }
  }
  return make_report(std::move(results), config, dataset.errors);
}

inline nlohmann::json report_to_json(const BenchmarkReport& rep) {
  auto totals = [](const std::vector<ApproachTotals>& v) {
    auto arr = nlohmann::json::array();
    for (const auto& a : v)
      arr.push_back({{"approach", a.approach},
                     {"located", a.located},
                     {"non_located", a.non_located},
                     {"non_located_pct", a.non_located_pct()}});
    return arr;
  };
  nlohmann::json doc;
  doc["format"] = "similo-benchmark-report";
  doc["version"] = 1;
  doc["approaches"] = totals(rep.approaches);
  doc["sites"] = nlohmann::json::array();
  for (const auto& s : rep.sites)
    doc["sites"].push_back({{"site", s.site}, {"targets", s.targets}, {"approaches", totals(s.approaches)}});
  doc["timing"] = {{"repeats", rep.timing.repeats},
                   {"targets", rep.timing.targets},
                   {"comparisons", rep.timing.comparisons},
                   {"total_ms", rep.timing.total_ms},
                   {"per_target_ms", rep.timing.per_target_ms},
                   {"per_comparison_ms", rep.timing.per_comparison_ms}};
  doc["errors"] = nlohmann::json::array();
  for (const auto& e : rep.errors) doc["errors"].push_back({{"site", e.site}, {"message", e.message}});
  return doc;
}

inline std::string report_to_table(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "approach" << std::right << std::setw(10) << "located" << std::setw(14)
     << "non-located" << std::setw(10) << "(%)" << "\n";
  for (const auto& a : rep.approaches)
    os << std::left << std::setw(18) << a.approach << std::right << std::setw(10) << a.located << std::setw(14)
       << a.non_located << std::setw(9) << std::fixed << std::setprecision(1) << a.non_located_pct() << "%\n";
  if (!rep.sites.empty()) {
    os << "\nper site (non-located / targets)\n";
    for (const auto& s : rep.sites) {
      os << "  " << std::left << std::setw(16) << s.site << std::right;
      for (const auto& a : s.approaches) os << " " << a.approach << "=" << a.non_located << "/" << s.targets;
      os << "\n";
    }
  }
  if (rep.timing.targets > 0) {
    os << std::setprecision(4) << "\ntiming (similo ranking, mean of " << rep.timing.repeats << " runs)\n"
       << "  total " << rep.timing.total_ms << " ms, per target " << rep.timing.per_target_ms
       << " ms, per comparison " << rep.timing.per_comparison_ms << " ms\n";
  }
  for (const auto& e : rep.errors) os << "error: " << e.site << ": " << e.message << "\n";
  return os.str();
}

}  // namespace similo
