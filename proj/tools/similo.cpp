// similo: command-line front end for extraction, locator generation,
// localization, voting and benchmarking.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "similo/similo.hpp"

namespace {

using nlohmann::json;
using namespace similo;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoMatch = 2;

struct Flags {
  std::string config_path;
  std::string weights;
  std::optional<double> threshold;
  std::string variant;
  std::optional<std::size_t> repeats;
  std::string format;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> jobs;
  std::vector<std::string> approaches;
};

// Config file first, then flags on top.
Config resolve_config(const Flags& f) {
  Config c;
  if (!f.config_path.empty()) c = load_config(f.config_path);
  if (!f.weights.empty()) c.eval.scoring.weights = parse_weights(f.weights, c.eval.scoring.weights);
  if (f.threshold) c.eval.threshold = *f.threshold;
  if (!f.variant.empty()) apply_setting(c, "voting.variant", f.variant);
  if (f.repeats) apply_setting(c, "repeats", std::to_string(*f.repeats));
  if (!f.format.empty()) apply_setting(c, "format", f.format);
  if (f.top_k) apply_setting(c, "top_k", std::to_string(*f.top_k));
  if (f.jobs) apply_setting(c, "jobs", std::to_string(*f.jobs));
  if (!f.approaches.empty()) {
    std::string joined;
    for (const auto& a : f.approaches) joined += a + ",";
    apply_setting(c, "approaches", joined);
  }
  return c;
}

Page load_page(const std::string& html, const std::string& capture) {
  DomTree tree = parse_html(detail::read_file(html));
  std::optional<Rendering> rendering;
  if (!capture.empty()) {
    auto merged = merge_capture(tree, load_capture(capture));
    if (!merged.unresolved.empty())
      std::cerr << "warning: " << merged.unresolved.size() << " captured element(s) not in " << html << "\n";
    rendering = std::move(merged.rendering);
  }
  return Page(std::move(tree), std::move(rendering));
}

ElementRef resolve(const Page& page, const std::string& xpath) {
  auto m = evaluate(page.tree(), xpath);
  if (m.empty()) throw Error("no match for " + xpath);
  if (m.size() > 1) throw Error(std::to_string(m.size()) + " matches for " + xpath + " (expected 1)");
  return m.front();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json snapshot_json(const ElementSnapshot& s) {
  return {{"tag", s.tag},
          {"class", s.class_name},
          {"name", s.name},
          {"id", s.id},
          {"href", s.href},
          {"alt", s.alt},
          {"absolute_xpath", s.absolute_xpath},
          {"id_relative_xpath", s.id_relative_xpath},
          {"is_button", s.is_button},
          {"location", s.location ? json{{"x", s.location->x}, {"y", s.location->y}} : json(nullptr)},
          {"area", optional_number(s.area)},
          {"shape", optional_number(s.shape)},
          {"visible_text", s.visible_text},
          {"neighbor_texts", s.neighbor_texts}};
}

int cmd_extract(const std::string& html, const std::string& xpath, const std::string& capture,
                const ExtractionOptions& opts) {
  Page page = load_page(html, capture);
  std::vector<ElementRef> els = xpath.empty() ? page.candidates() : std::vector<ElementRef>{resolve(page, xpath)};
  json out = json::array();
  for (ElementRef el : els) out.push_back(snapshot_json(extract_snapshot(page, el, opts)));
  std::cout << (xpath.empty() ? out : out.front()).dump(2) << "\n";
  return kExitOk;
}

int cmd_capture(const std::string& html, const std::string& url) {
  Page page = load_page(html, {});
  std::cout << capture_to_json(capture_from_page(page, url)).dump(2) << "\n";
  return kExitOk;
}

int cmd_locators(const std::string& html, const std::string& xpath, const Config& cfg) {
  Page page = load_page(html, {});
  auto set = gen_all(page.tree(), resolve(page, xpath), cfg.eval.generator);
  if (cfg.format == OutputFormat::Json) {
    json out = {{"target", set.target}, {"locators", json::array()}};
    for (const auto& l : set.locators)
      out["locators"].push_back({{"kind", locator_kind_name(l.kind)},
                                 {"expr", l.expr},
                                 {"unique", l.unique_at_generation}});
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& l : set.locators)
      std::cout << std::left << std::setw(13) << locator_kind_name(l.kind) << l.expr
                << (l.unique_at_generation ? "" : "  (not unique)") << "\n";
  }
  return kExitOk;
}

int cmd_locate(const std::string& old_html, const std::string& old_xpath, const std::string& new_html,
               const std::string& old_capture, const std::string& new_capture, const Config& cfg) {
  Page old_page = load_page(old_html, old_capture);
  Page new_page = load_page(new_html, new_capture);
  auto target = extract_snapshot(old_page, resolve(old_page, old_xpath), cfg.eval.extraction);
  auto pool = candidate_snapshots(new_page, cfg.eval.extraction);
  auto ranked = rank_candidates(target, pool, cfg.eval.scoring, cfg.eval.threshold);
  std::size_t k = std::min(cfg.top_k, ranked.size());
  if (cfg.format == OutputFormat::Json) {
    json out = json::array();
    for (std::size_t i = 0; i < k; ++i) {
      const auto& m = ranked[i];
      json params = json::object();
      for (Param p : kAllParams)
        params[std::string(param_name(p))] = {{"similarity", m.breakdown.similarity_of(p)},
                                              {"contribution", m.breakdown.contribution_of(p)}};
      out.push_back({{"rank", m.rank}, {"xpath", new_page.absolute_xpath(m.candidate)},
                     {"score", m.score}, {"parameters", params}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      const auto& m = ranked[i];
      std::cout << "#" << m.rank << "  " << std::fixed << std::setprecision(4) << m.score << "  "
                << new_page.absolute_xpath(m.candidate) << "\n";
      for (Param p : kAllParams)
        if (m.breakdown.contribution_of(p) != 0)
          std::cout << "      " << std::left << std::setw(18) << param_name(p) << std::right
                    << std::setprecision(3) << m.breakdown.similarity_of(p) << " -> "
                    << m.breakdown.contribution_of(p) << "\n";
    }
  }
  if (ranked.empty()) {
    std::cerr << "no candidate clears the threshold\n";
    return kExitNoMatch;
  }
  return kExitOk;
}

int cmd_vote(const std::string& old_html, const std::string& old_xpath, const std::string& new_html,
             const std::string& oracle, const Config& cfg) {
  Page old_page = load_page(old_html, {});
  Page new_page = load_page(new_html, {});
  auto set = gen_all(old_page.tree(), resolve(old_page, old_xpath), cfg.eval.generator);
  auto outcomes = execute_locators(set, new_page.tree());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    std::cout << std::left << std::setw(13) << locator_kind_name(o.kind) << std::setw(4) << o.matches.size()
              << set.locators[i].expr << "\n";
  }
  if (cfg.variant == VotingVariant::TheoreticalLimit) {
    if (oracle.empty()) throw Error("theoretical_limit needs --oracle");
    bool hit = theoretical_limit(outcomes, new_page.tree(), oracle);
    std::cout << "theoretical_limit: " << (hit ? "located" : "not located") << "\n";
    return hit ? kExitOk : kExitNoMatch;
  }
  auto chosen = vote(outcomes, cfg.variant, cfg.eval.voting);
  if (!chosen) {
    std::cout << voting_variant_name(cfg.variant) << ": no usable locator\n";
    return kExitNoMatch;
  }
  const auto& path = new_page.absolute_xpath(*chosen);
  std::cout << voting_variant_name(cfg.variant) << ": " << path;
  if (!oracle.empty()) std::cout << (tolerant_match(path, oracle) ? "  (located)" : "  (not located)");
  std::cout << "\n";
  return kExitOk;
}

int cmd_bench(const std::string& dir, const std::string& output, const Config& cfg) {
  auto dataset = load_benchmark(dir);
  for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << "\n";
  auto report = run_benchmark(dataset, cfg.eval);
  std::string json_text = report_to_json(report).dump(2) + "\n";
  if (!output.empty()) detail::write_file(output, json_text);
  if (cfg.format == OutputFormat::Json)
    std::cout << json_text;
  else
    std::cout << report_to_table(report);
  for (const auto& e : dataset.errors) std::cerr << "case error: " << e.site << ": " << e.message << "\n";
  return dataset.errors.empty() ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity-based web element localization"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--format", flags.format, "table or json");
  };
  auto add_scoring = [&](CLI::App* sub) {
    sub->add_option("--weights", flags.weights, "preset and/or name=value list, e.g. unit,id=0");
    sub->add_option("--threshold", flags.threshold, "minimum accepted score");
  };

  std::string html, xpath, capture, old_html, new_html, old_capture, new_capture, oracle, dir, output;

  auto* extract = app.add_subcommand("extract", "Print element snapshots");
  extract->add_option("html", html, "HTML file")->required()->check(CLI::ExistingFile);
  extract->add_option("--xpath", xpath, "single element (default: all candidates)");
  extract->add_option("--capture", capture, "page capture with geometry/visibility")->check(CLI::ExistingFile);
  extract->add_option("--config", flags.config_path, "key = value config file")->check(CLI::ExistingFile);

  std::string url;
  auto* capture_cmd = app.add_subcommand("capture", "Print a static page capture (no geometry)");
  capture_cmd->add_option("html", html, "HTML file")->required()->check(CLI::ExistingFile);
  capture_cmd->add_option("--url", url, "url recorded in the capture");

  auto* locators = app.add_subcommand("locators", "Generate single-locators for an element");
  locators->add_option("html", html, "HTML file")->required()->check(CLI::ExistingFile);
  locators->add_option("xpath", xpath, "element")->required();
  add_common(locators);

  auto* locate = app.add_subcommand("locate", "Rank new-page candidates against an old element");
  locate->add_option("old_html", old_html)->required()->check(CLI::ExistingFile);
  locate->add_option("old_xpath", xpath)->required();
  locate->add_option("new_html", new_html)->required()->check(CLI::ExistingFile);
  locate->add_option("--old-capture", old_capture)->check(CLI::ExistingFile);
  locate->add_option("--new-capture", new_capture)->check(CLI::ExistingFile);
  locate->add_option("--top-k", flags.top_k, "matches to print (default 10)");
  add_common(locate);
  add_scoring(locate);

  auto* votecmd = app.add_subcommand("vote", "Multi-locator vote on the new page");
  votecmd->add_option("old_html", old_html)->required()->check(CLI::ExistingFile);
  votecmd->add_option("old_xpath", xpath)->required();
  votecmd->add_option("new_html", new_html)->required()->check(CLI::ExistingFile);
  votecmd->add_option("--variant", flags.variant, "worst_order, best_order, weighted, theoretical_limit");
  votecmd->add_option("--oracle", oracle, "expected absolute xpath on the new page");
  add_common(votecmd);

  auto* bench = app.add_subcommand("bench", "Run the localization benchmark over a dataset");
  bench->add_option("dataset", dir, "dataset directory")->required();
  bench->add_option("--approach", flags.approaches, "restrict to approach(es)");
  bench->add_option("--repeats", flags.repeats, "timing repetitions (default 3)");
  bench->add_option("--jobs", flags.jobs, "parallel cases");
  bench->add_option("--output", output, "also write the JSON report here");
  add_common(bench);
  add_scoring(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = resolve_config(flags);
    if (*extract) return cmd_extract(html, xpath, capture, cfg.eval.extraction);
    if (*capture_cmd) return cmd_capture(html, url);
    if (*locators) return cmd_locators(html, xpath, cfg);
    if (*locate) return cmd_locate(old_html, xpath, new_html, old_capture, new_capture, cfg);
    if (*votecmd) return cmd_vote(old_html, xpath, new_html, oracle, cfg);
    if (*bench) return cmd_bench(dir, output, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
