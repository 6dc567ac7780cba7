#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "similo/similo.hpp"

#ifndef SIMILO_DATA_DIR
#error "SIMILO_DATA_DIR must point at the data directory"
#endif

namespace fixtures {

inline std::filesystem::path corpus_dir() { return std::filesystem::path(SIMILO_DATA_DIR) / "corpus"; }

inline std::shared_ptr<const similo::Page> page(const std::string& site, const std::string& version) {
  std::vector<std::string> warnings;
  auto dir = corpus_dir() / site;
  return similo::detail::load_page(dir / (version + ".html"), dir / (version + ".capture.json"), {}, warnings);
}

inline similo::ElementRef element(const similo::Page& p, const std::string& xpath) {
  auto m = similo::evaluate(p.tree(), xpath);
  if (m.size() != 1) throw std::runtime_error(xpath + ": " + std::to_string(m.size()) + " matches");
  return m.front();
}

// Pairs every fixture page with itself.
inline similo::BenchmarkDataset identity_dataset() {
  auto real = similo::load_benchmark(corpus_dir());
  similo::BenchmarkDataset out;
  for (const auto& c : real.cases) {
    for (const auto& [pg, version] : {std::pair{c.old_page, "old"}, std::pair{c.new_page, "new"}}) {
      similo::BenchmarkCase id;
      id.site = c.site + "/" + version;
      id.old_page = pg;
      id.new_page = pg;
      for (const auto& t : c.targets) {
        auto path = version == std::string("old") ? t.old_xpath : t.oracle_new_xpath;
        auto abs = pg->absolute_xpath(element(*pg, path));
        id.targets.push_back({abs, abs});
      }
      out.cases.push_back(std::move(id));
    }
  }
  return out;
}

// The five comparison parameters of the YouTube History worked example.
inline similo::WeightVector youtube_weights() {
  using similo::Param;
  auto w = similo::WeightVector::uniform(0);
  for (Param p : {Param::Tag, Param::VisibleText, Param::AbsoluteXPath, Param::IdRelativeXPath, Param::Class}) w[p] = 1;
  return w;
}

inline similo::WeightVector aliexpress_weights() {
  using similo::Param;
  auto w = similo::WeightVector::uniform(0);
  for (Param p : {Param::Tag, Param::VisibleText, Param::AbsoluteXPath, Param::IdRelativeXPath}) w[p] = 1;
  return w;
}

inline const char* const kYoutubeOldHistory =
    "/html[1]/body[1]/div[4]/div[4]/div[1]/div[1]/div[1]/div[1]/div[1]/ul[1]/li[1]/div[1]/ul[1]/li[3]/a[1]/span[1]/"
    "span[2]/span[1]";
inline const char* const kYoutubeNewHistory =
    "/html[1]/body[1]/ytd-app[1]/div[1]/ytd-mini-guide-renderer[1]/div[1]/ytd-mini-guide-entry-renderer[5]/a[1]/"
    "span[1]";

}  // namespace fixtures
