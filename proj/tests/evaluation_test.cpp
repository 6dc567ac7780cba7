#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "similo/config.hpp"
#include "similo/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/mutation_corpus.hpp"

using namespace similo;

namespace {

const LocalizationResult* find(const CaseResult& r, std::string_view approach, std::size_t target) {
  for (const auto& x : r.results)
    if (x.approach == approach && x.target == target) return &x;
  return nullptr;
}

BenchmarkCase single_site(const std::string& site) {
  for (auto& c : load_benchmark(fixtures::corpus_dir()).cases)
    if (c.site == site) return c;
  throw std::runtime_error("no site " + site);
}

std::size_t target_index(const BenchmarkCase& c, std::string_view old_xpath) {
  for (std::size_t i = 0; i < c.targets.size(); ++i)
    if (c.targets[i].old_xpath == old_xpath) return i;
  throw std::runtime_error("no such target");
}

}  // namespace

TEST(RunCase, IdentityLocatesEverything) {
  auto d = fixtures::identity_dataset();
  EvaluationConfig cfg;
  cfg.repeats = 1;
  for (const auto& c : d.cases) {
    auto r = run_case(c, cfg);
    EXPECT_EQ(r.results.size(), c.targets.size() * kApproaches.size()) << c.site;
    for (const auto& x : r.results)
      EXPECT_EQ(x.outcome, Outcome::Located) << c.site << " " << x.approach << " target " << x.target << " "
                                            << x.error;
  }
}

TEST(RunCase, YoutubeHistory) {
  auto c = single_site("youtube");
  auto r = run_case(c, {});
  auto t = target_index(c, fixtures::kYoutubeOldHistory);
  EXPECT_EQ(find(r, "absolute", t)->outcome, Outcome::NonLocated);
  EXPECT_EQ(find(r, "similo", t)->outcome, Outcome::Located);
  EXPECT_EQ(find(r, "similo", t)->chosen, fixtures::kYoutubeNewHistory);
}

TEST(RunCase, AliexpressHomeAndGardenIsMislocated) {
  auto c = single_site("aliexpress");
  auto r = run_case(c, {});
  const auto* s = find(r, "similo", 0);
  EXPECT_EQ(s->outcome, Outcome::NonLocated);
  ASSERT_TRUE(s->chosen);
  EXPECT_NE(s->chosen->find("dl[13]"), std::string::npos) << *s->chosen;
}

TEST(RunCase, UnresolvableTargetIsAnnotatedNotFatal) {
  auto c = single_site("news_list");
  c.targets.push_back({"/html[1]/body[1]/nothing[1]", "/html[1]"});
  auto r = run_case(c, {});
  std::size_t bad = c.targets.size() - 1;
  for (auto a : kApproaches) {
    const auto* x = find(r, a, bad);
    ASSERT_NE(x, nullptr) << a;
    EXPECT_EQ(x->outcome, Outcome::NonLocated);
    EXPECT_FALSE(x->error.empty());
  }
  EXPECT_EQ(find(r, "similo", 0)->outcome, Outcome::Located);
}

TEST(RunCase, ApproachSelection) {
  auto c = single_site("news_list");
  EvaluationConfig cfg;
  cfg.approaches = {"similo", "robula_plus"};
  auto r = run_case(c, cfg);
  EXPECT_EQ(r.results.size(), 2 * c.targets.size());
  for (const auto& x : r.results) EXPECT_TRUE(x.approach == "similo" || x.approach == "robula_plus");
}

TEST(Benchmark, SingleCaseAggregationIsIdentity) {
  auto c = single_site("product_table");
  EvaluationConfig cfg;
  cfg.repeats = 1;
  BenchmarkDataset d;
  d.cases.push_back(c);
  auto rep = run_benchmark(d, cfg);
  auto direct = run_case(c, cfg, false);
  for (auto a : kApproaches) {
    std::size_t non = 0;
    for (const auto& x : direct.results)
      if (x.approach == a && x.outcome == Outcome::NonLocated) ++non;
    ASSERT_NE(rep.find(a), nullptr);
    EXPECT_EQ(rep.find(a)->non_located, non) << a;
    EXPECT_EQ(rep.find(a)->total(), c.targets.size());
  }
  ASSERT_EQ(rep.sites.size(), 1u);
  EXPECT_EQ(rep.sites[0].targets, c.targets.size());
}

TEST(Benchmark, InvariantUnderCasePermutationAndJobs) {
  auto d = load_benchmark(fixtures::corpus_dir());
  EvaluationConfig cfg;
  cfg.repeats = 1;
  auto base = run_benchmark(d, cfg);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 3; ++i) {
    auto shuffled = d;
    std::shuffle(shuffled.cases.begin(), shuffled.cases.end(), rng);
    cfg.jobs = 1 + i;
    auto rep = run_benchmark(shuffled, cfg);
    for (auto a : kApproaches) EXPECT_EQ(rep.find(a)->non_located, base.find(a)->non_located) << a;
    ASSERT_EQ(rep.sites.size(), base.sites.size());
    for (std::size_t s = 0; s < rep.sites.size(); ++s) EXPECT_EQ(rep.sites[s].site, base.sites[s].site);
  }
}

TEST(Benchmark, TimingCoversRepeats) {
  auto d = load_benchmark(fixtures::corpus_dir());
  EvaluationConfig cfg;
  cfg.repeats = 4;
  cfg.approaches = {"similo"};
  auto rep = run_benchmark(d, cfg);
  EXPECT_EQ(rep.timing.repeats, 4u);
  EXPECT_EQ(rep.timing.targets, 23u);
  EXPECT_GT(rep.timing.comparisons, 23u);
  EXPECT_GT(rep.timing.per_target_ms, 0.0);
  EXPECT_NEAR(rep.timing.per_comparison_ms * rep.timing.comparisons, rep.timing.total_ms, 1e-9);
}

TEST(Benchmark, CorpusOrdering) {
  auto rep = run_benchmark(load_benchmark(fixtures::corpus_dir()), {});
  const auto& absolute = *rep.find("absolute");
  for (const auto& a : rep.approaches) EXPECT_LE(a.non_located, absolute.non_located) << a.approach;
  for (auto single : {"absolute", "id_relative", "selenium_ide", "montoto", "robula_plus"})
    EXPECT_LE(rep.find("similo")->non_located, rep.find(single)->non_located);
  for (auto v : {"lml_worst_order", "lml_best_order", "lml_weighted"})
    EXPECT_LE(rep.find("lml_limit")->non_located, rep.find(v)->non_located);
}

TEST(Benchmark, ReportJsonShape) {
  auto d = load_benchmark(fixtures::corpus_dir());
  EvaluationConfig cfg;
  cfg.repeats = 1;
  auto j = report_to_json(run_benchmark(d, cfg));
  EXPECT_EQ(j["format"], "similo-benchmark-report");
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["approaches"].size(), kApproaches.size());
  EXPECT_EQ(j["sites"].size(), 5u);
  EXPECT_TRUE(j["timing"].contains("per_comparison_ms"));
  EXPECT_TRUE(j["errors"].is_array());
  auto table = report_to_table(run_benchmark(d, cfg));
  EXPECT_NE(table.find("similo"), std::string::npos);
}

TEST(MutationCorpus, DeterministicAndWellFormed) {
  auto a = mutation::generate_pair(77);
  auto b = mutation::generate_pair(77);
  EXPECT_EQ(a.old_html, b.old_html);
  EXPECT_EQ(a.new_html, b.new_html);
  EXPECT_EQ(a.old_html.find("data-uid"), std::string::npos);
  EXPECT_NE(a.old_html, a.new_html);
  EXPECT_NE(std::find(a.mutations.begin(), a.mutations.end(), mutation::Kind::Move), a.mutations.end());
  auto c = mutation::to_case(a, "m");
  for (const auto& t : c.targets) {
    EXPECT_EQ(evaluate(c.old_page->tree(), t.old_xpath).size(), 1u);
    EXPECT_EQ(evaluate(c.new_page->tree(), t.oracle_new_xpath).size(), 1u);
  }
}

TEST(Config, SettingsApply) {
  Config c;
  apply_config_text(c, R"(
# comment
weight.tag = 2.5
threshold = 3
string_normalization = ned2
generator.max_depth = 7
voting.variant = best_order
voting.weight.robula_plus = 0.9
voting.kind_order = robula_plus, montoto, selenium_ide, id_relative, absolute
repeats = 5
jobs = 2
format = json
approaches = similo, absolute
)");
  EXPECT_EQ(c.eval.scoring.weights[Param::Tag], 2.5);
  EXPECT_EQ(c.eval.threshold, 3.0);
  EXPECT_EQ(c.eval.scoring.normalization, StringNormalization::Ned2);
  EXPECT_EQ(c.eval.generator.max_depth, 7u);
  EXPECT_EQ(c.variant, VotingVariant::UnweightedBestOrder);
  EXPECT_EQ(c.eval.voting.weights[LocatorKind::RobulaPlus], 0.9);
  EXPECT_EQ(c.eval.voting.kind_order.front(), LocatorKind::RobulaPlus);
  EXPECT_EQ(c.eval.repeats, 5u);
  EXPECT_EQ(c.eval.jobs, 2u);
  EXPECT_EQ(c.format, OutputFormat::Json);
  EXPECT_EQ(c.eval.approaches, (std::vector<std::string>{"similo", "absolute"}));
}

TEST(Config, UnknownKeyRejectedWithLine) {
  Config c;
  try {
    apply_config_text(c, "repeats = 2\nweight.colour = 1\n", "my.conf");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("my.conf:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(apply_setting(c, "voting.kind_order", "absolute, absolute"), ConfigError);
  EXPECT_THROW(apply_setting(c, "approaches", "similo, magic"), ConfigError);
  EXPECT_THROW(apply_setting(c, "repeats", "many"), ConfigError);
}

TEST(Config, WeightSpecs) {
  auto w = parse_weights("unit,tag=3,visible_text=0");
  EXPECT_EQ(w[Param::Tag], 3.0);
  EXPECT_EQ(w[Param::VisibleText], 0.0);
  EXPECT_EQ(w[Param::Class], 1.0);
  EXPECT_EQ(parse_weights("default"), WeightVector::defaults());
  EXPECT_EQ(parse_weights("zero")[Param::Tag], 0.0);
  EXPECT_THROW(parse_weights("unit,nope=1"), ConfigError);
  EXPECT_THROW(parse_weights("tag=-1"), ConfigError);
}
