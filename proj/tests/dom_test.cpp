#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "similo/detail/entities.hpp"
#include "similo/dom.hpp"
#include "similo/xpath.hpp"
#include "support/random_tree.hpp"

using namespace similo;

namespace {

std::vector<std::string> paths(const DomTree& t) {
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < t.size(); ++i) out.push_back(absolute_xpath(t, ElementRef{i}));
  return out;
}

}  // namespace

TEST(Entities, TableIsSortedForBinarySearch) {
  const auto& table = detail::kNamedEntities;
  EXPECT_TRUE(std::is_sorted(table.begin(), table.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; }));
}

TEST(Parser, SynthesizesSkeleton) {
  auto t = parse_html("<p>hi</p>");
  EXPECT_EQ(t.tag(t.root()), "html");
  auto p = evaluate(t, "/html[1]/body[1]/p[1]");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(t.text(p[0]), "hi");
  EXPECT_EQ(evaluate(t, "/html[1]/head[1]").size(), 1u);
}

TEST(Parser, LowercasesTagsAndAttributeNames) {
  auto t = parse_html("<DIV CLASS='A'><SPAN Id=x>t</SPAN></DIV>");
  auto m = evaluate(t, "//div/span");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(t.attribute(m[0], "id"), "x");
  EXPECT_EQ(t.attribute(t.parent(m[0]).value(), "class"), "A");
}

TEST(Parser, ImpliedEndTags) {
  auto t = parse_html("<ul><li>a<li>b<li>c</ul><p>one<p>two<div>x</div>");
  EXPECT_EQ(evaluate(t, "/html[1]/body[1]/ul[1]/li").size(), 3u);
  EXPECT_EQ(evaluate(t, "/html[1]/body[1]/p").size(), 2u);
  EXPECT_EQ(evaluate(t, "/html[1]/body[1]/div[1]").size(), 1u);
}

TEST(Parser, TableRowsAndCells) {
  auto t = parse_html("<table><tr><td>1<td>2<tr><td>3</table>");
  EXPECT_EQ(evaluate(t, "//tr").size(), 2u);
  EXPECT_EQ(evaluate(t, "//td").size(), 3u);
}

TEST(Parser, VoidElementsHaveNoChildren) {
  auto t = parse_html("<div><input name=a><br><img src=x.png><span>s</span></div>");
  auto span = evaluate(t, "/html[1]/body[1]/div[1]/span[1]");
  ASSERT_EQ(span.size(), 1u);
  for (auto el : evaluate(t, "//input")) EXPECT_TRUE(t.children(el).empty());
}

TEST(Parser, DecodesEntities) {
  auto t = parse_html("<a title=\"a&amp;b\">Home &amp; Garden &lt;3 &#65;&#x42; &nbsp;</a>");
  auto a = evaluate(t, "//a").at(0);
  EXPECT_EQ(t.attribute(a, "title"), "a&b");
  EXPECT_EQ(t.text(a).substr(0, 19), "Home & Garden <3 AB");
}

TEST(Parser, RawTextIsNotMarkup) {
  auto t = parse_html("<script>if (a<b) { x = '<div>'; }</script><div>real</div>");
  EXPECT_EQ(evaluate(t, "//div").size(), 1u);
}

TEST(Parser, CommentsAndDoctypeIgnored) {
  auto t = parse_html("<!DOCTYPE html><!-- <div>no</div> --><div>yes</div>");
  auto m = evaluate(t, "//div");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(t.text(m[0]), "yes");
}

TEST(Parser, StrayEndTagsIgnored) {
  auto t = parse_html("<div></span><b>x</b></div></div></div>");
  EXPECT_EQ(evaluate(t, "/html[1]/body[1]/div[1]/b[1]").size(), 1u);
}

TEST(Parser, SvgDescendantsMarked) {
  auto t = parse_html("<a><svg><g><path d='M0'/></g></svg></a>");
  auto path = evaluate(t, "//path").at(0);
  auto svg = evaluate(t, "//svg").at(0);
  EXPECT_TRUE(t.in_svg(path));
  EXPECT_FALSE(t.in_svg(svg));
  auto c = candidates(t);
  EXPECT_NE(std::find(c.begin(), c.end(), svg), c.end());
  EXPECT_EQ(std::find(c.begin(), c.end(), path), c.end());
}

TEST(Parser, DirectTextCollapsesWhitespace) {
  auto t = parse_html("<div>  one \n <b>x</b>  two </div>");
  auto d = evaluate(t, "//div").at(0);
  EXPECT_EQ(t.text(d), "one two");
  EXPECT_EQ(t.subtree_text(d), "one x two");
}

TEST(Parser, FirstIdWins) {
  auto t = parse_html("<div id=a>1</div><span id=a>2</span>");
  auto el = t.element_by_id("a");
  ASSERT_TRUE(el);
  EXPECT_EQ(t.tag(*el), "div");
}

TEST(Parser, SerializeIsAFixedPointOnFixtures) {
  for (std::string doc : {"<ul><li>a<li>b</ul><p>x<p>y", "<table><tr><td>1<td>2</table>",
                          "<div class=\"q&quot;\">a &amp; b<input value='v'></div>",
                          "<svg><rect width=1/></svg><span>after</span>"}) {
    auto once = parse_html(doc);
    auto again = parse_html(serialize(once));
    EXPECT_EQ(paths(once), paths(again)) << doc;
    EXPECT_EQ(serialize(once), serialize(again)) << doc;
  }
}

TEST(Parser, SerializeIsAFixedPointOnRandomDocuments) {
  gen::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto t = parse_html(gen::random_html(rng, 120));
    auto s = serialize(t);
    EXPECT_EQ(serialize(parse_html(s)), s);
  }
}

TEST(Candidates, RenderingFiltersInvisible) {
  auto t = parse_html("<a>1</a><a>2</a><div>x</div>");
  auto a = evaluate(t, "//a");
  Rendering r(t.size());
  r.set(a[0], RenderInfo{true, Geometry{0, 0, 10, 10}});
  r.set(a[1], RenderInfo{false, std::nullopt});
  auto c = candidates(t, {}, &r);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], a[0]);
  EXPECT_EQ(candidates(t).size(), 2u);
}

TEST(Candidates, ContainersOnRequest) {
  auto t = parse_html("<div><a>1</a></div>");
  CandidatePolicy p;
  EXPECT_EQ(candidates(t, p).size(), 1u);
  p.include_containers = true;
  EXPECT_EQ(candidates(t, p).size(), 2u);
}
