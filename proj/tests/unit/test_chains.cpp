#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "psusp/chains.hpp"
#include "psusp/error.hpp"

using namespace psusp;
using namespace psusp::chains;

namespace {

bool boxes_overlap(const Link& x, const Link& y) {
    if (x.t.hi < y.t.lo || y.t.hi < x.t.lo) return false;
    for (int d = -1; d <= 1; ++d)
        if (!(x.a.hi < y.a.lo + d || y.a.hi + d < x.a.lo)) return true;
    return false;
}

bool taut_oracle(const ChainCover& c) {
    const std::size_t n = c.links.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool neighbours = j == i + 1 || (c.closed && i == 0 && j == n - 1);
            if (boxes_overlap(c.links[i], c.links[j]) != neighbours) return false;
        }
    return true;
}

bool inside(const Link& child, const Link& parent) {
    if (child.t.lo < parent.t.lo || child.t.hi > parent.t.hi) return false;
    for (int d = -1; d <= 1; ++d)
        if (parent.a.lo + d <= child.a.lo && child.a.hi <= parent.a.hi + d) return true;
    return false;
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Rational, Parse) {
    EXPECT_EQ(parse_rational("3/7"), Rational(3, 7));
    EXPECT_EQ(parse_rational("0.485"), Rational(97, 200));
    EXPECT_EQ(parse_rational("0.19"), Rational(19, 100));
    EXPECT_EQ(parse_rational("-2"), Rational(-2));
    EXPECT_EQ(parse_rational(" 007 "), Rational(7));
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("abc"), Error);
}

TEST(Pattern, Validation) {
    EXPECT_FALSE(pattern_violation({1, 2, 3, 2, 2, 1}).has_value());
    EXPECT_EQ(pattern_violation({1, 3, 2}), 1);
    EXPECT_EQ(pattern_violation({1, 2, 4}), 2);
    try {
        pattern_validate({1, 2, 3, 5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
        EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
    }
    EXPECT_THROW(pattern_validate({0, 1}), Error);
    const auto p = pattern_validate({1, 2, 3, 2});
    EXPECT_EQ(p.m, 4);
    EXPECT_EQ(p.n, 3);
}

TEST(Pattern, KfoldThree) {
    EXPECT_EQ(kfold(3).values, (std::vector<int>{1, 2, 3, 4, 5, 4, 3, 4, 5, 6, 7}));
}

TEST(Pattern, KfoldShape) {
    for (int k = 3; k <= 21; k += 2) {
        const auto p = kfold(k);
        ASSERT_EQ(p.m, 2 * k + 5);
        ASSERT_EQ(p.n, 7);
        ASSERT_FALSE(pattern_violation(p.values).has_value());
        const auto& v = p.values;
        EXPECT_EQ(std::vector<int>(v.begin(), v.begin() + 5), (std::vector<int>{1, 2, 3, 4, 5}));
        EXPECT_EQ(v[v.size() - 2], 6);
        EXPECT_EQ(v.back(), 7);
        // Each pass through the middle link is one fold; the passes alternate
        // direction between links 3 and 5.
        EXPECT_EQ(std::count(v.begin(), v.end(), 4), k);
        EXPECT_EQ(std::count(v.begin(), v.end(), 3), (k + 1) / 2);
        EXPECT_EQ(std::count(v.begin(), v.end(), 5), (k + 1) / 2);
        EXPECT_EQ(std::count(v.begin(), v.end(), 1), 1);
        EXPECT_EQ(std::count(v.begin(), v.end(), 7), 1);
    }
}

TEST(Pattern, KfoldRejectsEvenAndSmall) {
    for (int k : {-1, 0, 1, 2, 4, 10}) {
        try {
            kfold(k);
            FAIL() << k;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::domain);
        }
    }
}

TEST(Chain, EssentialChainIsClosedAndTaut) {
    for (int n : {3, 5, 7, 12}) {
        const auto c = essential_chain(n);
        EXPECT_EQ(c.links.size(), static_cast<std::size_t>(n));
        EXPECT_TRUE(c.closed);
        EXPECT_TRUE(is_taut(c));
        EXPECT_TRUE(taut_oracle(c));
    }
    EXPECT_THROW(essential_chain(2), Error);
}

TEST(Chain, TautnessDetectsExtraOverlap) {
    ChainCover c;
    c.links = {{{0, 1}, {0, Rational(1, 2)}}, {{0, 1}, {Rational(2, 5), Rational(3, 5)}},
               {{0, 1}, {Rational(1, 4), Rational(9, 10)}}};
    EXPECT_FALSE(is_taut(c));
    EXPECT_FALSE(taut_oracle(c));
    c.links[2].a = {Rational(11, 20), Rational(9, 10)};
    EXPECT_TRUE(is_taut(c));
    EXPECT_TRUE(taut_oracle(c));
}

TEST(Refine, KfoldContainmentAndTautness) {
    ChainCover level = essential_chain(7);
    for (int k : {3, 5}) {
        const auto f = kfold(k);
        const auto child = refine_chain(level, f);
        ASSERT_EQ(child.links.size(), f.values.size());
        EXPECT_TRUE(child.taut);
        EXPECT_TRUE(taut_oracle(child));
        for (std::size_t i = 0; i < child.links.size(); ++i)
            EXPECT_TRUE(inside(child.links[i], level.links[static_cast<std::size_t>(f.values[i] - 1)])) << i;
    }
}

TEST(Refine, ThreeNestedLevels) {
    std::vector<ChainCover> levels{essential_chain(7)};
    const auto f = kfold(3);
    for (int l = 0; l < 2; ++l) levels.push_back(refine_chain(levels.back(), f));
    EXPECT_EQ(levels[1].links.size(), 11u);
    EXPECT_EQ(levels[2].links.size(), 11u);
    EXPECT_TRUE(taut_oracle(levels[2]));
}

TEST(Refine, StaysAndArbitraryPatterns) {
    const auto parent = essential_chain(7);
    const auto f = pattern_validate({2, 2, 3, 3, 3, 2, 1});
    const auto child = refine_chain(parent, f);
    EXPECT_TRUE(taut_oracle(child));
    for (std::size_t i = 0; i < child.links.size(); ++i)
        EXPECT_TRUE(inside(child.links[i], parent.links[static_cast<std::size_t>(f.values[i] - 1)]));
}

TEST(Refine, RejectsValuesBeyondParent) {
    try {
        refine_chain(essential_chain(5), kfold(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Render, PolygonCounts) {
    const auto one = render_chains({essential_chain(7)});
    EXPECT_EQ(count(one, "<polygon"), 7u);
    EXPECT_EQ(count(one, "<g id=\"level-"), 1u);

    std::vector<ChainCover> levels{essential_chain(7)};
    for (int l = 0; l < 2; ++l) levels.push_back(refine_chain(levels.back(), kfold(3)));
    const auto svg = render_chains(levels);
    EXPECT_EQ(count(svg, "<polygon"), 29u);
    EXPECT_EQ(count(svg, "<g id=\"level-"), 3u);
    EXPECT_EQ(count(svg, "id=\"level-2-link-"), 11u);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Render, EmptyInputIsStillValid) {
    const auto svg = render_chains({});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(count(svg, "<polygon"), 0u);
}
