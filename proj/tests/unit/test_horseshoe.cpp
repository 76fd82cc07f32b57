#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "psusp/config.hpp"
#include "psusp/error.hpp"
#include "psusp/horseshoe.hpp"

using namespace psusp;
using namespace psusp::horseshoe;

namespace {

config::Config fixture(const std::string& name) { return config::Config::load(std::string(PSUSP_TEST_FIXTURES) + "/" + name); }

PLMap fixture_map(const std::string& name) { return PLMap::parse(fixture(name).get("horseshoe", "knots")); }

// Topological entropy of a PL map whose knot values are knots: log of the
// spectral radius of the lap transition matrix.
double markov_entropy(const PLMap& g) {
    const auto& k = g.knots();
    const int n = static_cast<int>(k.size()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (k[i].y == k[i + 1].y) continue;
        const Rational lo = std::min(k[i].y, k[i + 1].y), hi = std::max(k[i].y, k[i + 1].y);
        for (int j = 0; j < n; ++j)
            if (lo <= k[j].x && k[j + 1].x <= hi) a(i, j) = 1.0;
    }
    const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
    return rho > 0 ? std::log(rho) : 0.0;
}

bool in_set(const Rational& x, const IntervalSet& s) {
    for (const auto& i : s)
        if (i.lo <= x && x <= i.hi) return true;
    return false;
}

}  // namespace

TEST(PLMap, EvaluateImagePreimage) {
    const auto tent = PLMap::parse("0,0; 1/2,1; 1,0");
    EXPECT_EQ(tent(Rational(1, 4)), Rational(1, 2));
    EXPECT_EQ(tent(Rational(3, 4)), Rational(1, 2));
    EXPECT_EQ(tent(Rational(1)), Rational(0));
    const auto img = tent.image({Rational(1, 4), Rational(3, 4)});
    EXPECT_EQ(img.lo, Rational(1, 2));
    EXPECT_EQ(img.hi, Rational(1));
    const auto pre = tent.preimage({Rational(1, 2), Rational(1)});
    ASSERT_EQ(pre.size(), 1u);
    EXPECT_EQ(pre[0].lo, Rational(1, 4));
    EXPECT_EQ(pre[0].hi, Rational(3, 4));
    const auto low = tent.preimage({Rational(0), Rational(1, 4)});
    ASSERT_EQ(low.size(), 2u);
    EXPECT_EQ(low[0].hi, Rational(1, 8));
    EXPECT_EQ(low[1].lo, Rational(7, 8));
    EXPECT_THROW(tent(Rational(2)), Error);
}

TEST(PLMap, RejectsBadKnots) {
    EXPECT_THROW(PLMap::parse("0,0"), Error);
    EXPECT_THROW(PLMap::parse("0,0; 1/2,2; 1,0"), Error);
    EXPECT_THROW(PLMap::parse("0,0; 1/2,1; 1/2,0; 1,0"), Error);
    EXPECT_THROW(PLMap::parse("1/10,0; 1,0"), Error);
}

TEST(IntervalChain, UniformChainIsTaut) {
    const auto c = uniform_chain(7);
    ASSERT_EQ(c.links.size(), 7u);
    EXPECT_TRUE(is_taut(c));
    EXPECT_EQ(c.links[0].lo, Rational(0));
    EXPECT_EQ(c.links[0].hi, Rational(1, 7) + Rational(1, 140));
    EXPECT_EQ(c.links[6].hi, Rational(1));
}

TEST(Stretch, Examples) {
    const auto chain = uniform_chain(7);
    EXPECT_FALSE(stretch_check(PLMap::parse("0,0; 1,1"), chain, 4).holds);
    EXPECT_FALSE(stretch_check(fixture_map("shift_map.ini"), chain, 4).holds);
    const auto b3 = stretch_check(fixture_map("branch3_map.ini"), chain, 4);
    EXPECT_TRUE(b3.holds);
    EXPECT_EQ(b3.m, 1);

    const auto tent_cfg = fixture("tent_map.ini");
    const auto tent = stretch_check(PLMap::parse(tent_cfg.get("horseshoe", "knots")),
                                    parse_chain(tent_cfg.get("horseshoe", "chain")), 4);
    EXPECT_TRUE(tent.holds);
    EXPECT_EQ(tent.m, 2);
}

TEST(Horseshoe, ShiftMapHasNoPrecondition) {
    try {
        horseshoe_extract(fixture_map("shift_map.ini"), uniform_chain(7), 3, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
    }
}

TEST(Horseshoe, BranchMapsCertify) {
    for (const auto& [file, k, depth] : {std::tuple{"branch3_map.ini", 3, 5}, std::tuple{"branch5_map.ini", 5, 4}}) {
        const auto g = fixture_map(file);
        const auto cert = horseshoe_extract(g, uniform_chain(7), k, depth);
        EXPECT_TRUE(cert.certified) << file;
        EXPECT_EQ(cert.m, 1);
        ASSERT_EQ(cert.nonempty.size(), static_cast<std::size_t>(depth + 1));
        long expect = 1;
        for (int d = 0; d <= depth; ++d) {
            expect *= k;
            EXPECT_EQ(cert.nonempty[static_cast<std::size_t>(d)], expect);
        }
        EXPECT_NEAR(cert.bound, std::log(k), 1e-15);
        EXPECT_LE(cert.bound, markov_entropy(g) + 1e-9);
        EXPECT_NEAR(cert.bound, markov_entropy(g), 1e-9);
    }
}

TEST(Horseshoe, LeavesFollowTheirItineraries) {
    const auto g = fixture_map("branch3_map.ini");
    const auto chain = uniform_chain(7);
    const auto cells = refine_interval_chain(chain, chains::kfold(3));
    const auto cert = horseshoe_extract(g, chain, 3, 4);
    ASSERT_EQ(cert.leaves.size(), 243u);
    for (const auto& leaf : cert.leaves) {
        ASSERT_FALSE(leaf.set.empty());
        for (const auto& piece : leaf.set) {
            Rational x = (piece.lo + piece.hi) / 2;
            for (int s : leaf.word) {
                ASSERT_TRUE(in_set(x, {cells.links[static_cast<std::size_t>(2 * s + 1)]})) << word_string(leaf.word);
                x = g(x);
            }
        }
    }
}

TEST(Horseshoe, TentMapRunsDry) {
    const auto cfg = fixture("tent_map.ini");
    const auto g = PLMap::parse(cfg.get("horseshoe", "knots"));
    const auto cert = horseshoe_extract(g, parse_chain(cfg.get("horseshoe", "chain")), 3, 5);
    EXPECT_FALSE(cert.certified);
    ASSERT_TRUE(cert.first_empty.has_value());
    EXPECT_EQ(cert.m, 2);
    EXPECT_LE(cert.bound, markov_entropy(g) + 1e-9);
    EXPECT_NEAR(markov_entropy(g), std::log(2.0), 1e-9);
}

TEST(Horseshoe, CapacityAndDomain) {
    const auto g = fixture_map("branch5_map.ini");
    try {
        horseshoe_extract(g, uniform_chain(7), 5, 9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::capacity);
    }
    EXPECT_THROW(horseshoe_extract(g, uniform_chain(7), 4, 2), Error);
    EXPECT_THROW(horseshoe_extract(g, uniform_chain(6), 3, 2), Error);
}

TEST(Horseshoe, CsvRows) {
    const auto cert = horseshoe_extract(fixture_map("branch3_map.ini"), uniform_chain(7), 3, 1);
    const auto csv = certificate_csv(cert);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "word,component,lo,hi");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 9);
    EXPECT_NE(csv.find("\"1,1\",0,"), std::string::npos);
}

TEST(Horseshoe, FullBranchConstructionReproducesFixture) {
    EXPECT_EQ(full_branch_map(uniform_chain(7), 3).to_string(), fixture_map("branch3_map.ini").to_string());
    EXPECT_EQ(full_branch_map(uniform_chain(7), 5).to_string(), fixture_map("branch5_map.ini").to_string());
}
