#pragma once

/// Piecewise-linear interval maps, 7-link interval chains, the stretching
/// test and itinerary horseshoes. Closed intervals of [0,1] play the role
/// of subcontinua; all arithmetic is exact.

#include <optional>
#include <string>
#include <vector>

#include "psusp/chains.hpp"

namespace psusp::horseshoe {

using chains::Interval;
using chains::Rational;

struct Knot {
    Rational x;
    Rational y;
};

class PLMap {
public:
    /// Knots sorted by strictly increasing x from 0 to 1, values in [0,1].
    explicit PLMap(std::vector<Knot> knots);
    /// "0,0;1/2,1;1,0"
    static PLMap parse(const std::string& text);

    Rational operator()(const Rational& x) const;
    /// Exact image of a closed subinterval of [0,1].
    Interval image(const Interval& i) const;
    /// Preimage of `target` as disjoint closed intervals, sorted.
    std::vector<Interval> preimage(const Interval& target) const;

    const std::vector<Knot>& knots() const { return knots_; }
    std::string to_string() const;

private:
    std::vector<Knot> knots_;
};

using IntervalSet = std::vector<Interval>;  // sorted, disjoint

struct IntervalChain {
    std::vector<Interval> links;
};

IntervalChain parse_chain(const std::string& text);
/// Links U_j = [(j-1)/n - pad, j/n + pad] clipped to [0,1], pad = 1/(20n).
IntervalChain uniform_chain(int n = 7);
bool is_taut(const IntervalChain& c);

struct Stretch {
    bool holds = false;
    int m = 0;
    bool swapped = false;  // g^m(U3) in U7 and g^m(U5) in U1
};

/// Smallest m <= m_max for which g^m stretches the 7-link chain.
Stretch stretch_check(const PLMap& g, const IntervalChain& chain, int m_max);

/// Sub-chain following `f`: the core of each parent link (10% margins) is
/// split into equal cells, one per visit, each shrunk by 10%.
IntervalChain refine_interval_chain(const IntervalChain& parent, const chains::Pattern& f);

struct ItineraryInterval {
    std::vector<int> word;  // symbols in 1..k
    IntervalSet set;
};

struct Certificate {
    int k = 0;
    int depth = 0;
    int m = 0;
    bool swapped = false;
    bool certified = false;
    double bound = 0.0;                  // log(k)/m
    std::vector<long> nonempty;          // per word length 1..depth+1
    std::optional<std::vector<int>> first_empty;
    std::vector<ItineraryInterval> leaves;  // words of length depth+1, lexicographic
};

std::string word_string(const std::vector<int>& w);

/// Nested itinerary intervals for the k-fold refinement; throws a
/// precondition error when no iterate up to m_max stretches the chain.
Certificate horseshoe_extract(const PLMap& g, const IntervalChain& chain, int k, int depth, int m_max = 4);

/// CSV rows word,component,lo,hi for every leaf.
std::string certificate_csv(const Certificate& c);

/// PL map with k monotone full branches on the cells V_{2i+2} of the
/// k-fold refinement, constant on the gaps.
PLMap full_branch_map(const IntervalChain& chain, int k);

}  // namespace psusp::horseshoe
