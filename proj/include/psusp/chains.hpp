#pragma once

/// Patterns, chain covers and pattern-following refinement.
///
/// Links are closed boxes in (t, angular) coordinates with exact rational
/// endpoints; the angular coordinate is a lift, so overlap tests also try
/// the deck shifts -1 and +1.

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace psusp::chains {

using Rational = boost::multiprecision::cpp_rational;

/// "3/7", "0.485", "-2" parsed exactly.
Rational parse_rational(const std::string& text);
double to_double(const Rational& q);

struct Pattern {
    std::vector<int> values;  // f(1..m), 1-based
    int m = 0;
    int n = 0;  // largest value
};

/// 1-based index i with |f(i+1) - f(i)| > 1, if any.
std::optional<int> pattern_violation(const std::vector<int>& values);
/// Throws a domain error naming the violating index.
Pattern pattern_validate(const std::vector<int>& values);
/// The k-fold pattern on 7 links (length 2k + 5); k odd and >= 3.
Pattern kfold(int k);

struct Interval {
    Rational lo;
    Rational hi;

    bool empty() const { return lo > hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    Rational length() const { return hi - lo; }
};
Interval intersect(const Interval& a, const Interval& b);
bool meets(const Interval& a, const Interval& b);

struct Link {
    Interval t;
    Interval a;  // angular lift coordinate
};

struct ChainCover {
    std::vector<Link> links;
    bool closed = false;  // essential annular chain: last link meets the first
    bool taut = false;
};

/// Whether two links' closures meet, allowing deck shifts on the angle.
bool links_meet(const Link& x, const Link& y);
/// Taut: consecutive closures meet and all other pairs are disjoint.
bool is_taut(const ChainCover& c);

/// The n-link essential chain around the annulus, t in [t_lo, t_hi].
ChainCover essential_chain(int n = 7, Rational t_lo = Rational(3, 10), Rational t_hi = Rational(7, 10));

/// Child chain following `f` in `parent`; child link i lies inside parent link f(i).
ChainCover refine_chain(const ChainCover& parent, const Pattern& f);

/// SVG drawing of nested chains on a polar annulus.
std::string render_chains(const std::vector<ChainCover>& levels);

}  // namespace psusp::chains
