#include "psusp/horseshoe.hpp"

#include <algorithm>
#include <cmath>

#include <boost/algorithm/string.hpp>

#include "psusp/error.hpp"
#include "psusp/format.hpp"

namespace psusp::horseshoe {

using chains::parse_rational;
using chains::to_double;

namespace {

std::vector<std::string> split(const std::string& text, const char* seps) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(seps));
    for (auto& p : parts) boost::algorithm::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
    return parts;
}

IntervalSet merge(IntervalSet s) {
    std::sort(s.begin(), s.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalSet out;
    for (auto& i : s) {
        if (i.empty()) continue;
        if (!out.empty() && i.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, i.hi);
        } else {
            out.push_back(std::move(i));
        }
    }
    return out;
}

IntervalSet clip(const IntervalSet& s, const Interval& window) {
    IntervalSet out;
    for (const auto& i : s) {
        Interval c = chains::intersect(i, window);
        if (!c.empty()) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

// --- PL maps -----------------------------------------------------------------

PLMap::PLMap(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) fail(ErrorKind::config, "a PL map needs at least two knots");
    if (knots_.front().x != 0 || knots_.back().x != 1) fail(ErrorKind::config, "PL knots must start at x=0 and end at x=1");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (knots_[i].y < 0 || knots_[i].y > 1) fail(ErrorKind::config, "PL map values must lie in [0,1]");
        if (i > 0 && !(knots_[i - 1].x < knots_[i].x)) fail(ErrorKind::config, "PL knots must have increasing x");
    }
}

PLMap PLMap::parse(const std::string& text) {
    std::vector<Knot> knots;
    for (const auto& pair : split(text, ";")) {
        const auto xy = split(pair, ",");
        if (xy.size() != 2) fail(ErrorKind::config, "bad PL knot '" + pair + "'");
        knots.push_back({parse_rational(xy[0]), parse_rational(xy[1])});
    }
    return PLMap(std::move(knots));
}

Rational PLMap::operator()(const Rational& x) const {
    if (x < 0 || x > 1) fail(ErrorKind::domain, "PL map evaluated outside [0,1]");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](const Rational& v, const Knot& k) { return v < k.x; });
    if (it == knots_.end()) return knots_.back().y;
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

Interval PLMap::image(const Interval& i) const {
    Rational lo = (*this)(i.lo), hi = lo;
    auto widen = [&](const Rational& y) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    };
    widen((*this)(i.hi));
    for (const auto& k : knots_)
        if (i.lo < k.x && k.x < i.hi) widen(k.y);
    return {lo, hi};
}

std::vector<Interval> PLMap::preimage(const Interval& target) const {
    IntervalSet pieces;
    for (std::size_t s = 0; s + 1 < knots_.size(); ++s) {
        const Knot& a = knots_[s];
        const Knot& b = knots_[s + 1];
        if (a.y == b.y) {
            if (target.lo <= a.y && a.y <= target.hi) pieces.push_back({a.x, b.x});
            continue;
        }
        const Rational ylo = std::max(target.lo, std::min(a.y, b.y));
        const Rational yhi = std::min(target.hi, std::max(a.y, b.y));
        if (ylo > yhi) continue;
        auto solve = [&](const Rational& y) { return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y); };
        const Rational x1 = solve(ylo), x2 = solve(yhi);
        pieces.push_back({std::min(x1, x2), std::max(x1, x2)});
    }
    return merge(std::move(pieces));
}

std::string PLMap::to_string() const {
    std::string out;
    for (const auto& k : knots_) {
        if (!out.empty()) out += ";";
        out += k.x.str() + "," + k.y.str();
    }
    return out;
}

// --- interval chains ---------------------------------------------------------

IntervalChain parse_chain(const std::string& text) {
    IntervalChain c;
    for (const auto& pair : split(text, ";")) {
        const auto lh = split(pair, ",");
        if (lh.size() != 2) fail(ErrorKind::config, "bad chain link '" + pair + "'");
        Interval i{parse_rational(lh[0]), parse_rational(lh[1])};
        if (i.empty() || i.lo < 0 || i.hi > 1) fail(ErrorKind::config, "chain link '" + pair + "' is not inside [0,1]");
        c.links.push_back(std::move(i));
    }
    return c;
}

IntervalChain uniform_chain(int n) {
    if (n < 2) fail(ErrorKind::domain, "a chain needs at least 2 links");
    IntervalChain c;
    const Rational pad(1, 20 * n);
    for (int j = 1; j <= n; ++j)
        c.links.push_back({std::max(Rational(0), Rational(Rational(j - 1, n) - pad)),
                           std::min(Rational(1), Rational(Rational(j, n) + pad))});
    return c;
}

bool is_taut(const IntervalChain& c) {
    for (std::size_t i = 0; i < c.links.size(); ++i)
        for (std::size_t j = i + 1; j < c.links.size(); ++j)
            if (chains::meets(c.links[i], c.links[j]) != (j == i + 1)) return false;
    return true;
}

Stretch stretch_check(const PLMap& g, const IntervalChain& chain, int m_max) {
    if (chain.links.size() != 7) fail(ErrorKind::domain, "the stretching test needs a 7-link chain");
    if (!is_taut(chain)) fail(ErrorKind::domain, "chain is not taut");
    Interval u3 = chain.links[2], u5 = chain.links[4];
    const Interval& u1 = chain.links[0];
    const Interval& u7 = chain.links[6];
    for (int m = 1; m <= m_max; ++m) {
        u3 = g.image(u3);
        u5 = g.image(u5);
        if (u1.contains(u3) && u7.contains(u5)) return {true, m, false};
        if (u7.contains(u3) && u1.contains(u5)) return {true, m, true};
    }
    return {};
}

IntervalChain refine_interval_chain(const IntervalChain& parent, const chains::Pattern& f) {
    const int n = static_cast<int>(parent.links.size());
    std::vector<int> visits(static_cast<std::size_t>(n), 0);
    for (int v : f.values) {
        if (v < 1 || v > n) fail(ErrorKind::domain, "pattern value " + std::to_string(v) + " exceeds the parent chain length");
        ++visits[static_cast<std::size_t>(v - 1)];
    }
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    IntervalChain child;
    for (int v : f.values) {
        const Interval& p = parent.links[static_cast<std::size_t>(v - 1)];
        const Rational margin = p.length() / 10;
        const Rational lo = p.lo + margin;
        const Rational cell = (p.length() - 2 * margin) / visits[static_cast<std::size_t>(v - 1)];
        const Rational start = lo + cell * seen[static_cast<std::size_t>(v - 1)]++;
        child.links.push_back({start + cell / 20, start + cell - cell / 20});
    }
    return child;
}

// --- horseshoe ---------------------------------------------------------------

std::string word_string(const std::vector<int>& w) {
    std::string out;
    for (int s : w) {
        if (!out.empty()) out += ",";
        out += std::to_string(s);
    }
    return out;
}

Certificate horseshoe_extract(const PLMap& g, const IntervalChain& chain, int k, int depth, int m_max) {
    if (depth < 0) fail(ErrorKind::domain, "depth must be non-negative");
    const chains::Pattern f = chains::kfold(k);
    const Stretch st = stretch_check(g, chain, m_max);
    if (!st.holds)
        fail(ErrorKind::precondition, "no iterate g^m with m <= " + std::to_string(m_max) + " stretches the chain");
    if (std::pow(static_cast<double>(k), depth + 1) > 2e6) fail(ErrorKind::capacity, "too many itinerary words");
    const IntervalChain V = refine_interval_chain(chain, f);
    auto cell = [&](int symbol) -> const Interval& { return V.links[static_cast<std::size_t>(2 * symbol + 1)]; };

    auto pullback = [&](const IntervalSet& s) {
        IntervalSet cur = s;
        for (int step = 0; step < st.m; ++step) {
            IntervalSet next;
            for (const auto& i : cur)
                for (auto& p : g.preimage(i)) next.push_back(std::move(p));
            cur = merge(std::move(next));
        }
        return cur;
    };

    Certificate cert;
    cert.k = k;
    cert.depth = depth;
    cert.m = st.m;
    cert.swapped = st.swapped;
    cert.bound = std::log(static_cast<double>(k)) / st.m;

    bool disjoint = true;
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j)
            if (chains::meets(cell(i), cell(j))) disjoint = false;

    // level[w] holds Z(w) for words of the current length, lexicographic
    // with the first symbol most significant.
    std::vector<IntervalSet> level;
    for (int i = 1; i <= k; ++i) level.push_back({cell(i)});
    auto decode = [k](std::size_t idx, int len) {
        std::vector<int> w(static_cast<std::size_t>(len));
        for (int p = len - 1; p >= 0; --p) {
            w[static_cast<std::size_t>(p)] = static_cast<int>(idx % static_cast<std::size_t>(k)) + 1;
            idx /= static_cast<std::size_t>(k);
        }
        return w;
    };
    auto record = [&](int len) {
        long count = 0;
        for (std::size_t w = 0; w < level.size(); ++w) {
            if (!level[w].empty()) {
                ++count;
            } else if (!cert.first_empty) {
                cert.first_empty = decode(w, len);
            }
        }
        cert.nonempty.push_back(count);
    };
    record(1);
    for (int len = 2; len <= depth + 1; ++len) {
        const std::size_t tail = level.size();
        std::vector<IntervalSet> pulled(tail);
        for (std::size_t r = 0; r < tail; ++r) pulled[r] = pullback(level[r]);
        std::vector<IntervalSet> next(tail * static_cast<std::size_t>(k));
        for (int i = 1; i <= k; ++i)
            for (std::size_t r = 0; r < tail; ++r)
                next[static_cast<std::size_t>(i - 1) * tail + r] = clip(pulled[r], cell(i));
        level = std::move(next);
        record(len);
    }
    for (std::size_t w = 0; w < level.size(); ++w) cert.leaves.push_back({decode(w, depth + 1), level[w]});
    cert.certified = disjoint && !cert.first_empty;
    return cert;
}

std::string certificate_csv(const Certificate& c) {
    std::string out = "word,component,lo,hi\n";
    for (const auto& leaf : c.leaves) {
        const std::string w = "\"" + word_string(leaf.word) + "\"";
        for (std::size_t i = 0; i < leaf.set.size(); ++i)
            out += w + "," + std::to_string(i) + "," + fmt9(to_double(leaf.set[i].lo)) + "," +
                   fmt9(to_double(leaf.set[i].hi)) + "\n";
    }
    return out;
}

PLMap full_branch_map(const IntervalChain& chain, int k) {
    const IntervalChain V = refine_interval_chain(chain, chains::kfold(k));
    std::vector<Knot> knots{{0, 0}};
    Rational level = 0;
    for (int i = 1; i <= k; ++i) {
        const Interval& c = V.links[static_cast<std::size_t>(2 * i + 1)];
        if (c.lo > knots.back().x) knots.push_back({c.lo, level});
        level = 1 - level;
        knots.push_back({c.hi, level});
    }
    if (knots.back().x < 1) knots.push_back({1, level});
    return PLMap(std::move(knots));
}

}  // namespace psusp::horseshoe
