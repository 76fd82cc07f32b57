#include "psusp/chains.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <boost/algorithm/string.hpp>

#include "psusp/error.hpp"

namespace psusp::chains {

Rational parse_rational(const std::string& raw) {
    const std::string text = boost::algorithm::trim_copy(raw);
    auto bad = [&]() -> Rational { fail(ErrorKind::config, "cannot parse rational '" + raw + "'"); };
    if (text.empty()) return bad();
    try {
        if (auto slash = text.find('/'); slash != std::string::npos) {
            const Rational num = parse_rational(text.substr(0, slash));
            const Rational den = parse_rational(text.substr(slash + 1));
            if (den == 0) return bad();
            return num / den;
        }
        std::string digits = text;
        bool negative = false;
        if (digits[0] == '-' || digits[0] == '+') {
            negative = digits[0] == '-';
            digits = digits.substr(1);
        }
        boost::multiprecision::cpp_int den = 1;
        if (auto dot = digits.find('.'); dot != std::string::npos) {
            const std::string frac = digits.substr(dot + 1);
            digits = digits.substr(0, dot) + frac;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        }
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return bad();
        // cpp_int reads a leading zero as an octal prefix
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
        Rational q(boost::multiprecision::cpp_int(digits), den);
        return negative ? Rational(-q) : q;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        return bad();
    }
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

// --- patterns ---------------------------------------------------------------

std::optional<int> pattern_violation(const std::vector<int>& values) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (std::abs(values[i + 1] - values[i]) > 1) return static_cast<int>(i + 1);
    return std::nullopt;
}

Pattern pattern_validate(const std::vector<int>& values) {
    if (values.empty()) fail(ErrorKind::domain, "pattern is empty");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < 1) fail(ErrorKind::domain, "pattern value at index " + std::to_string(i + 1) + " is below 1");
    if (auto i = pattern_violation(values))
        fail(ErrorKind::domain, "pattern step condition fails at index " + std::to_string(*i));
    return {values, static_cast<int>(values.size()), *std::max_element(values.begin(), values.end())};
}

Pattern kfold(int k) {
    if (k < 3 || k % 2 == 0)
        fail(ErrorKind::domain, "k-fold patterns require an odd k >= 3 (got " + std::to_string(k) + ")");
    const int m = 2 * k + 5;
    std::vector<int> f(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        int v;
        if (i <= 5) v = i;
        else if (i == 2 * k + 4) v = 6;
        else if (i == 2 * k + 5) v = 7;
        else if (i % 2 == 0) v = 4;
        else if (i % 4 == 3) v = 3;
        else v = 5;
        f[static_cast<std::size_t>(i - 1)] = v;
    }
    return pattern_validate(f);
}

// --- intervals and links ----------------------------------------------------

Interval intersect(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

bool meets(const Interval& a, const Interval& b) { return !intersect(a, b).empty(); }

bool links_meet(const Link& x, const Link& y) {
    if (!meets(x.t, y.t)) return false;
    for (int s = -1; s <= 1; ++s)
        if (meets(x.a, {y.a.lo + s, y.a.hi + s})) return true;
    return false;
}

bool is_taut(const ChainCover& c) {
    const std::size_t n = c.links.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool consecutive = j == i + 1 || (c.closed && n > 2 && i == 0 && j == n - 1);
            if (links_meet(c.links[i], c.links[j]) != consecutive) return false;
        }
    return true;
}

ChainCover essential_chain(int n, Rational t_lo, Rational t_hi) {
    if (n < 3) fail(ErrorKind::domain, "an essential chain needs at least 3 links");
    ChainCover c;
    c.closed = true;
    const Rational pad(1, 4 * n);
    for (int j = 0; j < n; ++j) c.links.push_back({{t_lo, t_hi}, {Rational(j, n) - pad, Rational(j + 1, n) + pad}});
    c.taut = is_taut(c);
    return c;
}

// --- refinement -------------------------------------------------------------

namespace {

struct Pt {
    Rational t;
    Rational a;
};

enum class Axis { t, a };

Interval core(const Interval& i) {
    const Rational m = i.length() / 10;
    return {i.lo + m, i.hi - m};
}

Rational mid(const Interval& i) { return (i.lo + i.hi) / 2; }

Axis long_axis(const Link& l) { return l.a.length() >= l.t.length() ? Axis::a : Axis::t; }

Rational margin_in(const Link& box, const Pt& p) {
    return std::min({p.t - box.t.lo, box.t.hi - p.t, p.a - box.a.lo, box.a.hi - p.a});
}

Rational linf(const Pt& x, const Pt& y) {
    return std::max(abs(Rational(x.t - y.t)), abs(Rational(x.a - y.a)));
}

bool contains(const Link& outer, const Link& inner) { return outer.t.contains(inner.t) && outer.a.contains(inner.a); }

}  // namespace

ChainCover refine_chain(const ChainCover& parent, const Pattern& f) {
    const int n = static_cast<int>(parent.links.size());
    if (f.values.empty()) fail(ErrorKind::domain, "pattern is empty");
    for (int v : f.values)
        if (v < 1 || v > n)
            fail(ErrorKind::domain, "pattern value " + std::to_string(v) + " exceeds the parent chain length " +
                                        std::to_string(n));
    auto P = [&](int idx) -> const Link& { return parent.links[static_cast<std::size_t>(idx - 1)]; };
    const int m = static_cast<int>(f.values.size());

    // Lane index of each transition: number of direction reversals so far.
    std::vector<int> lane(static_cast<std::size_t>(std::max(m - 1, 0)), 0);
    int last_dir = 0, reversals = 0;
    for (int j = 0; j + 1 < m; ++j) {
        const int d = f.values[static_cast<std::size_t>(j + 1)] - f.values[static_cast<std::size_t>(j)];
        if (d != 0) {
            if (last_dir != 0 && d != last_dir) ++reversals;
            last_dir = d;
        }
        lane[static_cast<std::size_t>(j)] = reversals;
    }
    const Rational lanes(reversals + 2);

    // anchors[j] joins child j and child j + 1 (0 and m are the chain ends).
    std::vector<std::optional<Pt>> anchors(static_cast<std::size_t>(m + 1));
    std::vector<Link> region(static_cast<std::size_t>(m + 1));
    std::vector<Axis> travel_of(static_cast<std::size_t>(m + 1), Axis::a);
    for (int j = 1; j < m; ++j) {
        const int pa = f.values[static_cast<std::size_t>(j - 1)], pb = f.values[static_cast<std::size_t>(j)];
        region[static_cast<std::size_t>(j)] = P(pa);
        if (pa == pb) continue;
        const Link O{intersect(P(pa).t, P(pb).t), intersect(P(pa).a, P(pb).a)};
        if (O.t.empty() || O.a.empty())
            fail(ErrorKind::resolution, "consecutive parent links " + std::to_string(pa) + "," + std::to_string(pb) +
                                            " do not overlap");
        region[static_cast<std::size_t>(j)] = O;
        const Rational da = abs(Rational(mid(P(pb).a) - mid(P(pa).a)));
        const Rational dt = abs(Rational(mid(P(pb).t) - mid(P(pa).t)));
        const Axis travel = da >= dt ? Axis::a : Axis::t;
        travel_of[static_cast<std::size_t>(j)] = travel;
        const Interval ct = core(O.t), ca = core(O.a);
        const Rational frac = Rational(lane[static_cast<std::size_t>(j - 1)] + 1) / lanes;
        Pt p;
        if (travel == Axis::a) {
            p = {ct.lo + (ct.hi - ct.lo) * frac, mid(ca)};
        } else {
            p = {mid(ct), ca.lo + (ca.hi - ca.lo) * frac};
        }
        anchors[static_cast<std::size_t>(j)] = p;
    }

    const Link& first = P(f.values.front());
    const Link& last = P(f.values.back());
    region[0] = first;
    region[static_cast<std::size_t>(m)] = last;
    auto first_fixed = std::find_if(anchors.begin() + 1, anchors.end() - 1, [](const auto& a) { return a.has_value(); });
    if (first_fixed == anchors.end() - 1) {
        // No transitions between distinct links: spread the anchors along one link.
        const Axis ax = long_axis(first);
        const Interval c = core(ax == Axis::a ? first.a : first.t);
        for (int j = 0; j <= m; ++j) {
            const Rational s = c.lo + (c.hi - c.lo) * Rational(j, m);
            anchors[static_cast<std::size_t>(j)] = ax == Axis::a ? Pt{mid(first.t), s} : Pt{s, mid(first.a)};
        }
    } else {
        // Ends sit at the link centre along the direction the chain leaves it.
        const Pt nf = **first_fixed;
        const auto last_fixed = std::find_if(anchors.rbegin() + 1, anchors.rend() - 1, [](const auto& a) { return a.has_value(); });
        const Pt nl = **last_fixed;
        const Axis ax_first = travel_of[static_cast<std::size_t>(first_fixed - anchors.begin())];
        const Axis ax_last = travel_of[static_cast<std::size_t>(anchors.rend() - 1 - last_fixed)];
        anchors[0] = ax_first == Axis::a ? Pt{nf.t, mid(first.a)} : Pt{mid(first.t), nf.a};
        anchors[static_cast<std::size_t>(m)] = ax_last == Axis::a ? Pt{nl.t, mid(last.a)} : Pt{mid(last.t), nl.a};
        // Stays: interpolate between the surrounding fixed anchors.
        int prev = 0;
        for (int j = 1; j <= m; ++j) {
            if (!anchors[static_cast<std::size_t>(j)]) continue;
            const Pt a0 = *anchors[static_cast<std::size_t>(prev)], a1 = *anchors[static_cast<std::size_t>(j)];
            for (int s = prev + 1; s < j; ++s) {
                const Rational w(s - prev, j - prev);
                anchors[static_cast<std::size_t>(s)] = Pt{a0.t + (a1.t - a0.t) * w, a0.a + (a1.a - a0.a) * w};
            }
            prev = j;
        }
    }

    Rational min_margin = -1, min_sep = -1;
    for (int j = 0; j <= m; ++j) {
        const Rational mg = margin_in(region[static_cast<std::size_t>(j)], *anchors[static_cast<std::size_t>(j)]);
        if (min_margin < 0 || mg < min_margin) min_margin = mg;
        for (int k = j + 1; k <= m; ++k) {
            const Rational d = linf(*anchors[static_cast<std::size_t>(j)], *anchors[static_cast<std::size_t>(k)]);
            if (d > 0 && (min_sep < 0 || d < min_sep)) min_sep = d;
        }
    }
    Rational eta = min_margin / 2;
    if (min_sep > 0) eta = std::min(eta, Rational(min_sep / 4));

    const Rational floor_eta(1, 1000000);
    for (; eta >= floor_eta; eta /= 2) {
        ChainCover child;
        child.closed = false;
        bool inside = true;
        for (int j = 1; j <= m && inside; ++j) {
            const Pt& x = *anchors[static_cast<std::size_t>(j - 1)];
            const Pt& y = *anchors[static_cast<std::size_t>(j)];
            Link l{{std::min(x.t, y.t) - eta, std::max(x.t, y.t) + eta}, {std::min(x.a, y.a) - eta, std::max(x.a, y.a) + eta}};
            inside = contains(P(f.values[static_cast<std::size_t>(j - 1)]), l);
            child.links.push_back(std::move(l));
        }
        if (inside && is_taut(child)) {
            child.taut = true;
            return child;
        }
    }
    fail(ErrorKind::resolution, "refinement margins collapsed below 1e-6");
}

// --- rendering --------------------------------------------------------------

namespace {

std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string render_chains(const std::vector<ChainCover>& levels) {
    constexpr double cx = 200.0, cy = 200.0, r_in = 60.0, r_out = 180.0;
    constexpr double two_pi = 6.283185307179586;
    auto polar = [&](double t, double a) {
        const double rad = r_in + t * (r_out - r_in);
        return num(cx + rad * std::cos(two_pi * a)) + "," + num(cy - rad * std::sin(two_pi * a));
    };
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n"
        "<circle id=\"inner\" cx=\"200\" cy=\"200\" r=\"60\" fill=\"none\" stroke=\"#999\"/>\n"
        "<circle id=\"outer\" cx=\"200\" cy=\"200\" r=\"180\" fill=\"none\" stroke=\"#999\"/>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t lv = 0; lv < levels.size(); ++lv) {
        svg += "<g id=\"level-" + std::to_string(lv) + "\" fill=\"none\" stroke=\"" + colors[lv % 5] +
               "\" stroke-width=\"0.6\">\n";
        for (std::size_t i = 0; i < levels[lv].links.size(); ++i) {
            const Link& l = levels[lv].links[i];
            const double t0 = to_double(l.t.lo), t1 = to_double(l.t.hi);
            const double a0 = to_double(l.a.lo), a1 = to_double(l.a.hi);
            const int steps = std::max(2, static_cast<int>(std::ceil((a1 - a0) * 96)));
            std::string pts;
            for (int s = 0; s <= steps; ++s) pts += polar(t0, a0 + (a1 - a0) * s / steps) + " ";
            for (int s = steps; s >= 0; --s) pts += polar(t1, a0 + (a1 - a0) * s / steps) + " ";
            pts.pop_back();
            svg += "<polygon id=\"level-" + std::to_string(lv) + "-link-" + std::to_string(i + 1) + "\" points=\"" +
                   pts + "\"/>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace psusp::chains
