#include "psusp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/random/uniform_int_distribution.hpp>

#include "psusp/error.hpp"

namespace psusp::sampling {

using cantor::CantorSystem;
using cantor::Symbol;
using cantor::SymbolSequence;
using cantor::Word;

namespace {

int pick(Rng& rng, int lo, int hi) {
    boost::random::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

bool step_allowed(const CantorSystem& sys, Symbol a, Symbol b) {
    if (const auto* s = std::get_if<cantor::Sft>(&sys.kind())) return s->adjacency->allowed(a, b);
    return true;
}

std::vector<Symbol> next_symbols(const CantorSystem& sys, Symbol from, bool forward) {
    std::vector<Symbol> out;
    for (Symbol b = 0; b < sys.alphabet_size(); ++b)
        if (forward ? step_allowed(sys, from, b) : step_allowed(sys, b, from)) out.push_back(b);
    return out;
}

double count_paths(const CantorSystem& sys, Symbol start, long length, bool forward) {
    std::vector<double> ways(static_cast<std::size_t>(sys.alphabet_size()), 0.0);
    ways[static_cast<std::size_t>(start)] = 1.0;
    for (long e = 0; e < length; ++e) {
        std::vector<double> next(ways.size(), 0.0);
        for (Symbol a = 0; a < sys.alphabet_size(); ++a)
            if (ways[static_cast<std::size_t>(a)] > 0)
                for (Symbol b : next_symbols(sys, a, forward)) next[static_cast<std::size_t>(b)] += ways[static_cast<std::size_t>(a)];
        ways = std::move(next);
    }
    double total = 0.0;
    for (double w : ways) total += w;
    return total;
}

Word random_path(const CantorSystem& sys, Symbol start, long length, bool forward, Rng& rng) {
    Word w;
    Symbol cur = start;
    for (long e = 0; e < length; ++e) {
        const auto opts = next_symbols(sys, cur, forward);
        cur = opts[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(opts.size()) - 1))];
        w.push_back(cur);
    }
    return w;
}

void enumerate_paths(const CantorSystem& sys, Symbol cur, long length, bool forward, Word& prefix,
                     std::vector<Word>& out) {
    if (static_cast<long>(prefix.size()) == length) {
        out.push_back(prefix);
        return;
    }
    for (Symbol b : next_symbols(sys, cur, forward)) {
        prefix.push_back(b);
        enumerate_paths(sys, b, length, forward, prefix, out);
        prefix.pop_back();
    }
}

// Admissible words of `length` leaving `start` (forward: to the right).
std::vector<Word> paths(const CantorSystem& sys, Symbol start, long length, bool forward, long cap, Rng& rng) {
    if (length == 0) return {Word{}};
    if (count_paths(sys, start, length, forward) <= static_cast<double>(cap)) {
        std::vector<Word> out;
        Word prefix;
        enumerate_paths(sys, start, length, forward, prefix, out);
        return out;
    }
    std::set<Word> picked;
    for (long attempt = 0; attempt < 8 * cap && static_cast<long>(picked.size()) < cap; ++attempt)
        picked.insert(random_path(sys, start, length, forward, rng));
    return {picked.begin(), picked.end()};
}

template <class T>
void random_subset(std::vector<T>& items, long cap, Rng& rng) {
    if (static_cast<long>(items.size()) <= cap) return;
    for (long i = 0; i < cap; ++i) {
        const int j = pick(rng, static_cast<int>(i), static_cast<int>(items.size()) - 1);
        std::swap(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
    }
    items.resize(static_cast<std::size_t>(cap));
}

std::vector<long> block_occurrences(const Word& text, const Word& block, long room_left, long room_right) {
    std::vector<long> out;
    const long n = static_cast<long>(text.size());
    const long len = static_cast<long>(block.size());
    for (long p = room_left; p + len + room_right <= n; ++p)
        if (std::equal(block.begin(), block.end(), text.begin() + p)) out.push_back(p);
    return out;
}

SymbolSequence odometer_variant(const CantorSystem& sys, const SymbolSequence& center, int m, Rng& rng) {
    const auto bases = sys.digit_bases();
    std::vector<int> digits(bases.size());
    for (std::size_t j = 0; j < bases.size(); ++j)
        digits[j] = static_cast<int>(j) < m ? center.symbol(static_cast<long>(j)) : pick(rng, 0, bases[j] - 1);
    return cantor::odometer_point(sys, digits, center.radius());
}

}  // namespace

int strict_depth(double radius) {
    if (!(radius > 0.0)) fail(ErrorKind::domain, "radius must be positive");
    int m = 0;
    while (!(std::ldexp(1.0, -m) < radius)) ++m;
    return m;
}

Word central_block(const SymbolSequence& c, int m) {
    Word w;
    for (long j = -(m - 1); j <= m - 1; ++j) w.push_back(c.symbol(j));
    return w;
}

std::vector<Word> central_words(const CantorSystem& sys, int m) {
    if (m < 1) return {Word{}};
    const long len = 2L * m - 1;
    if (sys.is_odometer()) {
        const auto bases = sys.digit_bases();
        const int digits = std::min<int>(m, static_cast<int>(bases.size()));
        std::vector<Word> out;
        Word w(static_cast<std::size_t>(len), 0);
        for (;;) {
            out.push_back(w);
            int j = 0;
            while (j < digits && ++w[static_cast<std::size_t>(m - 1 + j)] == bases[static_cast<std::size_t>(j)]) {
                w[static_cast<std::size_t>(m - 1 + j)] = 0;
                ++j;
            }
            if (j == digits) break;
        }
        return out;
    }
    if (std::holds_alternative<cantor::Substitution>(sys.kind())) {
        const Word& text = sys.substitution_word();
        std::set<Word> seen;
        for (std::size_t p = 0; p + static_cast<std::size_t>(len) <= text.size(); ++p)
            seen.emplace(text.begin() + static_cast<long>(p), text.begin() + static_cast<long>(p) + len);
        return {seen.begin(), seen.end()};
    }
    if (std::pow(sys.alphabet_size(), static_cast<double>(len)) > 4e6)
        fail(ErrorKind::domain, "eps too small for an explicit cylinder net");
    std::vector<Word> out;
    for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
        std::vector<Word> tails;
        Word prefix;
        enumerate_paths(sys, s, len - 1, true, prefix, tails);
        for (auto& t : tails) {
            Word w{s};
            w.insert(w.end(), t.begin(), t.end());
            out.push_back(std::move(w));
        }
    }
    return out;
}

SymbolSequence sample_cylinder(const CantorSystem& sys, const SymbolSequence& center, int m, int span, Rng& rng) {
    if (sys.is_odometer()) return odometer_variant(sys, center, m, rng);
    span = std::max(span, m);
    const Word block = central_block(center, m);
    const long side = span - (m - 1);
    if (std::holds_alternative<cantor::Substitution>(sys.kind())) {
        const Word& text = sys.substitution_word();
        const auto occ = block_occurrences(text, block, side, side);
        if (occ.empty()) return center;
        const long p = occ[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(occ.size()) - 1))];
        Word core(text.begin() + (p - side), text.begin() + p + static_cast<long>(block.size()) + side);
        return cantor::point_from_core(sys, std::move(core), -span, center.radius());
    }
    Word core;
    if (m >= 1) {
        const Word left = random_path(sys, block.front(), side, false, rng);
        const Word right = random_path(sys, block.back(), side, true, rng);
        core.assign(left.rbegin(), left.rend());
        core.insert(core.end(), block.begin(), block.end());
        core.insert(core.end(), right.begin(), right.end());
    } else {
        core.push_back(pick(rng, 0, sys.alphabet_size() - 1));
        const Word right = random_path(sys, core.front(), 2 * span, true, rng);
        core.insert(core.end(), right.begin(), right.end());
    }
    return cantor::point_from_core(sys, std::move(core), -span, center.radius());
}

std::vector<SymbolSequence> continuations(const CantorSystem& sys, const SymbolSequence& anchor, int m, long w_lo,
                                          long w_hi, long cap, Rng& rng) {
    cap = std::max<long>(cap, 1);
    if (m < 1) m = 1;
    std::vector<SymbolSequence> out;
    if (sys.is_odometer()) {
        out.push_back(anchor);
        while (static_cast<long>(out.size()) < cap) out.push_back(odometer_variant(sys, anchor, m, rng));
        return out;
    }
    const long lf = std::max(0L, w_hi);
    const long lb = std::max(0L, -w_lo);
    const Word block = central_block(anchor, m);
    const long core_start = -(m - 1) - lb;

    if (std::holds_alternative<cantor::Substitution>(sys.kind())) {
        const Word& text = sys.substitution_word();
        std::set<Word> seen;
        std::vector<Word> segments;
        for (long p : block_occurrences(text, block, lb, lf)) {
            Word seg(text.begin() + (p - lb), text.begin() + p + static_cast<long>(block.size()) + lf);
            if (seen.insert(seg).second) segments.push_back(std::move(seg));
        }
        if (segments.empty()) return {anchor};
        random_subset(segments, cap, rng);
        for (auto& seg : segments) out.push_back(cantor::point_from_core(sys, std::move(seg), core_start, anchor.radius()));
        return out;
    }

    const auto fwd = paths(sys, block.back(), lf, true, cap, rng);
    const auto bwd = paths(sys, block.front(), lb, false, cap, rng);
    std::vector<std::pair<std::size_t, std::size_t>> combos;
    if (static_cast<double>(fwd.size()) * static_cast<double>(bwd.size()) <= static_cast<double>(cap)) {
        for (std::size_t b = 0; b < bwd.size(); ++b)
            for (std::size_t f = 0; f < fwd.size(); ++f) combos.emplace_back(b, f);
    } else {
        std::set<std::pair<std::size_t, std::size_t>> picked;
        for (long attempt = 0; attempt < 8 * cap && static_cast<long>(picked.size()) < cap; ++attempt)
            picked.emplace(static_cast<std::size_t>(pick(rng, 0, static_cast<int>(bwd.size()) - 1)),
                           static_cast<std::size_t>(pick(rng, 0, static_cast<int>(fwd.size()) - 1)));
        combos.assign(picked.begin(), picked.end());
    }
    for (const auto& [b, f] : combos) {
        Word core(bwd[b].rbegin(), bwd[b].rend());
        core.insert(core.end(), block.begin(), block.end());
        core.insert(core.end(), fwd[f].begin(), fwd[f].end());
        out.push_back(cantor::point_from_core(sys, std::move(core), core_start, anchor.radius()));
    }
    return out;
}

}  // namespace psusp::sampling
