#include "psusp/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "psusp/error.hpp"

namespace psusp::cantor {

namespace {

struct Tail {
    Word prefix;
    Word cycle;

    Symbol at(long m) const {
        if (m < static_cast<long>(prefix.size())) return prefix[static_cast<std::size_t>(m)];
        const long k = m - static_cast<long>(prefix.size());
        return cycle[static_cast<std::size_t>(k % static_cast<long>(cycle.size()))];
    }
};

// Follow the deterministic walk `next` from `start` until a state repeats.
template <class Next>
Tail walk_tail(Symbol start, Next next) {
    Word seq;
    std::map<Symbol, std::size_t> seen;
    Symbol cur = start;
    for (;;) {
        const Symbol nxt = next(cur);
        if (auto it = seen.find(nxt); it != seen.end()) {
            Tail t;
            t.prefix.assign(seq.begin(), seq.begin() + static_cast<long>(it->second));
            t.cycle.assign(seq.begin() + static_cast<long>(it->second), seq.end());
            return t;
        }
        seen[nxt] = seq.size();
        seq.push_back(nxt);
        cur = nxt;
    }
}

Symbol smallest_successor(const Adjacency& a, Symbol s) {
    for (Symbol b = 0; b < a.size(); ++b)
        if (a.allowed(s, b)) return b;
    fail(ErrorKind::invalid_point, "symbol has no admissible successor");
}

Symbol smallest_predecessor(const Adjacency& a, Symbol s) {
    for (Symbol b = 0; b < a.size(); ++b)
        if (a.allowed(b, s)) return b;
    fail(ErrorKind::invalid_point, "symbol has no admissible predecessor");
}

std::string word_text(const Word& w) {
    std::string s;
    for (Symbol x : w) s += std::to_string(x) + (w.size() > 1 ? "," : "");
    if (!s.empty() && s.back() == ',') s.pop_back();
    return s;
}

Word substitute_until(const std::vector<Word>& rules, std::size_t min_len) {
    Word w{0};
    while (w.size() < min_len) {
        Word next;
        next.reserve(w.size() * 2);
        for (Symbol s : w) next.insert(next.end(), rules[static_cast<std::size_t>(s)].begin(),
                                       rules[static_cast<std::size_t>(s)].end());
        if (next.size() <= w.size())
            fail(ErrorKind::config, "cantor.rules: substitution does not grow");
        w = std::move(next);
    }
    return w;
}

bool contains_factor(const Word& text, const Word& w) {
    if (w.empty()) return true;
    return std::search(text.begin(), text.end(), w.begin(), w.end()) != text.end();
}

using Rng = boost::random::mt19937_64;

int uniform(Rng& rng, int lo, int hi) {
    boost::random::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

}  // namespace

// --- Adjacency -------------------------------------------------------------

Adjacency::Adjacency(std::vector<std::vector<int>> rows) : k_(static_cast<int>(rows.size())) {
    if (k_ < 2) fail(ErrorKind::config, "cantor.adjacency: need at least 2 symbols");
    cells_.reserve(static_cast<std::size_t>(k_ * k_));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != k_)
            fail(ErrorKind::config, "cantor.adjacency: matrix is not square");
        for (int x : row) {
            if (x != 0 && x != 1) fail(ErrorKind::config, "cantor.adjacency: entries must be 0 or 1");
            cells_.push_back(static_cast<std::uint8_t>(x));
        }
    }
    for (int i = 0; i < k_; ++i) {
        bool row_any = false, col_any = false;
        for (int j = 0; j < k_; ++j) {
            row_any = row_any || allowed(i, j);
            col_any = col_any || allowed(j, i);
        }
        if (!row_any || !col_any)
            fail(ErrorKind::config, "cantor.adjacency: all-zero row or column at symbol " + std::to_string(i));
    }
}

bool Adjacency::irreducible() const {
    for (int s = 0; s < k_; ++s) {
        std::vector<char> seen(static_cast<std::size_t>(k_), 0);
        std::vector<int> stack{s};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < k_; ++v)
                if (allowed(u, v) && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
        }
        if (std::count(seen.begin(), seen.end(), 1) != k_) return false;
    }
    return true;
}

std::vector<std::vector<int>> Adjacency::rows() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_)));
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = allowed(i, j);
    return out;
}

// --- SymbolSequence --------------------------------------------------------

struct SymbolSequence::Source {
    Word core;
    long core_start = 0;
    Tail left;
    Tail right;
    Extension ext;
    int alphabet = 2;

    Symbol at(long j) const {
        const long end = core_start + static_cast<long>(core.size());
        if (j >= core_start && j < end) return core[static_cast<std::size_t>(j - core_start)];
        if (j >= end) return right.at(j - end);
        return left.at(core_start - 1 - j);
    }
};

SymbolSequence::SymbolSequence(Word core, long core_start, Extension ext, int alphabet_size, int radius)
    : radius_(radius) {
    if (radius < 0) fail(ErrorKind::domain, "window radius must be nonnegative");
    if (alphabet_size < 1) fail(ErrorKind::invalid_point, "alphabet size must be positive");
    if (core.empty()) fail(ErrorKind::invalid_point, "sequence core is empty");
    for (Symbol s : core)
        if (s < 0 || s >= alphabet_size)
            fail(ErrorKind::invalid_point, "symbol " + std::to_string(s) + " outside alphabet");

    auto src = std::make_shared<Source>();
    src->alphabet = alphabet_size;
    if (const auto* p = std::get_if<PeriodicTails>(&ext)) {
        if (p->left.empty() || p->right.empty())
            fail(ErrorKind::invalid_point, "periodic tails need nonempty period words");
        for (Symbol s : p->left)
            if (s < 0 || s >= alphabet_size) fail(ErrorKind::invalid_point, "tail symbol outside alphabet");
        for (Symbol s : p->right)
            if (s < 0 || s >= alphabet_size) fail(ErrorKind::invalid_point, "tail symbol outside alphabet");
        src->left.cycle = p->left;
        src->right.cycle = p->right;
    } else if (const auto* g = std::get_if<GraphPathTails>(&ext)) {
        const Adjacency& a = *g->adjacency;
        if (a.size() != alphabet_size) fail(ErrorKind::invalid_point, "adjacency size differs from alphabet");
        for (std::size_t i = 0; i + 1 < core.size(); ++i)
            if (!a.allowed(core[i], core[i + 1]))
                fail(ErrorKind::invalid_point, "inadmissible transition " + std::to_string(core[i]) + "->" +
                                                   std::to_string(core[i + 1]));
        src->right = walk_tail(core.back(), [&](Symbol s) { return smallest_successor(a, s); });
        src->left = walk_tail(core.front(), [&](Symbol s) { return smallest_predecessor(a, s); });
    } else {
        src->left.cycle = {0};
        src->right.cycle = {0};
    }
    src->core = std::move(core);
    src->core_start = core_start;
    src->ext = std::move(ext);
    source_ = std::move(src);
    fill_window();
}

SymbolSequence::SymbolSequence(std::shared_ptr<const Source> source, long offset, int radius)
    : source_(std::move(source)), offset_(offset), radius_(radius) {
    fill_window();
}

void SymbolSequence::fill_window() {
    window_.resize(static_cast<std::size_t>(2 * radius_ + 1));
    for (int i = -radius_; i <= radius_; ++i) window_[static_cast<std::size_t>(i + radius_)] = source_->at(offset_ + i);
}

int SymbolSequence::alphabet_size() const noexcept { return source_->alphabet; }

Symbol SymbolSequence::symbol(long i) const {
    if (i >= -radius_ && i <= radius_) return window_[static_cast<std::size_t>(i + radius_)];
    return source_->at(offset_ + i);
}

const Extension& SymbolSequence::extension() const noexcept { return source_->ext; }

SymbolSequence SymbolSequence::shifted(long n) const { return SymbolSequence(source_, offset_ + n, radius_); }

SymbolSequence SymbolSequence::with_radius(int radius) const {
    if (radius < 0) fail(ErrorKind::domain, "window radius must be nonnegative");
    return SymbolSequence(source_, offset_, radius);
}

bool SymbolSequence::agrees_with(const SymbolSequence& other, int radius) const {
    for (long i = -radius; i <= radius; ++i)
        if (symbol(i) != other.symbol(i)) return false;
    return true;
}

// --- CantorSystem ----------------------------------------------------------

CantorSystem::CantorSystem(SystemKind kind, std::string label, int alphabet)
    : kind_(std::move(kind)), label_(std::move(label)), alphabet_(alphabet) {}

CantorSystem CantorSystem::full_shift(int k) {
    if (k < 2) fail(ErrorKind::config, "cantor.k: full shift needs k >= 2");
    return CantorSystem(FullShift{k}, "fullshift(" + std::to_string(k) + ")", k);
}

CantorSystem CantorSystem::sft(std::vector<std::vector<int>> adjacency) {
    auto a = std::make_shared<const Adjacency>(std::move(adjacency));
    const int k = a->size();
    return CantorSystem(Sft{a}, "sft(" + std::to_string(k) + ")", k);
}

CantorSystem CantorSystem::substitution(std::vector<Word> rules) {
    const int k = static_cast<int>(rules.size());
    if (k < 2) fail(ErrorKind::config, "cantor.rules: need at least 2 symbols");
    for (const auto& r : rules) {
        if (r.empty()) fail(ErrorKind::config, "cantor.rules: empty image word");
        for (Symbol s : r)
            if (s < 0 || s >= k) fail(ErrorKind::config, "cantor.rules: image symbol outside alphabet");
    }
    // Primitivity: some boolean power of the incidence matrix up to 2k is positive.
    std::vector<std::vector<char>> m(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
    for (int a = 0; a < k; ++a)
        for (Symbol s : rules[static_cast<std::size_t>(a)]) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)] = 1;
    auto power = m;
    bool primitive = false;
    for (int e = 1; e <= 2 * k && !primitive; ++e) {
        primitive = std::all_of(power.begin(), power.end(),
                                [](const auto& row) { return std::all_of(row.begin(), row.end(), [](char c) { return c != 0; }); });
        if (primitive) break;
        auto next = power;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                char v = 0;
                for (int l = 0; l < k && !v; ++l)
                    v = static_cast<char>(power[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] &&
                                          m[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)]);
                next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            }
        power = std::move(next);
    }
    if (!primitive) fail(ErrorKind::config, "cantor.rules: substitution is not primitive");

    std::string label = "substitution(";
    for (int a = 0; a < k; ++a)
        label += std::to_string(a) + ":" + word_text(rules[static_cast<std::size_t>(a)]) + (a + 1 < k ? ";" : ")");
    CantorSystem sys(Substitution{rules}, label, k);
    sys.language_word_ = std::make_shared<const Word>(substitute_until(rules, std::size_t{1} << 16));
    return sys;
}

CantorSystem CantorSystem::odometer(std::vector<int> bases, int depth) {
    if (bases.empty()) fail(ErrorKind::config, "cantor.bases: empty base list");
    for (int b : bases)
        if (b < 2) fail(ErrorKind::config, "cantor.bases: every base must be >= 2");
    if (depth == 0) depth = static_cast<int>(bases.size());
    if (depth < 1) fail(ErrorKind::config, "cantor.depth: must be >= 1");
    const int alphabet = *std::max_element(bases.begin(), bases.end());
    std::string label = "odometer(";
    for (std::size_t i = 0; i < bases.size(); ++i) label += std::to_string(bases[i]) + (i + 1 < bases.size() ? "," : ")");
    CantorSystem sys(Odometer{std::move(bases), depth}, label, alphabet);
    if (sys.odometer_period() <= 0) fail(ErrorKind::config, "cantor.depth: odometer period overflows");
    return sys;
}

std::vector<int> CantorSystem::digit_bases() const {
    const auto* o = std::get_if<Odometer>(&kind_);
    if (!o) fail(ErrorKind::domain, "digit bases requested for a non-odometer system");
    std::vector<int> out(static_cast<std::size_t>(o->depth));
    for (int j = 0; j < o->depth; ++j) out[static_cast<std::size_t>(j)] = o->bases[static_cast<std::size_t>(j) % o->bases.size()];
    return out;
}

long CantorSystem::odometer_period() const {
    long p = 1;
    for (int b : digit_bases()) {
        if (p > (1L << 40) / b) return -1;
        p *= b;
    }
    return p;
}

const Word& CantorSystem::substitution_word() const {
    if (!language_word_) fail(ErrorKind::domain, "language word requested for a non-substitution system");
    return *language_word_;
}

// --- operations ------------------------------------------------------------

void validate(const SymbolSequence& c, const CantorSystem& sys) {
    const int R = c.radius();
    for (int i = -R; i <= R; ++i)
        if (c[i] < 0 || c[i] >= sys.alphabet_size())
            fail(ErrorKind::invalid_point, "symbol at index " + std::to_string(i) + " outside alphabet");
    if (const auto* s = std::get_if<Sft>(&sys.kind())) {
        for (int i = -R; i < R; ++i)
            if (!s->adjacency->allowed(c[i], c[i + 1]))
                fail(ErrorKind::invalid_point, "inadmissible transition at index " + std::to_string(i));
    } else if (sys.is_odometer()) {
        const auto bases = sys.digit_bases();
        if (static_cast<int>(bases.size()) > R + 1)
            fail(ErrorKind::capacity, "window radius too small for odometer depth");
        for (std::size_t j = 0; j < bases.size(); ++j)
            if (c[static_cast<int>(j)] >= bases[j])
                fail(ErrorKind::invalid_point, "odometer digit " + std::to_string(j) + " exceeds its base");
    }
}

namespace {

SymbolSequence odometer_add(const SymbolSequence& c, const CantorSystem& sys, long n) {
    const auto bases = sys.digit_bases();
    const long period = sys.odometer_period();
    long value = 0, place = 1;
    for (std::size_t j = 0; j < bases.size(); ++j) {
        value += c[static_cast<int>(j)] * place;
        place *= bases[j];
    }
    value = ((value + n) % period + period) % period;
    std::vector<int> digits(bases.size());
    for (std::size_t j = 0; j < bases.size(); ++j) {
        digits[j] = static_cast<int>(value % bases[j]);
        value /= bases[j];
    }
    return odometer_point(sys, digits, c.radius());
}

}  // namespace

SymbolSequence shift_forward(const SymbolSequence& c, const CantorSystem& sys) { return iterate(c, sys, 1); }

SymbolSequence shift_backward(const SymbolSequence& c, const CantorSystem& sys) { return iterate(c, sys, -1); }

SymbolSequence iterate(const SymbolSequence& c, const CantorSystem& sys, long n) {
    if (sys.is_odometer()) return odometer_add(c, sys, n);
    if (const auto* s = std::get_if<Sft>(&sys.kind())) {
        // Only the newly exposed window symbols need checking.
        const auto out = c.shifted(n);
        const int R = out.radius();
        for (int i = -R; i < R; ++i)
            if (!s->adjacency->allowed(out[i], out[i + 1]))
                fail(ErrorKind::invalid_point, "inadmissible transition at index " + std::to_string(i));
        return out;
    }
    return c.shifted(n);
}

double cantor_metric(const SymbolSequence& c1, const SymbolSequence& c2, int radius) {
    for (int m = 0; m <= radius; ++m)
        if (c1.symbol(m) != c2.symbol(m) || c1.symbol(-m) != c2.symbol(-m)) return std::ldexp(1.0, -m);
    return 0.0;
}

int agreement_depth(double eps) {
    if (!(eps > 0.0)) fail(ErrorKind::domain, "eps must be positive");
    int m = 0;
    while (std::ldexp(1.0, -m) > eps) ++m;
    return m;
}

namespace {

// Power iteration on M + I for an irreducible 0/1 matrix.
double power_radius(const std::vector<std::vector<char>>& m) {
    const std::size_t k = m.size();
    std::vector<double> v(k, 1.0), w(k);
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        for (std::size_t i = 0; i < k; ++i) {
            double s = v[i];
            for (std::size_t j = 0; j < k; ++j)
                if (m[i][j]) s += v[j];
            w[i] = s;
        }
        const double norm = *std::max_element(w.begin(), w.end());
        const double next = norm / *std::max_element(v.begin(), v.end());
        double moved = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            moved = std::max(moved, std::abs(w[i] / norm - v[i]));
            v[i] = w[i] / norm;
        }
        // The max-ratio can stall for a step before the vector settles.
        if (it > 0 && std::abs(next - lambda) <= 1e-9 * next && moved <= 1e-10) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda - 1.0;
}

}  // namespace

double spectral_radius(const Adjacency& a) {
    // Largest radius over the strongly connected components.
    const int k = a.size();
    std::vector<std::vector<char>> reach(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) reach[i][j] = a.allowed(i, j) || i == j;
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (reach[i][m] && reach[m][j]) reach[i][j] = 1;
    std::vector<char> done(static_cast<std::size_t>(k), 0);
    double best = 0.0;
    for (int s = 0; s < k; ++s) {
        if (done[s]) continue;
        std::vector<int> comp;
        for (int j = 0; j < k; ++j)
            if (reach[s][j] && reach[j][s]) {
                comp.push_back(j);
                done[j] = 1;
            }
        std::vector<std::vector<char>> sub(comp.size(), std::vector<char>(comp.size()));
        bool edges = false;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (std::size_t j = 0; j < comp.size(); ++j) {
                sub[i][j] = a.allowed(comp[i], comp[j]);
                edges = edges || sub[i][j];
            }
        if (edges) best = std::max(best, power_radius(sub));
    }
    return best;
}

ExactEntropy entropy_exact(const CantorSystem& sys) {
    return std::visit(
        [](const auto& kind) -> ExactEntropy {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, FullShift>) {
                return {std::log(static_cast<double>(kind.k)), false};
            } else if constexpr (std::is_same_v<T, Sft>) {
                return {std::log(spectral_radius(*kind.adjacency)), !kind.adjacency->irreducible()};
            } else {
                return {0.0, false};
            }
        },
        sys.kind());
}

SymbolSequence point_from_core(const CantorSystem& sys, Word core, long core_start, int radius) {
    return std::visit(
        [&](const auto& kind) -> SymbolSequence {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, FullShift>) {
                return SymbolSequence(std::move(core), core_start, PeriodicTails{{0}, {0}}, kind.k, radius);
            } else if constexpr (std::is_same_v<T, Sft>) {
                return SymbolSequence(std::move(core), core_start, GraphPathTails{kind.adjacency, 0},
                                      kind.adjacency->size(), radius);
            } else if constexpr (std::is_same_v<T, Substitution>) {
                Word left(core.rbegin(), core.rend());
                Word right = core;
                return SymbolSequence(std::move(core), core_start, PeriodicTails{std::move(left), std::move(right)},
                                      sys.alphabet_size(), radius);
            } else {
                return SymbolSequence(std::move(core), core_start, DigitStream{sys.digit_bases()},
                                      sys.alphabet_size(), radius);
            }
        },
        sys.kind());
}

SymbolSequence periodic_point(const Word& period, int alphabet_size, int radius) {
    Word left(period.rbegin(), period.rend());
    return SymbolSequence(period, 0, PeriodicTails{std::move(left), period}, alphabet_size, radius);
}

SymbolSequence odometer_point(const CantorSystem& sys, const std::vector<int>& digits, int radius) {
    const auto bases = sys.digit_bases();
    if (digits.size() != bases.size())
        fail(ErrorKind::invalid_point, "odometer point needs exactly depth digits");
    if (static_cast<int>(bases.size()) > radius + 1)
        fail(ErrorKind::capacity, "window radius too small for odometer depth");
    for (std::size_t j = 0; j < bases.size(); ++j)
        if (digits[j] < 0 || digits[j] >= bases[j])
            fail(ErrorKind::invalid_point, "odometer digit " + std::to_string(j) + " exceeds its base");
    return SymbolSequence(digits, 0, DigitStream{bases}, sys.alphabet_size(), radius);
}

std::vector<int> odometer_digits(const SymbolSequence& c, const CantorSystem& sys) {
    const auto bases = sys.digit_bases();
    std::vector<int> out(bases.size());
    for (std::size_t j = 0; j < bases.size(); ++j) out[j] = c.symbol(static_cast<long>(j));
    return out;
}

SymbolSequence random_point(const CantorSystem& sys, std::uint64_t seed, int radius) {
    Rng rng(seed);
    // The explicit core spans twice the window so that shifts by up to W
    // stay inside sampled symbols.
    const long half = 2L * radius + 1;
    const auto len = static_cast<std::size_t>(2 * half + 1);
    return std::visit(
        [&](const auto& kind) -> SymbolSequence {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, FullShift>) {
                Word core(len);
                for (auto& s : core) s = uniform(rng, 0, kind.k - 1);
                return point_from_core(sys, std::move(core), -half, radius);
            } else if constexpr (std::is_same_v<T, Sft>) {
                const Adjacency& a = *kind.adjacency;
                Word core(len);
                core[0] = uniform(rng, 0, a.size() - 1);
                for (std::size_t i = 1; i < len; ++i) {
                    std::vector<int> succ;
                    for (int b = 0; b < a.size(); ++b)
                        if (a.allowed(core[i - 1], b)) succ.push_back(b);
                    core[i] = succ[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(succ.size()) - 1))];
                }
                return point_from_core(sys, std::move(core), -half, radius);
            } else if constexpr (std::is_same_v<T, Substitution>) {
                const Word& text = sys.substitution_word();
                const long n = static_cast<long>(text.size());
                const long need = static_cast<long>(len);
                if (n < need) fail(ErrorKind::capacity, "window radius too large for the substitution language word");
                const long start = uniform(rng, 0, static_cast<int>(n - need));
                Word core(text.begin() + start, text.begin() + start + need);
                return point_from_core(sys, std::move(core), -half, radius);
            } else {
                const auto bases = sys.digit_bases();
                std::vector<int> digits(bases.size());
                for (std::size_t j = 0; j < bases.size(); ++j) digits[j] = uniform(rng, 0, bases[j] - 1);
                return odometer_point(sys, digits, radius);
            }
        },
        sys.kind());
}

RecurrenceProfile recurrence_profile(const CantorSystem& sys, const SymbolSequence& c, int length, long horizon) {
    if (length < 1) fail(ErrorKind::domain, "word length must be >= 1");
    if (horizon < 1) fail(ErrorKind::domain, "horizon must be >= 1");

    std::vector<int> alphabets(static_cast<std::size_t>(length), sys.alphabet_size());
    if (sys.is_odometer()) {
        const auto bases = sys.digit_bases();
        if (length > static_cast<int>(bases.size())) fail(ErrorKind::domain, "word longer than odometer depth");
        std::copy(bases.begin(), bases.begin() + length, alphabets.begin());
    }

    std::map<Word, std::pair<long, long>> stats;  // word -> (last position, max gap)
    SymbolSequence x = c;
    for (long j = 0; j < horizon; ++j) {
        Word w(static_cast<std::size_t>(length));
        if (sys.is_odometer()) {
            for (int i = 0; i < length; ++i) w[static_cast<std::size_t>(i)] = x.symbol(i);
        } else {
            for (int i = 0; i < length; ++i) w[static_cast<std::size_t>(i)] = c.symbol(i - j);
        }
        auto [it, fresh] = stats.try_emplace(w, j, j + 1);
        if (!fresh) {
            it->second.second = std::max(it->second.second, j - it->second.first);
            it->second.first = j;
        }
        if (sys.is_odometer()) x = iterate(x, sys, -1);
    }

    RecurrenceProfile out;
    Word w(static_cast<std::size_t>(length), 0);
    for (;;) {
        auto it = stats.find(w);
        out[w] = it == stats.end() ? std::nullopt : std::optional<long>(it->second.second);
        int pos = 0;
        while (pos < length && ++w[static_cast<std::size_t>(pos)] == alphabets[static_cast<std::size_t>(pos)]) {
            w[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == length) break;
    }
    return out;
}

bool in_language(const CantorSystem& sys, const Word& w) {
    return std::visit(
        [&](const auto& kind) -> bool {
            using T = std::decay_t<decltype(kind)>;
            for (Symbol s : w)
                if (s < 0 || s >= sys.alphabet_size()) return false;
            if constexpr (std::is_same_v<T, FullShift>) {
                return true;
            } else if constexpr (std::is_same_v<T, Sft>) {
                for (std::size_t i = 0; i + 1 < w.size(); ++i)
                    if (!kind.adjacency->allowed(w[i], w[i + 1])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Substitution>) {
                return contains_factor(sys.substitution_word(), w);
            } else {
                const auto bases = sys.digit_bases();
                if (w.size() > bases.size()) return false;
                for (std::size_t j = 0; j < w.size(); ++j)
                    if (w[j] >= bases[j]) return false;
                return true;
            }
        },
        sys.kind());
}

std::optional<long> mixing_witness_symbolic(const CantorSystem& sys, const Word& u, const Word& v, long horizon) {
    if (u.empty() || v.empty()) fail(ErrorKind::domain, "cylinder words must be nonempty");
    if (!in_language(sys, u) || !in_language(sys, v)) return std::nullopt;

    if (sys.is_odometer()) {
        const auto bases = sys.digit_bases();
        const std::size_t L = std::max(u.size(), v.size());
        long mod_u = 1, mod_l = 1, value_u = 0;
        for (std::size_t j = 0; j < L; ++j) {
            if (j < u.size()) {
                value_u += u[j] * mod_u;
                mod_u *= bases[j];
            }
            mod_l *= bases[j];
        }
        for (long n = 1; n <= horizon; ++n) {
            for (long x = value_u; x < mod_l; x += mod_u) {
                long y = (x + n) % mod_l;
                bool ok = true;
                for (std::size_t j = 0; j < v.size() && ok; ++j) {
                    ok = (y % bases[j]) == v[j];
                    y /= bases[j];
                }
                if (ok) return n;
            }
        }
        return std::nullopt;
    }

    if (const auto* sub = std::get_if<Substitution>(&sys.kind())) {
        const std::size_t need = 64 * (static_cast<std::size_t>(horizon) + u.size() + v.size());
        Word scratch;
        const Word* text = &sys.substitution_word();
        if (text->size() < need) {
            scratch = substitute_until(sub->rules, need);
            text = &scratch;
        }
        const long n_text = static_cast<long>(text->size());
        std::vector<long> starts_u;
        std::vector<char> starts_v(static_cast<std::size_t>(n_text), 0);
        for (long p = 0; p + static_cast<long>(u.size()) <= n_text; ++p)
            if (std::equal(u.begin(), u.end(), text->begin() + p)) starts_u.push_back(p);
        for (long p = 0; p + static_cast<long>(v.size()) <= n_text; ++p)
            if (std::equal(v.begin(), v.end(), text->begin() + p)) starts_v[static_cast<std::size_t>(p)] = 1;
        for (long n = 1; n <= horizon; ++n)
            for (long p : starts_u)
                if (p + n < n_text && starts_v[static_cast<std::size_t>(p + n)]) return n;
        return std::nullopt;
    }

    // Full shifts and SFTs: glue u and v at offset n and test admissibility.
    for (long n = 1; n <= horizon; ++n) {
        const long lu = static_cast<long>(u.size());
        if (n < lu) {
            Word joined = u;
            bool consistent = true;
            for (std::size_t j = 0; j < v.size(); ++j) {
                const long pos = n + static_cast<long>(j);
                if (pos < lu) {
                    consistent = consistent && joined[static_cast<std::size_t>(pos)] == v[j];
                } else {
                    joined.push_back(v[j]);
                }
            }
            if (consistent && in_language(sys, joined)) return n;
            continue;
        }
        if (const auto* s = std::get_if<Sft>(&sys.kind())) {
            // Path of exactly n - |u| + 1 edges from u.back() to v.front().
            const Adjacency& a = *s->adjacency;
            const long steps = n - lu + 1;
            std::vector<char> reach(static_cast<std::size_t>(a.size()), 0);
            reach[static_cast<std::size_t>(u.back())] = 1;
            for (long e = 0; e < steps; ++e) {
                std::vector<char> next(reach.size(), 0);
                for (int i = 0; i < a.size(); ++i)
                    if (reach[static_cast<std::size_t>(i)])
                        for (int j = 0; j < a.size(); ++j)
                            if (a.allowed(i, j)) next[static_cast<std::size_t>(j)] = 1;
                reach = std::move(next);
            }
            if (reach[static_cast<std::size_t>(v.front())]) return n;
        } else {
            return n;
        }
    }
    return std::nullopt;
}

}  // namespace psusp::cantor
