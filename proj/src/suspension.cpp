#include "psusp/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "psusp/error.hpp"
#include "psusp/sampling.hpp"

namespace psusp::suspension {

using annulus::LiftPoint;
using annulus::StripPoint;

SuspensionSystem::SuspensionSystem(LiftedAnnulusMap map, CantorSystem h, int window)
    : map_(std::move(map)), h_(std::move(h)), window_(window) {
    if (window < 1) fail(ErrorKind::config, "experiment.window: must be >= 1");
}

int SuspensionSystem::register_seed(SymbolSequence c) {
    cantor::validate(c, h_);
    seeds_.push_back(std::move(c));
    return static_cast<int>(seeds_.size()) - 1;
}

const SymbolSequence& SuspensionSystem::seed(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= seeds_.size())
        fail(ErrorKind::domain, "unknown component id " + std::to_string(id));
    return seeds_[static_cast<std::size_t>(id)];
}

SuspensionPoint SuspensionSystem::seed_point(int id, double t, double r) const {
    return normalize(*this, t, r, seed(id), id, 0);
}

SuspensionPoint normalize(const SuspensionSystem& sys, double t, double r, const SymbolSequence& c, int component,
                          long winding) {
    if (!(t >= -1e-12 && t <= 1.0 + 1e-12)) fail(ErrorKind::domain, "radial coordinate outside [0,1]");
    const double fl = std::floor(r);
    long k = static_cast<long>(fl);
    double frac = r - fl;
    if (frac >= 1.0) {
        frac = 0.0;
        ++k;
    }
    SuspensionPoint p{std::clamp(t, 0.0, 1.0), frac, k == 0 ? c : cantor::iterate(c, sys.cantor(), k), component,
                      winding + k};
    return p;
}

SuspensionPoint step(const SuspensionSystem& sys, const SuspensionPoint& p) {
    const StripPoint img = sys.map().apply(StripPoint{p.t, p.r});
    return normalize(sys, img.t, img.r, p.c, p.component, p.winding);
}

void check_capacity(const SuspensionSystem& sys, const SuspensionPoint& p) {
    if (sys.cantor().is_odometer()) return;
    if (std::labs(p.winding) > sys.window())
        fail(ErrorKind::capacity, "winding " + std::to_string(p.winding) + " exceeds window radius " +
                                      std::to_string(sys.window()) + "; increase experiment.window");
}

double quotient_distance(const SuspensionSystem& sys, const SuspensionPoint& p, const SuspensionPoint& q) {
    double best = std::numeric_limits<double>::infinity();
    for (int n = -1; n <= 1; ++n) {
        const double strip = annulus::strip_distance({p.t, p.r}, {q.t, q.r + n});
        if (strip >= best) continue;
        const SymbolSequence qc = n == 0 ? q.c : cantor::iterate(q.c, sys.cantor(), -n);
        best = std::min(best, std::max(strip, cantor::cantor_metric(p.c, qc, sys.window())));
    }
    return best;
}

// --- dense orbits -----------------------------------------------------------

std::optional<DenseOrbitWitness> dense_orbit_check(const SuspensionSystem& sys, const SymbolSequence& c,
                                                   StripPoint x, double eps, DenseOrbitBounds bounds) {
    const int d = cantor::agreement_depth(eps);
    const auto net = sampling::central_words(sys.cantor(), d);
    if (net.empty()) return std::nullopt;
    const std::set<cantor::Word> wanted(net.begin(), net.end());

    for (long k = 1; k <= bounds.max_k; ++k) {
        // Smallest p such that h^{-ik}(c), i = 0..p, meets every net cylinder.
        std::set<cantor::Word> seen;
        std::optional<long> p_found;
        SymbolSequence y = c;
        for (long i = 0; i <= bounds.max_p; ++i) {
            if (i > 0) y = cantor::iterate(y, sys.cantor(), -k);
            auto w = sampling::central_block(y, d);
            if (wanted.count(w)) seen.insert(std::move(w));
            if (seen.size() == wanted.size()) {
                p_found = i;
                break;
            }
        }
        if (!p_found) continue;
        const long p = *p_found;

        for (long s = 1; s <= bounds.max_s; ++s) {
            LiftPoint z = LiftPoint::from(x);
            const LiftPoint z0 = z;
            bool ok = true;
            for (long j = 1; j <= p && ok; ++j) {
                for (long a = 0; a < s; ++a) z = sys.map().advance(z);
                const double dr = static_cast<double>(z.turns - z0.turns - k * j) + (z.frac - z0.frac);
                ok = std::abs(z.t - z0.t) + std::abs(dr) <= eps;
            }
            if (ok) return DenseOrbitWitness{k, s, p};
        }
    }
    return std::nullopt;
}

// --- weak mixing ------------------------------------------------------------

std::optional<long> weak_mixing_witness(const SuspensionSystem& sys, const Ball& u, const Ball& v, long horizon,
                                        std::uint64_t seed, int cloud) {
    if (!(u.radius > 0.0) || !(v.radius > 0.0)) fail(ErrorKind::config, "ball radius must be positive");
    cloud = std::max(cloud, 64);
    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> jitter(-u.radius / 4.0, u.radius / 4.0);
    const int m = sampling::strict_depth(u.radius);

    std::vector<SuspensionPoint> pts;
    for (int k = 0; k < cloud; ++k) {
        const double t = std::clamp(u.center.t + jitter(rng), 0.0, 1.0);
        const double r = u.center.r + jitter(rng);
        const SymbolSequence c = sampling::sample_cylinder(sys.cantor(), u.center.c, m, 2 * sys.window() + 1, rng);
        SuspensionPoint p = normalize(sys, t, r, c, -1, 0);
        if (quotient_distance(sys, p, u.center) < u.radius) pts.push_back(std::move(p));
    }
    if (pts.empty()) fail(ErrorKind::config, "seeded cloud in U is empty; radius is degenerate");

    for (long l = 1; l <= horizon; ++l) {
        bool back_in_u = false, in_v = false;
        for (auto& p : pts) {
            p = step(sys, p);
            check_capacity(sys, p);
            back_in_u = back_in_u || quotient_distance(sys, p, u.center) < u.radius;
            in_v = in_v || quotient_distance(sys, p, v.center) < v.radius;
        }
        if (back_in_u && in_v) return l;
    }
    return std::nullopt;
}

// --- entropy ----------------------------------------------------------------

namespace {

// Annulus orbit and Cantor central blocks of one sample point.
struct Sample {
    std::vector<double> t, r;
    std::vector<long> w;
    // blocks[s - shift_lo] is the central block of h^s(c), flattened.
    std::vector<cantor::Symbol> blocks;
    long shift_lo = 0;
};

struct Orbit {
    std::vector<double> t, r;
    std::vector<long> w;
};

Orbit annulus_orbit(const LiftedAnnulusMap& map, StripPoint x, int n) {
    Orbit o;
    LiftPoint z = LiftPoint::from(x);
    const long base = z.turns;
    for (int i = 0; i < n; ++i) {
        if (i > 0) z = map.advance(z);
        o.t.push_back(z.t);
        o.r.push_back(z.frac);
        o.w.push_back(z.turns - base);
    }
    return o;
}

Sample make_sample(const SuspensionSystem& sys, const Orbit& o, const SymbolSequence& c, int m) {
    Sample s{o.t, o.r, o.w, {}, 0};
    const auto [lo, hi] = std::minmax_element(o.w.begin(), o.w.end());
    s.shift_lo = *lo - 1;
    const long shift_hi = *hi + 1;
    const int width = 2 * m - 1;
    s.blocks.reserve(static_cast<std::size_t>((shift_hi - s.shift_lo + 1) * width));
    if (sys.cantor().is_odometer()) {
        for (long sh = s.shift_lo; sh <= shift_hi; ++sh) {
            const auto y = cantor::iterate(c, sys.cantor(), sh);
            for (int j = -(m - 1); j <= m - 1; ++j) s.blocks.push_back(y.symbol(j));
        }
    } else {
        for (long sh = s.shift_lo; sh <= shift_hi; ++sh)
            for (int j = -(m - 1); j <= m - 1; ++j) s.blocks.push_back(c.symbol(sh + j));
    }
    return s;
}

bool same_block(const Sample& a, long sa, const Sample& b, long sb, int width) {
    const auto* pa = a.blocks.data() + (sa - a.shift_lo) * width;
    const auto* pb = b.blocks.data() + (sb - b.shift_lo) * width;
    return std::equal(pa, pa + width, pb);
}

// Bowen distance over the first `horizon` steps is <= radius.
bool bowen_close(const Sample& a, const Sample& b, int horizon, double radius, int width) {
    for (int i = 0; i < horizon; ++i) {
        bool close = false;
        for (int n = -1; n <= 1 && !close; ++n) {
            const double strip = std::abs(a.t[static_cast<std::size_t>(i)] - b.t[static_cast<std::size_t>(i)]) +
                                 std::abs(a.r[static_cast<std::size_t>(i)] - b.r[static_cast<std::size_t>(i)] - n);
            if (strip > radius) continue;
            close = same_block(a, a.w[static_cast<std::size_t>(i)], b, b.w[static_cast<std::size_t>(i)] - n, width);
        }
        if (!close) return false;
    }
    return true;
}

long greedy_count(const std::vector<Sample>& pts, int horizon, double radius, int width) {
    std::vector<const Sample*> centers;
    for (const auto& p : pts) {
        bool covered = false;
        for (const Sample* c : centers)
            if (bowen_close(p, *c, horizon, radius, width)) {
                covered = true;
                break;
            }
        if (!covered) centers.push_back(&p);
    }
    return static_cast<long>(centers.size());
}

// Points sharing the anchor's central block, with every admissible
// continuation along the index range the orbit windings expose.
std::vector<Sample> anchor_cloud(const SuspensionSystem& sys, const SymbolSequence& anchor_c, StripPoint anchor,
                                 double jitter, int m, int n, long cap, boost::random::mt19937_64& rng) {
    boost::random::uniform_real_distribution<double> jit(-jitter, jitter);
    std::vector<Orbit> orbits;
    // Annulus jitter first, so the index range covers every copy's winding.
    const long copies = std::max<long>(cap, 1);
    long w_lo = 0, w_hi = 0;
    const Orbit center = annulus_orbit(sys.map(), anchor, n);
    auto track = [&](const Orbit& o) {
        for (long w : o.w) {
            w_lo = std::min(w_lo, w);
            w_hi = std::max(w_hi, w);
        }
    };
    track(center);
    if (jitter > 0.0) {
        for (long k = 0; k < copies; ++k) {
            const StripPoint x{std::clamp(anchor.t + jit(rng), 0.0, 1.0), anchor.r + jit(rng)};
            orbits.push_back(annulus_orbit(sys.map(), x, n));
            track(orbits.back());
        }
    }
    if (!sys.cantor().is_odometer() && std::max(-w_lo, w_hi) > sys.window())
        fail(ErrorKind::capacity, "orbit winding exceeds window radius " + std::to_string(sys.window()) +
                                      "; increase experiment.window");

    const auto words = sampling::continuations(sys.cantor(), anchor_c, m, w_lo, w_hi, cap, rng);
    std::vector<Sample> out;
    out.reserve(words.size());
    for (std::size_t k = 0; k < words.size(); ++k) {
        const Orbit& o = jitter > 0.0 ? orbits[k % orbits.size()] : center;
        out.push_back(make_sample(sys, o, words[k], m));
    }
    return out;
}

}  // namespace

EntropyBracket entropy_bracket(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed) {
    if (n < 2) fail(ErrorKind::domain, "entropy horizon n must be >= 2");
    if (!(eps > 0.0) || eps < std::ldexp(1.0, -sys.window() + 2))
        fail(ErrorKind::domain, "eps must be at least 2^(-W+2)");
    if (budget < 1) fail(ErrorKind::domain, "budget must be positive");

    constexpr int t_strata = 2;
    constexpr int r_strata = 4;
    const int anchors = static_cast<int>(std::min<long>(t_strata * r_strata, budget));
    const long per_anchor = std::max<long>(1, budget / anchors);

    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    const int m_sep = cantor::agreement_depth(eps);
    const int m_span = cantor::agreement_depth(eps / 2.0);

    EntropyBracket out;
    out.anchors = anchors;
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = -std::numeric_limits<double>::infinity();
    const double scale = 1.0 / static_cast<double>(n - 1);

    for (int a = 0; a < anchors; ++a) {
        const int ti = a / r_strata, ri = a % r_strata;
        const double t = (ti + unit(rng)) / t_strata;
        const double r = eps + (1.0 - 2.0 * eps) * (ri + unit(rng)) / r_strata;
        const SymbolSequence c = cantor::random_point(sys.cantor(), rng(), sys.window());

        const auto sep = anchor_cloud(sys, c, {t, r}, 0.0, m_sep, n, per_anchor, rng);
        const long s1 = greedy_count(sep, 1, eps, 2 * m_sep - 1);
        const long sn = greedy_count(sep, n, eps, 2 * m_sep - 1);

        const auto span = anchor_cloud(sys, c, {t, r}, eps / 8.0, m_span, n, per_anchor, rng);
        const long r1 = greedy_count(span, 1, eps / 2.0, 2 * m_span - 1);
        const long rn = greedy_count(span, n, eps / 2.0, 2 * m_span - 1);

        out.separated += sn;
        out.spanning += rn;
        out.lower = std::min(out.lower, scale * std::log(static_cast<double>(sn) / static_cast<double>(s1)));
        out.upper = std::max(out.upper, scale * std::log(static_cast<double>(rn) / static_cast<double>(r1)));
    }
    out.lower = std::max(out.lower, 0.0);
    out.upper = std::max(out.upper, 0.0);
    return out;
}

double entropy_separated(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed) {
    return entropy_bracket(sys, eps, n, budget, seed).lower;
}

double entropy_spanning(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed) {
    return entropy_bracket(sys, eps, n, budget, seed).upper;
}

std::vector<ProductRow> product_formula_report(const SuspensionSystem& sys, double alpha,
                                               const std::vector<double>& eps_list, const std::vector<int>& n_list,
                                               long budget, std::uint64_t seed) {
    const double h = cantor::entropy_exact(sys.cantor()).value;
    std::vector<ProductRow> rows;
    for (double eps : eps_list)
        for (int n : n_list) {
            const auto b = entropy_bracket(sys, eps, n, budget, seed);
            rows.push_back({eps, n, budget, b.lower, b.upper, std::abs(alpha) * h, alpha, h});
        }
    return rows;
}

std::vector<std::pair<long, double>> winding_rate(const SuspensionSystem& sys, const SuspensionPoint& p0, long n) {
    if (n < 1) fail(ErrorKind::domain, "n must be >= 1");
    std::vector<std::pair<long, double>> out;
    out.reserve(static_cast<std::size_t>(n));
    // Only the winding is needed, so the Cantor coordinate is left frozen.
    LiftPoint z{p0.t, 0, p0.r};
    for (long k = 1; k <= n; ++k) {
        z = sys.map().advance(z);
        out.emplace_back(k, static_cast<double>(z.turns) / static_cast<double>(k));
    }
    return out;
}

std::vector<long> rigidity_suspension(const SuspensionSystem& sys, int grid, long horizon, double eps,
                                      std::uint64_t seed, int cantor_samples) {
    if (grid < 1) fail(ErrorKind::domain, "grid must be >= 1");
    boost::random::mt19937_64 rng(seed);
    std::vector<SuspensionPoint> start;
    for (int k = 0; k < cantor_samples; ++k) {
        const SymbolSequence c = cantor::random_point(sys.cantor(), rng(), sys.window());
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                const double t = grid == 1 ? 0.5 : static_cast<double>(i) / (grid - 1);
                start.push_back(normalize(sys, t, static_cast<double>(j) / grid, c, -1, 0));
            }
    }
    std::vector<SuspensionPoint> cur = start;
    std::vector<long> hits;
    for (long n = 1; n <= horizon; ++n) {
        double sup = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k) {
            cur[k] = step(sys, cur[k]);
            check_capacity(sys, cur[k]);
            if (sup < eps) sup = std::max(sup, quotient_distance(sys, cur[k], start[k]));
        }
        if (sup < eps) hits.push_back(n);
    }
    return hits;
}

}  // namespace psusp::suspension
