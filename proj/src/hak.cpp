#include "psusp/hak.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "psusp/error.hpp"

namespace psusp::hak {

using annulus::Band;
using annulus::LiftedAnnulusMap;
using annulus::PiecewiseLinear;
using annulus::StripPoint;

namespace {

constexpr double kEqualityTol = 1e-9;

std::string stage_key(int n, const std::string& key) { return "stage " + std::to_string(n) + " " + key; }

Band collar_of(const std::vector<HakStage>& stages, int n) {
    const HakStage& s = stages[static_cast<std::size_t>(n - 1)];
    if (s.collar) return *s.collar;
    if (n == 1) return {0.0, 1.0};
    return stages[static_cast<std::size_t>(n - 2)].band;
}

Band previous_band(const std::vector<HakStage>& stages, int n) {
    if (n == 1) return {0.0, 1.0};
    return stages[static_cast<std::size_t>(n - 2)].band;
}

bool in_band(double t, Band b) { return t >= b.lo - 1e-15 && t <= b.hi + 1e-15; }

double band_excess(double t, Band b) { return std::max({0.0, b.lo - t, t - b.hi}); }

std::vector<StripPoint> grid_points(int G, Band band) {
    std::vector<StripPoint> pts;
    pts.reserve(static_cast<std::size_t>(G * G));
    for (int i = 0; i < G; ++i) {
        const double t = G == 1 ? 0.5 * (band.lo + band.hi) : band.lo + (band.hi - band.lo) * i / (G - 1);
        for (int j = 0; j < G; ++j) pts.push_back({t, static_cast<double>(j) / G});
    }
    return pts;
}

StripPoint rotate(StripPoint p, double a) { return {p.t, p.r + a}; }

// Boundary samples of D_n^j = f_n^{-1}(R_n^j(D_n)).
std::vector<StripPoint> box_outline(const HakStage& s, long j, int per_side) {
    const double shift = static_cast<double>(j) * s.alpha();
    std::vector<StripPoint> pts;
    for (int k = 0; k <= per_side; ++k) {
        const double u = static_cast<double>(k) / per_side;
        pts.push_back(chart_inverse(s, {u, shift}));
        pts.push_back(chart_inverse(s, {u, shift + s.box_height}));
        pts.push_back(chart_inverse(s, {0.0, shift + u * s.box_height}));
        pts.push_back(chart_inverse(s, {1.0, shift + u * s.box_height}));
    }
    return pts;
}

double diameter(const std::vector<StripPoint>& pts) {
    double d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, annulus::annulus_distance(pts[a], pts[b]));
    return d;
}

std::vector<long> sampled_indices(long p, int cap) {
    std::vector<long> out;
    if (p <= cap) {
        for (long j = 0; j < p; ++j) out.push_back(j);
    } else {
        for (int k = 0; k < cap; ++k) out.push_back(static_cast<long>(k) * p / cap);
    }
    return out;
}

double wrap01(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

bool HakReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const HakCheck& c) { return c.pass; });
}

std::set<std::string> HakReport::failed_conditions() const {
    std::set<std::string> out;
    for (const auto& c : checks)
        if (!c.pass) out.insert(c.condition);
    return out;
}

std::vector<HakStage> normalize_stages(std::vector<HakStage> stages, double tail_bound) {
    if (stages.size() < 2) fail(ErrorKind::config, "stage: at least 2 stages are required");
    double eps_sum = 0.0;
    Band outer{0.0, 1.0};
    for (std::size_t i = 0; i < stages.size(); ++i) {
        HakStage& s = stages[i];
        const int n = static_cast<int>(i + 1);
        if (!(s.eps > 0.0)) fail(ErrorKind::config, stage_key(n, "eps: must be positive"));
        if (s.rot_den <= 0) fail(ErrorKind::config, stage_key(n, "rot: denominator must be positive"));
        const long g = std::gcd(s.rot_num, s.rot_den);
        s.rot_num /= g;
        s.rot_den /= g;
        if (s.q < 1 || s.q % s.rot_den != 0)
            fail(ErrorKind::config, stage_key(n, "q: q_n must be a positive multiple of the period p_n (condition (6))"));
        if (!(s.box_height > 0.0)) fail(ErrorKind::config, stage_key(n, "alpha: box height must be positive"));
        if (!(s.band.lo < s.band.hi)) fail(ErrorKind::config, stage_key(n, "band: empty band"));
        if (!(s.band.lo > outer.lo && s.band.hi < outer.hi))
            fail(ErrorKind::config, stage_key(n, "band: bands must be strictly nested"));
        if (s.collar) {
            const Band c = *s.collar;
            if (!(c.lo >= 0.0 && c.hi <= 1.0 && c.lo < s.band.lo && c.hi > s.band.hi))
                fail(ErrorKind::config, stage_key(n, "collar: must strictly contain the band inside [0,1]"));
        }
        outer = s.band;
        eps_sum += s.eps;
    }
    if (tail_bound < eps_sum)
        fail(ErrorKind::config, "experiment tail_bound: gamma_1 must be at least the sum of eps_n");
    return stages;
}

StripPoint chart(const HakStage& s, StripPoint x) {
    const double w = s.band.hi - s.band.lo;
    const double u = (x.t - s.band.lo) / w;
    return {u, x.r + s.chart_twist(u)};
}

StripPoint chart_inverse(const HakStage& s, StripPoint y) {
    const double w = s.band.hi - s.band.lo;
    return {s.band.lo + w * y.t, y.r - s.chart_twist(y.t)};
}

double chart_inverse_lipschitz(const HakStage& s) {
    return std::max(1.0, (s.band.hi - s.band.lo) + s.chart_twist.lipschitz());
}

LiftedAnnulusMap correction_map(const std::vector<HakStage>& stages, int n) {
    const HakStage& s = stages[static_cast<std::size_t>(n - 1)];
    const double theta = s.alpha() - (n > 1 ? stages[static_cast<std::size_t>(n - 2)].alpha() : 0.0);
    const Band c = collar_of(stages, n);
    std::vector<std::pair<double, double>> knots;
    if (c.lo > 0.0) knots.emplace_back(0.0, 0.0);
    knots.emplace_back(c.lo, 0.0);
    knots.emplace_back(s.band.lo, theta);
    knots.emplace_back(s.band.hi, theta);
    knots.emplace_back(c.hi, 0.0);
    if (c.hi < 1.0) knots.emplace_back(1.0, 0.0);
    return LiftedAnnulusMap::twist(PiecewiseLinear(std::move(knots)));
}

LiftedAnnulusMap truncated_map(const std::vector<HakStage>& stages, int n) {
    LiftedAnnulusMap h = LiftedAnnulusMap::identity();
    for (int k = 1; k <= n; ++k) h = h.then(correction_map(stages, k));
    return h;
}

HakReport hak_verify(std::vector<HakStage> stages, const HakOptions& opt) {
    stages = normalize_stages(std::move(stages), opt.tail_bound);
    const int N = static_cast<int>(stages.size());
    const int G = std::max(opt.grid, 2);
    const int OG = std::max(opt.orbit_grid, 2);
    HakReport rep;

    auto add = [&](const std::string& cond, int n, double measured, double threshold, double slack,
                   std::string note = {}) {
        HakCheck c;
        c.condition = cond;
        c.stage = n;
        c.measured = measured;
        c.threshold = threshold;
        c.pass = measured < threshold - slack || (slack == 0.0 && measured <= threshold);
        c.note = std::move(note);
        rep.checks.push_back(std::move(c));
    };

    double partial = 0.0;
    for (int n = 1; n <= N; ++n) {
        rep.gamma.push_back(opt.tail_bound - partial);
        partial += stages[static_cast<std::size_t>(n - 1)].eps;
    }

    std::vector<LiftedAnnulusMap> g, H, Hinv;
    for (int n = 1; n <= N; ++n) {
        g.push_back(correction_map(stages, n));
        H.push_back(truncated_map(stages, n));
        Hinv.push_back(H.back().inverse());
    }
    const auto full = grid_points(G, {0.0, 1.0});

    for (int n = 1; n <= N; ++n) {
        const HakStage& s = stages[static_cast<std::size_t>(n - 1)];
        const LiftedAnnulusMap& gn = g[static_cast<std::size_t>(n - 1)];
        const LiftedAnnulusMap& Hn = H[static_cast<std::size_t>(n - 1)];

        // (1) fibers f_n^{-1}([0,1] x {a}) are small.
        {
            double worst = 0.0;
            for (int j = 0; j < G; ++j) {
                const double a = static_cast<double>(j) / G;
                std::vector<StripPoint> fiber;
                for (int i = 0; i < G; ++i) fiber.push_back(chart_inverse(s, {static_cast<double>(i) / (G - 1), a}));
                worst = std::max(worst, diameter(fiber));
            }
            add("(1)", n, worst, s.eps / 2.0, opt.slack, "fiber diameter vs eps_n/2");
        }

        // (2) box height below delta_n, boxes tile, periods nondecreasing.
        {
            const double delta = (s.eps / 4.0) / chart_inverse_lipschitz(s);
            const double tiling = std::abs(s.box_height * static_cast<double>(s.rot_den) - 1.0);
            const bool periods_ok =
                n == 1 || s.rot_den >= stages[static_cast<std::size_t>(n - 2)].rot_den;
            add("(2)", n, s.box_height, delta, opt.slack, "box height vs delta_n");
            add("(2)", n, tiling, kEqualityTol, 0.0, "rotated boxes tile the annulus (alpha_n * p_n = 1)");
            add("(2)", n, periods_ok ? 0.0 : 1.0, 0.5, 0.0, "p_{n+1} >= p_n");
        }

        // (3) g_n is small, is the identity off A_{n-1}, and H_n is conjugate to R_n on A_n.
        {
            double sup = 0.0;
            const LiftedAnnulusMap ginv = gn.inverse();
            for (const auto& x : full)
                sup = std::max({sup, annulus::annulus_distance(gn.apply(x), x),
                                annulus::annulus_distance(ginv.apply(x), x)});
            add("(3)", n, sup, s.eps, opt.slack, "rho(g_n, id) vs eps_n");

            double off = 0.0;
            if (n > 1) {
                const Band prev = previous_band(stages, n);
                auto probe = full;
                for (double t : {prev.lo - 1e-6, prev.hi + 1e-6})
                    for (int j = 0; j < G; ++j) probe.push_back({t, static_cast<double>(j) / G});
                for (const auto& x : probe)
                    if (!in_band(x.t, prev)) off = std::max(off, annulus::annulus_distance(gn.apply(x), x));
            }
            add("(3)", n, off, kEqualityTol, 0.0, "g_n is the identity off A_{n-1}");

            double conj = 0.0;
            for (const auto& x : grid_points(G, s.band)) {
                const StripPoint target = chart_inverse(s, rotate(chart(s, x), s.alpha()));
                conj = std::max(conj, annulus::annulus_distance(Hn.apply(x), target));
            }
            add("(3)", n, conj, kEqualityTol, 0.0, "H_n = f_n^{-1} R_n f_n on A_n");
        }

        // (4) H_n = g_n o H_{n-1}.
        {
            double d = 0.0;
            for (const auto& x : full) {
                const StripPoint prev = n > 1 ? H[static_cast<std::size_t>(n - 2)].apply(x) : x;
                d = std::max(d, annulus::annulus_distance(Hn.apply(x), gn.apply(prev)));
            }
            add("(4)", n, d, kEqualityTol, 0.0, "H_n = g_n o H_{n-1}");
        }

        // (5) H_n(A_{n+1}) = A_{n+1}.
        if (n < N) {
            const Band next = stages[static_cast<std::size_t>(n)].band;
            double excess = 0.0;
            const LiftedAnnulusMap& Hi = Hinv[static_cast<std::size_t>(n - 1)];
            for (const auto& x : grid_points(G, next)) {
                excess = std::max({excess, band_excess(Hn.apply(x).t, next), band_excess(Hi.apply(x).t, next)});
            }
            add("(5)", n, excess, kEqualityTol, 0.0, "H_n and H_n^{-1} keep A_{n+1}");
        }

        // (6) rho(H_n^i, H_{n+1}^i) < eps_n for i <= q_n.
        if (n < N) {
            const LiftedAnnulusMap& Hn1 = H[static_cast<std::size_t>(n)];
            const long steps = std::min(s.q, opt.horizon);
            double worst = 0.0;
            for (const auto& x0 : full) {
                auto a = annulus::LiftPoint::from(x0), b = a;
                for (long i = 1; i <= steps; ++i) {
                    a = Hn.advance(a);
                    b = Hn1.advance(b);
                    worst = std::max(worst, annulus::annulus_distance({a.t, a.frac}, {b.t, b.frac}));
                }
            }
            std::ostringstream note;
            note << "sup over i <= " << steps << (steps < s.q ? " (horizon-capped)" : "");
            add("(6)", n, worst, s.eps, opt.slack, note.str());
        }

        // (7) diam D_n^j < eps_n.
        {
            double worst = 0.0;
            for (long j : sampled_indices(s.rot_den, opt.max_boxes)) worst = std::max(worst, diameter(box_outline(s, j, 8)));
            add("(7)", n, worst, s.eps, opt.slack, "largest box diameter");
        }
    }

    // (8) orbits of H = H_N shadow the box permutation within gamma_n.
    const LiftedAnnulusMap& HN = H.back();
    for (int n = 1; n <= N; ++n) {
        const HakStage& s = stages[static_cast<std::size_t>(n - 1)];
        const double gamma = rep.gamma[static_cast<std::size_t>(n - 1)];
        const long steps = std::min(s.q, opt.horizon);
        double worst = 0.0;
        for (long j : sampled_indices(s.rot_den, OG)) {
            for (double su : {0.25, 0.5, 0.75})
                for (double sa : {0.25, 0.5, 0.75}) {
                    const StripPoint x = chart_inverse(s, {su, static_cast<double>(j) * s.alpha() + sa * s.box_height});
                    auto y = annulus::LiftPoint::from(x);
                    for (long i = 0; i <= steps; ++i) {
                        if (i > 0) y = HN.advance(y);
                        const long k = (i + j) % s.rot_den;
                        double dist = 0.0;
                        bool member = false;
                        if (in_band(y.t, s.band)) {
                            const StripPoint c = chart(s, {y.t, y.frac});
                            const double rel = wrap01(c.r - static_cast<double>(k) * s.alpha());
                            member = rel <= s.box_height || rel >= 1.0 - 1e-12;
                        }
                        if (!member) {
                            dist = 1e9;
                            for (const auto& b : box_outline(s, k, 16))
                                dist = std::min(dist, annulus::annulus_distance({y.t, y.frac}, b));
                        }
                        worst = std::max(worst, dist);
                    }
                }
        }
        add("(8)", n, worst, gamma, opt.slack, "distance of H^i(x) from D_n^{(i+j) mod p_n}");
    }

    // Rigidity at the truncation: d(H_N^{p_n}(x), x) < gamma_n on A_N.
    for (int n = 1; n <= N; ++n) {
        const HakStage& s = stages[static_cast<std::size_t>(n - 1)];
        const double gamma = rep.gamma[static_cast<std::size_t>(n - 1)];
        double worst = 0.0;
        for (const auto& x : grid_points(OG, stages.back().band)) {
            auto y = annulus::LiftPoint::from(x);
            for (long i = 0; i < s.rot_den; ++i) y = HN.advance(y);
            worst = std::max(worst, annulus::annulus_distance({y.t, y.frac}, x));
        }
        add("rigidity", n, worst, gamma, opt.slack, "sup d(H_N^{p_n}(x), x) on A_N");
    }
    return rep;
}

}  // namespace psusp::hak
