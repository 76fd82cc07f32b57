#include "psusp/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "psusp/error.hpp"

namespace psusp::annulus {

namespace {

constexpr double kTol = 1e-12;

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

void check_t(double t) {
    if (!(t >= -kTol && t <= 1.0 + kTol))
        fail(ErrorKind::domain, "radial coordinate " + std::to_string(t) + " outside [0,1]");
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (boost::algorithm::trim_copy(s.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::config, what + ": cannot parse number '" + s + "'");
}

double grid_lookup(const GridSampled& g, const std::vector<double>& table, double t, double f) {
    const double x = t * (g.nt - 1);
    int i = std::min(static_cast<int>(x), g.nt - 2);
    i = std::max(i, 0);
    const double ax = x - i;
    const double y = f * g.nr;
    int j = static_cast<int>(std::floor(y));
    const double ay = y - j;
    j = ((j % g.nr) + g.nr) % g.nr;
    const int j1 = (j + 1) % g.nr;
    auto at = [&](int ii, int jj) { return table[static_cast<std::size_t>(ii * g.nr + jj)]; };
    return (1 - ax) * ((1 - ay) * at(i, j) + ay * at(i, j1)) + ax * ((1 - ay) * at(i + 1, j) + ay * at(i + 1, j1));
}

// Apply one primitive to (t, f) where f is any real; the integer part of f
// never influences the result beyond translation.
void apply_primitive(const Primitive& prim, double& t, double& f) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RigidRotation>) {
                f += p.beta;
            } else if constexpr (std::is_same_v<T, Twist>) {
                f += p.profile(t);
            } else if constexpr (std::is_same_v<T, RadialReparam>) {
                t = clamp01(p.phi(t));
            } else {
                check_t(t);
                const double tc = clamp01(t);
                const double frac = f - std::floor(f);
                const double dt = grid_lookup(p, p.dt, tc, frac);
                const double dr = grid_lookup(p, p.dr, tc, frac);
                t = clamp01(tc + dt);
                f += dr;
            }
        },
        prim);
}

std::string pl_text(const PiecewiseLinear& pl) {
    std::ostringstream os;
    const auto& k = pl.knots();
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? ";" : "") << k[i].first << "," << k[i].second;
    return os.str();
}

std::string primitive_label(const Primitive& prim) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            std::ostringstream os;
            if constexpr (std::is_same_v<T, RigidRotation>) {
                os << "rotation:" << p.beta;
            } else if constexpr (std::is_same_v<T, Twist>) {
                os << "twist:" << pl_text(p.profile);
            } else if constexpr (std::is_same_v<T, RadialReparam>) {
                os << "reparam:" << pl_text(p.phi);
            } else {
                os << "grid:" << p.nt << "x" << p.nr;
            }
            return os.str();
        },
        prim);
}

std::string pipeline_label(const std::vector<Primitive>& pipeline) {
    if (pipeline.empty()) return "identity";
    std::string s;
    for (std::size_t i = 0; i < pipeline.size(); ++i) s += (i ? " | " : "") + primitive_label(pipeline[i]);
    return s;
}

}  // namespace

LiftPoint LiftPoint::from(StripPoint p) {
    const double fl = std::floor(p.r);
    return {p.t, static_cast<long>(fl), p.r - fl};
}

// --- PiecewiseLinear -------------------------------------------------------

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) fail(ErrorKind::config, "piecewise-linear function needs at least one knot");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i].first > knots_[i - 1].first))
            fail(ErrorKind::config, "piecewise-linear knots must have strictly increasing abscissae");
}

PiecewiseLinear PiecewiseLinear::parse(const std::string& text) {
    std::vector<std::string> pairs;
    boost::algorithm::split(pairs, text, boost::algorithm::is_any_of(";"));
    std::vector<std::pair<double, double>> knots;
    for (auto& p : pairs) {
        boost::algorithm::trim(p);
        if (p.empty()) continue;
        std::vector<std::string> xy;
        boost::algorithm::split(xy, p, boost::algorithm::is_any_of(","));
        if (xy.size() != 2) fail(ErrorKind::config, "knot '" + p + "' is not of the form x,y");
        knots.emplace_back(parse_double(xy[0], "knot"), parse_double(xy[1], "knot"));
    }
    return PiecewiseLinear(std::move(knots));
}

PiecewiseLinear PiecewiseLinear::constant(double value) { return PiecewiseLinear({{0.0, value}, {1.0, value}}); }

double PiecewiseLinear::operator()(double x) const {
    if (x <= knots_.front().first) return knots_.front().second;
    if (x >= knots_.back().first) return knots_.back().second;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

bool PiecewiseLinear::strictly_increasing() const {
    if (knots_.size() < 2) return false;
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i].second > knots_[i - 1].second)) return false;
    return true;
}

PiecewiseLinear PiecewiseLinear::inverse() const {
    if (!strictly_increasing())
        fail(ErrorKind::unsupported_conjugacy, "piecewise-linear function is not invertible");
    std::vector<std::pair<double, double>> inv;
    inv.reserve(knots_.size());
    for (const auto& [x, y] : knots_) inv.emplace_back(y, x);
    return PiecewiseLinear(std::move(inv));
}

PiecewiseLinear PiecewiseLinear::scaled(double factor) const {
    auto k = knots_;
    for (auto& kn : k) kn.second *= factor;
    return PiecewiseLinear(std::move(k));
}

double PiecewiseLinear::lipschitz() const {
    double L = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i)
        L = std::max(L, std::abs((knots_[i].second - knots_[i - 1].second) / (knots_[i].first - knots_[i - 1].first)));
    return L;
}

double PiecewiseLinear::sup_abs() const {
    double s = 0.0;
    for (const auto& kn : knots_) s = std::max(s, std::abs(kn.second));
    return s;
}

// --- LiftedAnnulusMap ------------------------------------------------------

LiftedAnnulusMap::LiftedAnnulusMap(std::vector<Primitive> pipeline, std::string label)
    : pipeline_(std::move(pipeline)), label_(std::move(label)) {
    for (const auto& p : pipeline_) {
        if (const auto* g = std::get_if<GridSampled>(&p)) {
            if (g->nt < 2 || g->nr < 1) fail(ErrorKind::config, "grid map needs nt >= 2 and nr >= 1");
            const auto n = static_cast<std::size_t>(g->nt * g->nr);
            if (g->dt.size() != n || g->dr.size() != n) fail(ErrorKind::config, "grid map table has wrong size");
        }
        if (const auto* r = std::get_if<RadialReparam>(&p)) {
            if (std::abs(r->phi(0.0)) > 1e-12 || std::abs(r->phi(1.0) - 1.0) > 1e-12)
                fail(ErrorKind::config, "reparam must fix 0 and 1");
        }
    }
    if (label_.empty()) label_ = pipeline_label(pipeline_);
}

LiftedAnnulusMap LiftedAnnulusMap::identity() { return LiftedAnnulusMap({}, "identity"); }
LiftedAnnulusMap LiftedAnnulusMap::rotation(double beta) { return LiftedAnnulusMap({RigidRotation{beta}}); }
LiftedAnnulusMap LiftedAnnulusMap::twist(PiecewiseLinear profile) { return LiftedAnnulusMap({Twist{std::move(profile)}}); }
LiftedAnnulusMap LiftedAnnulusMap::reparam(PiecewiseLinear phi) { return LiftedAnnulusMap({RadialReparam{std::move(phi)}}); }

LiftedAnnulusMap LiftedAnnulusMap::parse(const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of("|"));
    std::vector<Primitive> pipeline;
    for (auto& part : parts) {
        boost::algorithm::trim(part);
        if (part.empty()) fail(ErrorKind::config, "map: empty pipeline stage");
        const auto colon = part.find(':');
        const std::string name = boost::algorithm::trim_copy(part.substr(0, colon));
        const std::string arg = colon == std::string::npos ? "" : boost::algorithm::trim_copy(part.substr(colon + 1));
        if (name == "identity") {
            continue;
        } else if (name == "rotation") {
            pipeline.emplace_back(RigidRotation{parse_double(arg, "map.rotation")});
        } else if (name == "twist") {
            pipeline.emplace_back(Twist{PiecewiseLinear::parse(arg)});
        } else if (name == "reparam") {
            pipeline.emplace_back(RadialReparam{PiecewiseLinear::parse(arg)});
        } else {
            fail(ErrorKind::config, "map: unknown primitive '" + name + "'");
        }
    }
    return LiftedAnnulusMap(std::move(pipeline));
}

StripPoint LiftedAnnulusMap::apply(StripPoint p) const {
    check_t(p.t);
    const double fl = std::floor(p.r);
    double t = clamp01(p.t), f = p.r - fl;
    for (const auto& prim : pipeline_) apply_primitive(prim, t, f);
    return {t, f + fl};
}

LiftPoint LiftedAnnulusMap::advance(const LiftPoint& p) const {
    check_t(p.t);
    double t = clamp01(p.t), f = p.frac;
    for (const auto& prim : pipeline_) apply_primitive(prim, t, f);
    const double fl = std::floor(f);
    LiftPoint out{t, p.turns + static_cast<long>(fl), f - fl};
    if (out.frac >= 1.0) {  // rounding of f - floor(f) for tiny negative f
        out.frac = 0.0;
        ++out.turns;
    }
    return out;
}

LiftedAnnulusMap LiftedAnnulusMap::then(const LiftedAnnulusMap& next) const {
    auto p = pipeline_;
    p.insert(p.end(), next.pipeline_.begin(), next.pipeline_.end());
    return LiftedAnnulusMap(std::move(p));
}

LiftedAnnulusMap LiftedAnnulusMap::inverse() const {
    std::vector<Primitive> inv;
    for (auto it = pipeline_.rbegin(); it != pipeline_.rend(); ++it) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, RigidRotation>) {
                    inv.emplace_back(RigidRotation{-p.beta});
                } else if constexpr (std::is_same_v<T, Twist>) {
                    inv.emplace_back(Twist{p.profile.scaled(-1.0)});
                } else if constexpr (std::is_same_v<T, RadialReparam>) {
                    inv.emplace_back(RadialReparam{p.phi.inverse()});
                } else {
                    fail(ErrorKind::unsupported_conjugacy, "grid-sampled maps cannot be inverted");
                }
            },
            *it);
    }
    return LiftedAnnulusMap(std::move(inv));
}

// --- metrics and estimators -------------------------------------------------

double strip_distance(StripPoint a, StripPoint b) { return std::abs(a.t - b.t) + std::abs(a.r - b.r); }

double annulus_distance(StripPoint a, StripPoint b) {
    double d = std::fmod(a.r - b.r, 1.0);
    if (d < 0) d += 1.0;
    return std::abs(a.t - b.t) + std::min(d, 1.0 - d);
}

std::vector<std::pair<long, double>> rotation_estimate(const LiftedAnnulusMap& map, double t, double r, long n_max) {
    if (n_max < 1) fail(ErrorKind::domain, "n_max must be >= 1");
    std::vector<std::pair<long, double>> out;
    out.reserve(static_cast<std::size_t>(n_max));
    const LiftPoint start = LiftPoint::from({t, r});
    LiftPoint x = start;
    for (long n = 1; n <= n_max; ++n) {
        x = map.advance(x);
        const double disp = static_cast<double>(x.turns - start.turns) + (x.frac - start.frac);
        out.emplace_back(n, disp / static_cast<double>(n));
    }
    return out;
}

namespace {

std::vector<StripPoint> band_grid(int grid, Band band) {
    if (grid < 1) fail(ErrorKind::domain, "grid resolution must be >= 1");
    std::vector<StripPoint> pts;
    pts.reserve(static_cast<std::size_t>(grid * grid));
    for (int i = 0; i < grid; ++i) {
        const double t = grid == 1 ? 0.5 * (band.lo + band.hi) : band.lo + (band.hi - band.lo) * i / (grid - 1);
        for (int j = 0; j < grid; ++j) pts.push_back({t, static_cast<double>(j) / grid});
    }
    return pts;
}

}  // namespace

std::vector<RigidityRow> displacement_profile(const LiftedAnnulusMap& map, int grid, long horizon, Band band) {
    const auto start = band_grid(grid, band);
    std::vector<LiftPoint> cur;
    cur.reserve(start.size());
    for (const auto& p : start) cur.push_back(LiftPoint::from(p));
    std::vector<RigidityRow> rows;
    for (long n = 1; n <= horizon; ++n) {
        double sup = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k) {
            cur[k] = map.advance(cur[k]);
            sup = std::max(sup, annulus_distance({cur[k].t, cur[k].frac}, start[k]));
        }
        rows.push_back({n, sup});
    }
    return rows;
}

std::vector<RigidityRow> rigidity_scan(const LiftedAnnulusMap& map, int grid, long horizon, double eps, Band band) {
    std::vector<RigidityRow> out;
    for (const auto& row : displacement_profile(map, grid, horizon, band))
        if (row.sup < eps) out.push_back(row);
    return out;
}

long displacement_bound(const LiftedAnnulusMap& map) {
    double sup = 0.0;
    constexpr int G = 64;
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
            const StripPoint p{static_cast<double>(i) / (G - 1), static_cast<double>(j) / G};
            sup = std::max(sup, std::abs(map.apply(p).r - p.r));
        }
    return std::max(0L, static_cast<long>(std::ceil(sup - 1e-9)));
}

RotationFamily rotation_family(const std::vector<int>& bits, double eps) {
    if (!(eps > 0.0)) fail(ErrorKind::domain, "eps must be positive");
    if (bits.empty()) fail(ErrorKind::domain, "bit word must be nonempty");
    RotationFamily fam;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j] != 0 && bits[j] != 1) fail(ErrorKind::domain, "bits must be 0 or 1");
        const double b = (eps / 4.0) * std::pow(8.0, -static_cast<double>(j + 1));
        fam.schedule.push_back(b);
        fam.alpha += bits[j] ? b : b / 3.0;
    }
    return fam;
}

LiftedAnnulusMap cover_lift(const LiftedAnnulusMap& map, long q, long p) {
    if (q <= 0) fail(ErrorKind::config, "cover degree q must be >= 1");
    const double qd = static_cast<double>(q);
    std::vector<Primitive> out;
    for (const auto& prim : map.pipeline()) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, RigidRotation>) {
                    out.emplace_back(RigidRotation{x.beta / qd});
                } else if constexpr (std::is_same_v<T, Twist>) {
                    out.emplace_back(Twist{x.profile.scaled(1.0 / qd)});
                } else if constexpr (std::is_same_v<T, RadialReparam>) {
                    out.emplace_back(x);
                } else {
                    // Resample at q times the angular resolution: the lifted
                    // table repeats the base table q times around the circle.
                    GridSampled g{x.nt, x.nr * static_cast<int>(q), {}, {}};
                    g.dt.resize(static_cast<std::size_t>(g.nt * g.nr));
                    g.dr.resize(g.dt.size());
                    for (int i = 0; i < g.nt; ++i)
                        for (int j = 0; j < g.nr; ++j) {
                            const auto src = static_cast<std::size_t>(i * x.nr + j % x.nr);
                            const auto dst = static_cast<std::size_t>(i * g.nr + j);
                            g.dt[dst] = x.dt[src];
                            g.dr[dst] = x.dr[src] / qd;
                        }
                    out.emplace_back(std::move(g));
                }
            },
            prim);
    }
    if (p != 0) out.emplace_back(RigidRotation{static_cast<double>(p) / qd});
    if (q == 1 && p == 0) return map;
    return LiftedAnnulusMap(std::move(out));
}

bool ConjugacyCheck::holds() const { return std::abs(est_f - est_conj) <= bound + 1e-12; }

ConjugacyCheck conjugacy_invariance_check(const LiftedAnnulusMap& f, const LiftedAnnulusMap& g, long n,
                                          StripPoint base) {
    if (n < 1) fail(ErrorKind::domain, "horizon must be >= 1");
    const LiftedAnnulusMap conj = g.inverse().then(f).then(g);
    const StripPoint gb = g.apply(base);
    ConjugacyCheck out;
    out.est_f = rotation_estimate(f, base.t, base.r, n).back().second;
    out.est_conj = rotation_estimate(conj, gb.t, gb.r, n).back().second;
    out.bound = 2.0 * static_cast<double>(displacement_bound(g)) / static_cast<double>(n);
    return out;
}

LiftedAnnulusMap random_grid_map(std::uint64_t seed, int nt, int nr, double amplitude) {
    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> u(-amplitude, amplitude);
    GridSampled g{nt, nr, {}, {}};
    g.dt.assign(static_cast<std::size_t>(nt * nr), 0.0);
    g.dr.assign(g.dt.size(), 0.0);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nr; ++j) {
            const auto k = static_cast<std::size_t>(i * nr + j);
            // Radial push vanishes on the boundary circles.
            g.dt[k] = (i == 0 || i == nt - 1) ? 0.0 : u(rng) / (nt - 1);
            g.dr[k] = u(rng);
        }
    return LiftedAnnulusMap({std::move(g)});
}

}  // namespace psusp::annulus
