#pragma once

/// Lifted annulus maps on the strip [0,1] x R.
///
/// The first coordinate t is radial and must stay in [0,1]; the second
/// coordinate r is the lift of the angle, and the deck group acts by
/// r -> r + 1. Maps are pipelines of primitives applied left to right.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace psusp::annulus {

struct StripPoint {
    double t = 0.0;
    double r = 0.0;
};

/// Strip point with the angular lift split into whole turns plus a fraction,
/// so long orbits keep full precision in the fractional part.
struct LiftPoint {
    double t = 0.0;
    long turns = 0;
    double frac = 0.0;  // in [0,1)

    static LiftPoint from(StripPoint p);
    double lift() const { return static_cast<double>(turns) + frac; }
};

/// Continuous piecewise-linear function on [0,1], constant past the end knots.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    /// "x0,y0;x1,y1;..."
    static PiecewiseLinear parse(const std::string& text);
    static PiecewiseLinear constant(double value);

    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
    bool strictly_increasing() const;
    PiecewiseLinear inverse() const;
    PiecewiseLinear scaled(double factor) const;
    /// Largest slope magnitude over the pieces.
    double lipschitz() const;
    double sup_abs() const;

private:
    std::vector<std::pair<double, double>> knots_;
};

struct RigidRotation {
    double beta = 0.0;
};
struct Twist {
    PiecewiseLinear profile;  // r -> r + profile(t)
};
struct RadialReparam {
    PiecewiseLinear phi;  // t -> phi(t)
};
/// Displacement table on an nt x nr node grid over [0,1] x [0,1), bilinear
/// interpolation, periodic in r.
struct GridSampled {
    int nt = 2;
    int nr = 1;
    std::vector<double> dt;  // size (nt) * nr, row-major in t
    std::vector<double> dr;
};
using Primitive = std::variant<RigidRotation, Twist, RadialReparam, GridSampled>;

class LiftedAnnulusMap {
public:
    LiftedAnnulusMap() = default;
    explicit LiftedAnnulusMap(std::vector<Primitive> pipeline, std::string label = {});

    static LiftedAnnulusMap identity();
    static LiftedAnnulusMap rotation(double beta);
    static LiftedAnnulusMap twist(PiecewiseLinear profile);
    static LiftedAnnulusMap reparam(PiecewiseLinear phi);
    /// "rotation:0.5 | twist:0,0;1,0.25 | reparam:0,0;0.5,0.7;1,1 | identity"
    static LiftedAnnulusMap parse(const std::string& text);

    const std::vector<Primitive>& pipeline() const noexcept { return pipeline_; }
    const std::string& label() const noexcept { return label_; }

    StripPoint apply(StripPoint p) const;
    /// Same map on a split lift, keeping whole turns exact.
    LiftPoint advance(const LiftPoint& p) const;

    /// First `this`, then `next`.
    LiftedAnnulusMap then(const LiftedAnnulusMap& next) const;
    LiftedAnnulusMap inverse() const;

private:
    std::vector<Primitive> pipeline_;
    std::string label_;
};

double strip_distance(StripPoint a, StripPoint b);
/// |dt| plus the circle distance of the angular coordinates.
double annulus_distance(StripPoint a, StripPoint b);

/// Birkhoff quotients (lift displacement / n) for n = 1..n_max.
std::vector<std::pair<long, double>> rotation_estimate(const LiftedAnnulusMap& map, double t, double r, long n_max);

struct Band {
    double lo = 0.0;
    double hi = 1.0;
};

struct RigidityRow {
    long n = 0;
    double sup = 0.0;
};
/// Iterates whose sup-displacement over a G x G grid on `band` is below eps.
std::vector<RigidityRow> rigidity_scan(const LiftedAnnulusMap& map, int grid, long horizon, double eps,
                                       Band band = {});
/// sup-displacement of the n-th iterate for every n = 1..horizon.
std::vector<RigidityRow> displacement_profile(const LiftedAnnulusMap& map, int grid, long horizon, Band band = {});

/// Integer bound on the angular displacement of the lift.
long displacement_bound(const LiftedAnnulusMap& map);

struct RotationFamily {
    double alpha = 0.0;
    std::vector<double> schedule;  // b_1 .. b_m
};
RotationFamily rotation_family(const std::vector<int>& bits, double eps);

/// Conjugate the angle by r -> r/q, then post-compose with rotation by p/q.
LiftedAnnulusMap cover_lift(const LiftedAnnulusMap& map, long q, long p);

struct ConjugacyCheck {
    double est_f = 0.0;
    double est_conj = 0.0;
    double bound = 0.0;
    bool holds() const;
};
/// Rotation estimates of F from `base` and of g F g^-1 from g(base) at horizon n.
ConjugacyCheck conjugacy_invariance_check(const LiftedAnnulusMap& f, const LiftedAnnulusMap& g, long n,
                                          StripPoint base = {0.5, 0.0});

/// A seeded smooth-ish grid map used to exercise the GridSampled path.
LiftedAnnulusMap random_grid_map(std::uint64_t seed, int nt, int nr, double amplitude);

}  // namespace psusp::annulus
