#pragma once

/// Quotient dynamics over the strip times a Cantor system.
///
/// ((t, r), c) ~ ((t, r + n), h^{-n}(c)). Points are kept in the fundamental
/// domain r in [0,1); crossing r = 1 moves the Cantor coordinate by h. The
/// winding counter w records the net number of crossings, so c always equals
/// h^w of the seed the orbit started from.

#include <cstdint>
#include <optional>
#include <vector>

#include "psusp/annulus.hpp"
#include "psusp/cantor.hpp"

namespace psusp::suspension {

using annulus::LiftedAnnulusMap;
using cantor::CantorSystem;
using cantor::SymbolSequence;

struct SuspensionPoint {
    double t = 0.0;
    double r = 0.0;  // in [0,1)
    SymbolSequence c;
    int component = -1;  // seed registry index, -1 when untracked
    long winding = 0;
};

class SuspensionSystem {
public:
    SuspensionSystem(LiftedAnnulusMap map, CantorSystem h, int window = cantor::default_radius);

    const LiftedAnnulusMap& map() const noexcept { return map_; }
    const CantorSystem& cantor() const noexcept { return h_; }
    int window() const noexcept { return window_; }

    /// Adds a seed and returns its component id.
    int register_seed(SymbolSequence c);
    const SymbolSequence& seed(int id) const;
    std::size_t seed_count() const noexcept { return seeds_.size(); }

    /// Seed point (t, r, seed) with zero winding; r is normalized.
    SuspensionPoint seed_point(int id, double t, double r) const;

private:
    LiftedAnnulusMap map_;
    CantorSystem h_;
    int window_;
    std::vector<SymbolSequence> seeds_;
};

/// (t, r - floor r, h^{floor r}(c)), winding += floor r.
SuspensionPoint normalize(const SuspensionSystem& sys, double t, double r, const SymbolSequence& c,
                          int component = -1, long winding = 0);

/// Apply the lift to (t, r), keep c, normalize.
SuspensionPoint step(const SuspensionSystem& sys, const SuspensionPoint& p);

/// Throws a capacity error if |winding| exceeds the symbol window.
void check_capacity(const SuspensionSystem& sys, const SuspensionPoint& p);

double quotient_distance(const SuspensionSystem& sys, const SuspensionPoint& p, const SuspensionPoint& q);

struct DenseOrbitBounds {
    int max_k = 8;
    int max_s = 16;
    int max_p = 256;
};
struct DenseOrbitWitness {
    long k = 0;
    long s = 0;
    long p = 0;
};
/// First (k, s, p) for which both the Cantor recurrence and the annulus
/// return conditions hold at scale eps.
std::optional<DenseOrbitWitness> dense_orbit_check(const SuspensionSystem& sys, const SymbolSequence& c,
                                                   annulus::StripPoint x, double eps, DenseOrbitBounds bounds = {});

struct Ball {
    SuspensionPoint center;
    double radius = 0.0;
};
/// Smallest l <= horizon with H_C^l(U) meeting both U and V (sampled cloud).
std::optional<long> weak_mixing_witness(const SuspensionSystem& sys, const Ball& u, const Ball& v, long horizon,
                                        std::uint64_t seed, int cloud = 256);

struct EntropyBracket {
    double lower = 0.0;
    double upper = 0.0;
    int anchors = 0;
    long separated = 0;  // summed over anchors at horizon n
    long spanning = 0;
};
EntropyBracket entropy_bracket(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed);
double entropy_separated(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed);
double entropy_spanning(const SuspensionSystem& sys, double eps, int n, long budget, std::uint64_t seed);

struct ProductRow {
    double eps = 0.0;
    int n = 0;
    long budget = 0;
    double lower = 0.0;
    double upper = 0.0;
    double target = 0.0;
    double alpha = 0.0;
    double h_entropy = 0.0;
};
std::vector<ProductRow> product_formula_report(const SuspensionSystem& sys, double alpha,
                                               const std::vector<double>& eps_list, const std::vector<int>& n_list,
                                               long budget, std::uint64_t seed);

/// (k, w_k / k) for k = 1..n.
std::vector<std::pair<long, double>> winding_rate(const SuspensionSystem& sys, const SuspensionPoint& p0, long n);

/// Iterates n <= horizon whose sup quotient displacement over the sample is below eps.
std::vector<long> rigidity_suspension(const SuspensionSystem& sys, int grid, long horizon, double eps,
                                      std::uint64_t seed, int cantor_samples = 8);

}  // namespace psusp::suspension
