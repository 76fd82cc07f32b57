#pragma once

/// Stage-by-stage verifier for the fast-approximation (HAK) scheme on the
/// annulus: nested bands A_n, charts f_n, rational rotations R_n, correction
/// maps g_n and their compositions H_n = g_n o ... o g_1.
///
/// R_n is read as the rotation that H_n realizes on A_n, so g_n twists by
/// the increment alpha_n - alpha_{n-1} on A_n and fades to the identity
/// across the collar between A_n and A_{n-1}.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psusp/annulus.hpp"

namespace psusp::hak {

struct HakStage {
    double eps = 0.1;
    annulus::Band band;
    long rot_num = 0;
    long rot_den = 1;
    double box_height = 1.0;
    long q = 1;
    std::optional<annulus::Band> collar;         // defaults to the previous band
    annulus::PiecewiseLinear chart_twist = annulus::PiecewiseLinear::constant(0.0);

    double alpha() const { return static_cast<double>(rot_num) / static_cast<double>(rot_den); }
};

struct HakOptions {
    int grid = 64;
    long horizon = 40000;
    double tail_bound = 0.0;  // gamma_1; must dominate the sum of eps_n
    int orbit_grid = 8;       // per-axis samples for orbit-heavy checks
    int max_boxes = 256;
    double slack = 1e-7;
};

struct HakCheck {
    std::string condition;  // "(1)" .. "(8)", "rigidity"
    int stage = 0;          // 1-based
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string note;

    double margin() const { return threshold - measured; }
};

struct HakReport {
    std::vector<HakCheck> checks;
    std::vector<double> gamma;  // gamma_1 .. gamma_N

    bool passed() const;
    std::set<std::string> failed_conditions() const;
};

/// Validates structure (nesting, q multiple of p, tail bound) and reduces
/// rotations to lowest terms. Throws a config error on violation.
std::vector<HakStage> normalize_stages(std::vector<HakStage> stages, double tail_bound);

/// g_n for the stage list (1-based n).
annulus::LiftedAnnulusMap correction_map(const std::vector<HakStage>& stages, int n);
/// H_n = g_n o ... o g_1.
annulus::LiftedAnnulusMap truncated_map(const std::vector<HakStage>& stages, int n);

/// Chart f_n on A_n and its inverse.
annulus::StripPoint chart(const HakStage& s, annulus::StripPoint x);
annulus::StripPoint chart_inverse(const HakStage& s, annulus::StripPoint y);
/// Lipschitz constant of f_n^{-1} under the sum metric.
double chart_inverse_lipschitz(const HakStage& s);

HakReport hak_verify(std::vector<HakStage> stages, const HakOptions& options);

}  // namespace psusp::hak
