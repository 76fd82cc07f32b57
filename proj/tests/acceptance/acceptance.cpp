// One PASS/FAIL line per acceptance criterion, with wall time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "commands.hpp"
#include "psusp/annulus.hpp"
#include "psusp/cantor.hpp"
#include "psusp/chains.hpp"
#include "psusp/config.hpp"
#include "psusp/error.hpp"
#include "psusp/hak.hpp"
#include "psusp/horseshoe.hpp"
#include "psusp/suspension.hpp"

using namespace psusp;
namespace fs = std::filesystem;

namespace {

using annulus::LiftedAnnulusMap;
using cantor::CantorSystem;
using suspension::SuspensionSystem;

std::string fixture(const std::string& name) { return std::string(PSUSP_TEST_FIXTURES) + "/" + name; }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

suspension::EntropyBracket bracket(double beta, const CantorSystem& h) {
    SuspensionSystem sys(LiftedAnnulusMap::rotation(beta), h);
    return suspension::entropy_bracket(sys, 1.0 / 16, 12, 20000, 20240611);
}

Outcome entropy_product() {
    Outcome o;
    const auto half = bracket(0.5, CantorSystem::full_shift(2));
    const auto zero = bracket(0.0, CantorSystem::full_shift(2));
    const auto odo = bracket(0.5, CantorSystem::odometer({2, 2, 2}));
    const double target = 0.5 * std::log(2.0);
    o.require(half.lower >= 0.20, "lower " + std::to_string(half.lower) + " < 0.20");
    o.require(half.upper <= 0.55, "upper " + std::to_string(half.upper) + " > 0.55");
    o.require(half.lower <= target && target <= half.upper, "bracket misses 0.5 log 2");
    o.require(zero.upper <= 0.05, "alpha=0 upper " + std::to_string(zero.upper));
    o.require(odo.upper <= 0.05, "odometer upper " + std::to_string(odo.upper));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("bracket [") + std::to_string(half.lower) + ", " +
                std::to_string(half.upper) + "]";
    return o;
}

Outcome entropy_linearity() {
    Outcome o;
    const auto one = bracket(1.0, CantorSystem::full_shift(2));
    const auto half = bracket(0.5, CantorSystem::full_shift(2));
    const double ratio = (one.lower + one.upper) / (half.lower + half.upper);
    o.require(ratio >= 1.5 && ratio <= 2.5, "ratio out of [1.5, 2.5]");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("ratio ") + std::to_string(ratio);
    return o;
}

Outcome rotation_convergence() {
    Outcome o;
    boost::random::mt19937_64 rng(41);
    boost::random::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double beta = u(rng);
        for (const auto& [n, est] : annulus::rotation_estimate(LiftedAnnulusMap::rotation(beta), 0.5, 0.0, 1000))
            worst = std::max(worst, std::abs(est - beta));
    }
    o.require(worst <= 1e-12, "rigid rotation error " + std::to_string(worst));

    const char* pipelines[] = {
        "twist:0,0.31;1,0.8 | reparam:0,0;0.3,0.6;1,1 | rotation:0.05",
        "rotation:0.2 | twist:0,0.123;0.5,0.9;1,0.1",
        "reparam:0,0;0.5,0.4;1,1 | twist:0,0.6180339887;1,0",
    };
    for (const char* text : pipelines) {
        const auto map = LiftedAnnulusMap::parse(text);
        SuspensionSystem sys(map, CantorSystem::full_shift(2));
        const int id = sys.register_seed(cantor::random_point(sys.cantor(), 9));
        const auto w = suspension::winding_rate(sys, sys.seed_point(id, 0.0, 0.0), 10000);
        const auto r = annulus::rotation_estimate(map, 0.0, 0.0, 10000);
        for (std::size_t k = 0; k < w.size(); ++k)
            if (std::abs(w[k].second - r[k].second) > 2.0 / static_cast<double>(w[k].first)) {
                o.require(false, std::string("winding rate off at k=") + std::to_string(w[k].first) + " for " + text);
                break;
            }
    }
    return o;
}

Outcome hak_verifier() {
    Outcome o;
    const auto cfg = config::Config::load(fixture("hak_toy.ini"));
    const auto report = hak::hak_verify(config::build_stages(cfg), config::build_hak_options(cfg));
    std::set<std::string> seen;
    double min_margin = 1e300;
    for (const auto& c : report.checks) {
        seen.insert(c.condition);
        if (c.condition != "rigidity") min_margin = std::min(min_margin, c.margin());
    }
    o.require(report.passed(), "toy fails");
    o.require(min_margin > 0, "non-positive margin on the toy");
    for (const char* c : {"(1)", "(2)", "(3)", "(4)", "(5)", "(6)", "(7)", "(8)"})
        o.require(seen.count(c) == 1, std::string("condition ") + c + " not checked");
    const std::pair<const char*, const char*> mutants[] = {
        {"hak_mutant_chart.ini", "(1)"}, {"hak_mutant_box.ini", "(2)"}, {"hak_mutant_collar.ini", "(3)"}};
    for (const auto& [file, cond] : mutants) {
        const auto m = config::Config::load(fixture(file));
        const auto failed = hak::hak_verify(config::build_stages(m), config::build_hak_options(m)).failed_conditions();
        o.require(failed == std::set<std::string>{cond}, std::string(file) + " fails the wrong set");
        o.require(cli({"hak-verify", "-c", fixture(file)}) == cli::check_failed, std::string(file) + " exit code");
    }
    o.require(cli({"hak-verify", "-c", fixture("hak_toy.ini")}) == cli::ok, "toy exit code");
    return o;
}

Outcome suspension_algebra() {
    Outcome o;
    const auto map = LiftedAnnulusMap::parse("twist:0,0.2;1,0.9 | reparam:0,0;0.4,0.55;1,1 | rotation:0.15");
    SuspensionSystem sys(map, CantorSystem::sft({{1, 1}, {1, 0}}), 48);
    boost::random::mt19937_64 rng(5);
    boost::random::uniform_real_distribution<double> u(0.0, 1.0), ur(-3.0, 3.0);
    int bad_quotient = 0, bad_commute = 0, bad_component = 0, bad_fiber = 0;
    std::vector<int> ids;
    for (int k = 0; k < 8; ++k) ids.push_back(sys.register_seed(cantor::random_point(sys.cantor(), rng(), 48)));
    for (int s = 0; s < 1000; ++s) {
        const auto c = cantor::random_point(sys.cantor(), rng(), 48);
        const double t = u(rng), r = ur(rng);
        const auto base = suspension::normalize(sys, t, r, c);
        for (int m = -3; m <= 3; ++m) {
            const auto other = suspension::normalize(sys, t, r + m, cantor::iterate(c, sys.cantor(), -m));
            if (other.t != base.t || std::abs(other.r - base.r) > 1e-12 || !other.c.agrees_with(base.c, 40)) ++bad_quotient;
        }
        const auto lhs = suspension::step(sys, base);
        const auto img = map.apply(annulus::StripPoint{t, r});
        const auto rhs = suspension::normalize(sys, img.t, img.r, c);
        const bool same = lhs.t == rhs.t && std::abs(lhs.r - rhs.r) < 1e-12 && lhs.c.agrees_with(rhs.c, 40);
        const bool seam = std::abs(lhs.r - rhs.r) > 0.999;  // rounding on opposite sides of r = 0
        if (!same && !seam) ++bad_commute;

        const int id = ids[static_cast<std::size_t>(s % 8)];
        const auto p = sys.seed_point(id, u(rng), u(rng));
        const auto q = suspension::step(sys, p);
        if (q.component != id || !q.c.agrees_with(cantor::iterate(sys.seed(id), sys.cantor(), q.winding), 40))
            ++bad_component;
        const auto fib = map.apply(annulus::StripPoint{p.t, p.r});
        if (std::abs(q.t - fib.t) > 1e-9 || annulus::annulus_distance({q.t, q.r}, fib) > 1e-9) ++bad_fiber;
    }
    o.require(bad_quotient == 0, "well-definedness failures " + std::to_string(bad_quotient));
    o.require(bad_commute == 0, "step/normalize failures " + std::to_string(bad_commute));
    o.require(bad_component == 0, "component failures " + std::to_string(bad_component));
    o.require(bad_fiber == 0, "fiber failures " + std::to_string(bad_fiber));
    return o;
}

Outcome kfold_patterns() {
    Outcome o;
    o.require(chains::kfold(3).values == std::vector<int>{1, 2, 3, 4, 5, 4, 3, 4, 5, 6, 7}, "kfold(3) differs");
    for (int k = 3; k <= 21; k += 2) {
        const auto p = chains::kfold(k);
        o.require(!chains::pattern_violation(p.values) && p.m == 2 * k + 5, "kfold(" + std::to_string(k) + ") invalid");
    }
    bool threw = false;
    try {
        chains::kfold(4);
    } catch (const Error&) {
        threw = true;
    }
    o.require(threw, "kfold(4) accepted");
    return o;
}

double markov_entropy(const horseshoe::PLMap& g) {
    const auto& k = g.knots();
    const int n = static_cast<int>(k.size()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (k[i].y == k[i + 1].y) continue;
        const auto lo = std::min(k[i].y, k[i + 1].y), hi = std::max(k[i].y, k[i + 1].y);
        for (int j = 0; j < n; ++j)
            if (lo <= k[j].x && k[j + 1].x <= hi) a(i, j) = 1.0;
    }
    return std::log(a.eigenvalues().cwiseAbs().maxCoeff());
}

Outcome horseshoe_certificate() {
    Outcome o;
    const auto cfg = config::Config::load(fixture("branch3_map.ini"));
    const auto g = horseshoe::PLMap::parse(cfg.get("horseshoe", "knots"));
    const auto cert = horseshoe::horseshoe_extract(g, horseshoe::uniform_chain(7), 3, 5);
    o.require(cert.certified, "3-branch map not certified");
    o.require(!cert.nonempty.empty() && cert.nonempty.back() == 729, "not all 729 itinerary intervals nonempty");
    o.require(std::abs(cert.bound - std::log(3.0)) <= 1e-9, "bound is not log 3");
    o.require(std::abs(cert.bound - markov_entropy(g)) <= 1e-9, "bound disagrees with transition-matrix oracle");
    std::string out;
    o.require(cli({"horseshoe", "--map", fixture("tent_map.ini"), "--k", "3", "--depth", "5"}, &out) == cli::check_failed,
              "tent map exit code");
    o.require(out.find("empty itinerary interval for word") != std::string::npos, "tent failure names no branch");
    return o;
}

Outcome rotation_family() {
    Outcome o;
    const double eps = 0.1;
    std::vector<int> bits(8, 0);
    std::vector<double> alphas;
    double b8 = 0.0;
    for (int w = 0; w < 256; ++w) {
        for (int i = 0; i < 8; ++i) bits[static_cast<std::size_t>(i)] = (w >> (7 - i)) & 1;
        const auto f = annulus::rotation_family(bits, eps);
        alphas.push_back(f.alpha);
        b8 = f.schedule.back();
    }
    double gap = 1e300;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = i + 1; j < alphas.size(); ++j) gap = std::min(gap, std::abs(alphas[i] - alphas[j]));
    o.require(std::abs(b8 - eps / 4 * std::pow(8.0, -8)) < 1e-20, "schedule is not (eps/4) 8^-n");
    o.require(gap >= b8 / 2, "minimum gap below b_8/2");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("min gap ") + std::to_string(gap / b8) + " b_8";
    return o;
}

Outcome conjugacy_invariance() {
    Outcome o;
    boost::random::mt19937_64 rng(99);
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = u(rng), a = u(rng), b = u(rng), mid = 0.2 + 0.6 * u(rng), lift = 3 * u(rng);
        const auto f = LiftedAnnulusMap::rotation(beta).then(
            LiftedAnnulusMap::twist(annulus::PiecewiseLinear({{0.0, a}, {1.0, b}})));
        const auto g = LiftedAnnulusMap::reparam(annulus::PiecewiseLinear({{0.0, 0.0}, {0.5, mid}, {1.0, 1.0}}))
                           .then(LiftedAnnulusMap::twist(annulus::PiecewiseLinear({{0.0, 0.0}, {0.5, lift}, {1.0, 0.3}})));
        const auto c = annulus::conjugacy_invariance_check(f, g, 1000, {u(rng), 0.0});
        o.require(std::abs(c.est_f - c.est_conj) <= 2.0 * static_cast<double>(annulus::displacement_bound(g)) / 1000,
                  "pair " + std::to_string(i) + " differs by " + std::to_string(std::abs(c.est_f - c.est_conj)));
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "psusp_acceptance";
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"rotation", {"rotation", "--pipeline", "twist:0,0.1;1,0.7 | rotation:0.3", "--n", "500"}},
        {"rigidity", {"rigidity", "--pipeline", "rotation:0.25", "--eps", "0.01", "--horizon", "40"}},
        {"hak-verify", {"hak-verify", "-c", fixture("hak_toy.ini"), "--grid", "16"}},
        {"suspend-entropy", {"suspend-entropy", "-c", fixture("golden_mean.ini"), "--n", "8", "--budget", "5000"}},
        {"suspend-orbit", {"suspend-orbit", "-c", fixture("fullshift.ini"), "--n", "40"}},
        {"mixing-witness", {"mixing-witness", "-c", fixture("fullshift.ini")}},
        {"dense-orbit", {"dense-orbit", "-c", fixture("fullshift.ini"), "--set", "map.map=rotation:1"}},
        {"rotation-family", {"rotation-family", "--bits", "6"}},
        {"pattern", {"pattern", "--kfold", "7"}},
        {"horseshoe", {"horseshoe", "--map", fixture("branch3_map.ini"), "--depth", "3"}},
        {"render", {"render", "--levels", fixture("levels.ini")}},
    };
    for (const auto& [name, base] : runs) {
        std::string texts[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path file = dir / (name + "_" + std::to_string(rep) + ".out");
            fs::remove(file);
            auto args = base;
            args.push_back("-o");
            args.push_back(file.string());
            std::string stdout_text;
            cli(args, &stdout_text);
            texts[rep] = slurp(file);
        }
        o.require(!texts[0].empty(), name + " wrote nothing");
        o.require(texts[0] == texts[1], name + " output differs between runs");
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"entropy product bracket", entropy_product},
        {"entropy linearity in alpha", entropy_linearity},
        {"rotation-number convergence", rotation_convergence},
        {"HAK verifier toy and mutants", hak_verifier},
        {"pseudo-suspension algebra", suspension_algebra},
        {"k-fold patterns", kfold_patterns},
        {"horseshoe certificate", horseshoe_certificate},
        {"rotation family separation", rotation_family},
        {"conjugacy invariance", conjugacy_invariance},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2zu %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
