#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "psusp/annulus.hpp"
#include "psusp/cantor.hpp"
#include "psusp/chains.hpp"
#include "psusp/config.hpp"
#include "psusp/error.hpp"
#include "psusp/format.hpp"
#include "psusp/hak.hpp"
#include "psusp/horseshoe.hpp"
#include "psusp/suspension.hpp"

#ifndef PSUSP_FIXTURE_DIR
#define PSUSP_FIXTURE_DIR "fixtures"
#endif
#ifndef PSUSP_VERSION
#define PSUSP_VERSION "0.0.0"
#endif

namespace psusp::cli {

namespace {

namespace fs = std::filesystem;
using config::Config;

struct Fixture {
    const char* file;
    const char* what;
};

constexpr Fixture fixtures[] = {
    {"hak_toy.ini", "3-stage HAK toy (hak-verify)"},
    {"hak_mutant_collar.ini", "HAK toy, stage 2 moves points outside its annulus (fails (3))"},
    {"hak_mutant_box.ini", "HAK toy, stage 2 boxes too tall (fails (2))"},
    {"hak_mutant_chart.ini", "HAK toy, stage 3 chart skews the fibers (fails (1))"},
    {"tent_map.ini", "full tent map on a stretched chain (horseshoe, k=3 fails)"},
    {"branch3_map.ini", "PL map with 3 full branches (horseshoe, k=3)"},
    {"branch5_map.ini", "PL map with 5 full branches (horseshoe, k=5)"},
    {"shift_map.ini", "continuous shift-like PL map (no stretching)"},
    {"golden_mean.ini", "golden-mean SFT under rotation 0.5 (suspend-entropy)"},
    {"thue_morse.ini", "Thue-Morse substitution under rotation 0.5"},
    {"odometer.ini", "(2,2,2)-odometer under rotation 0.5"},
    {"fullshift.ini", "full 2-shift under rotation 0.5"},
    {"rotation_zero.ini", "full 2-shift under the identity (zero entropy)"},
    {"levels.ini", "three kfold(3) refinement levels (render)"},
};

std::string fixture_dir() {
    if (const char* env = std::getenv("PSUSP_FIXTURES")) return env;
    return PSUSP_FIXTURE_DIR;
}

// --- output -------------------------------------------------------------------

class Csv {
public:
    explicit Csv(std::string header) : text_(std::move(header) + "\n") {}

    template <class... T>
    void row(const T&... cells) {
        std::string line;
        ((line += (line.empty() ? "" : ","), line += cell(cells)), ...);
        text_ += line + "\n";
    }
    const std::string& text() const { return text_; }

private:
    static std::string cell(double v) { return fmt9(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    template <class I>
    static std::enable_if_t<std::is_integral_v<I>, std::string> cell(I v) { return std::to_string(v); }

    std::string text_;
};

struct Context {
    Config cfg;
    std::ostream& out;
};

void emit(Context& ctx, const std::string& body) {
    const std::string path = ctx.cfg.get_or("experiment", "out", "");
    if (path.empty()) {
        ctx.out << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::config, "[experiment] out: cannot write '" + path + "'");
    f << body;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

suspension::SuspensionSystem make_suspension(const Config& cfg) {
    return suspension::SuspensionSystem(config::build_map(cfg), config::build_cantor(cfg),
                                        static_cast<int>(cfg.get_long_or("experiment", "window", cantor::default_radius)));
}

std::vector<double> number_list(const Config& cfg, const std::string& key) {
    std::vector<double> out;
    std::string raw = cfg.get("experiment", key);
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        if (item.find_first_not_of(' ') != std::string::npos) out.push_back(config::parse_number(item, "[experiment] " + key));
    return out;
}

// --- subcommands ----------------------------------------------------------------

int cmd_rotation(Context& ctx) {
    const auto map = config::build_map(ctx.cfg);
    const long n = ctx.cfg.get_long_or("experiment", "n", 1000);
    const double t = ctx.cfg.get_double_or("experiment", "t", 0.5);
    const double r = ctx.cfg.get_double_or("experiment", "r", 0.0);
    const auto est = annulus::rotation_estimate(map, t, r, n);
    Csv csv("n,estimate");
    for (const auto& [k, v] : est) csv.row(k, v);
    emit(ctx, csv.text());
    ctx.out << "rotation: estimate " << fmt9(est.back().second) << " at n=" << n << "\n";
    return ok;
}

int cmd_rigidity(Context& ctx) {
    const auto map = config::build_map(ctx.cfg);
    const int grid = static_cast<int>(ctx.cfg.get_long_or("experiment", "grid", 32));
    const long horizon = ctx.cfg.get_long_or("experiment", "horizon", 1000);
    const double eps = ctx.cfg.get_double("experiment", "eps");
    const auto rows = annulus::rigidity_scan(map, grid, horizon, eps);
    Csv csv("n,sup");
    for (const auto& row : rows) csv.row(row.n, row.sup);
    emit(ctx, csv.text());
    ctx.out << "rigidity: " << rows.size() << " iterates within " << fmt9(eps) << " of the identity up to n=" << horizon
            << "\n";
    return ok;
}

int cmd_hak(Context& ctx) {
    const auto stages = config::build_stages(ctx.cfg);
    const auto report = hak::hak_verify(stages, config::build_hak_options(ctx.cfg));
    Csv csv("condition,stage,pass,measured,threshold,margin,note");
    for (const auto& c : report.checks)
        csv.row(c.condition, c.stage, c.pass ? 1 : 0, c.measured, c.threshold, c.margin(), quoted(c.note));
    emit(ctx, csv.text());
    if (report.passed()) {
        ctx.out << "hak-verify: all conditions hold for " << stages.size() << " stages\n";
        return ok;
    }
    std::string failed;
    for (const auto& c : report.failed_conditions()) failed += (failed.empty() ? "" : " ") + c;
    ctx.out << "hak-verify: condition(s) " << failed << " violated\n";
    return check_failed;
}

int cmd_entropy(Context& ctx) {
    const auto sys = make_suspension(ctx.cfg);
    double alpha = 0.0;
    if (ctx.cfg.has("experiment", "alpha")) {
        alpha = ctx.cfg.get_double("experiment", "alpha");
    } else {
        alpha = annulus::rotation_estimate(sys.map(), 0.5, 0.0, 1000).back().second;
    }
    std::vector<int> ns;
    for (double v : number_list(ctx.cfg, "n")) ns.push_back(static_cast<int>(v));
    const auto rows = suspension::product_formula_report(sys, alpha, number_list(ctx.cfg, "eps"), ns,
                                                         ctx.cfg.get_long_or("experiment", "budget", 20000),
                                                         ctx.cfg.get_seed());
    Csv csv("eps,n,budget,lower,upper,target,alpha,h_entropy");
    for (const auto& r : rows) csv.row(r.eps, r.n, r.budget, r.lower, r.upper, r.target, r.alpha, r.h_entropy);
    emit(ctx, csv.text());
    const auto& last = rows.back();
    ctx.out << "suspend-entropy: bracket [" << fmt9(last.lower) << ", " << fmt9(last.upper) << "] target "
            << fmt9(last.target) << "\n";
    return ok;
}

int cmd_orbit(Context& ctx) {
    auto sys = make_suspension(ctx.cfg);
    const long n = ctx.cfg.get_long_or("experiment", "n", 16);
    const int id = sys.register_seed(cantor::random_point(sys.cantor(), ctx.cfg.get_seed(), sys.window()));
    auto p = sys.seed_point(id, ctx.cfg.get_double_or("experiment", "t", 0.5), ctx.cfg.get_double_or("experiment", "r", 0.0));
    Csv csv("k,t,r,w,component");
    csv.row(0L, p.t, p.r, p.winding, p.component);
    for (long k = 1; k <= n; ++k) {
        p = suspension::step(sys, p);
        suspension::check_capacity(sys, p);
        csv.row(k, p.t, p.r, p.winding, p.component);
    }
    emit(ctx, csv.text());
    ctx.out << "suspend-orbit: " << n << " steps, winding " << p.winding << "\n";
    return ok;
}

int cmd_mixing(Context& ctx) {
    auto sys = make_suspension(ctx.cfg);
    const std::uint64_t seed = ctx.cfg.get_seed();
    const double radius = ctx.cfg.get_double_or("experiment", "radius", 0.1);
    const long horizon = ctx.cfg.get_long_or("experiment", "horizon", 200);
    const int u = sys.register_seed(cantor::random_point(sys.cantor(), seed, sys.window()));
    const int v = sys.register_seed(cantor::random_point(sys.cantor(), seed + 1, sys.window()));
    const suspension::Ball U{sys.seed_point(u, ctx.cfg.get_double_or("experiment", "u_t", 0.5),
                                            ctx.cfg.get_double_or("experiment", "u_r", 0.2)),
                             radius};
    const suspension::Ball V{sys.seed_point(v, ctx.cfg.get_double_or("experiment", "v_t", 0.5),
                                            ctx.cfg.get_double_or("experiment", "v_r", 0.2)),
                             radius};
    const auto l = suspension::weak_mixing_witness(sys, U, V, horizon, seed,
                                                   static_cast<int>(ctx.cfg.get_long_or("experiment", "cloud", 256)));
    Csv csv("found,l,horizon,radius");
    csv.row(l ? 1 : 0, l.value_or(-1), horizon, radius);
    emit(ctx, csv.text());
    if (!l) {
        ctx.out << "mixing-witness: no l <= " << horizon << " found\n";
        return check_failed;
    }
    ctx.out << "mixing-witness: l = " << *l << "\n";
    return ok;
}

int cmd_dense(Context& ctx) {
    auto sys = make_suspension(ctx.cfg);
    const double eps = ctx.cfg.get_double("experiment", "eps");
    const auto c = cantor::random_point(sys.cantor(), ctx.cfg.get_seed(), sys.window());
    suspension::DenseOrbitBounds bounds;
    bounds.max_k = static_cast<int>(ctx.cfg.get_long_or("experiment", "max_k", bounds.max_k));
    bounds.max_s = static_cast<int>(ctx.cfg.get_long_or("experiment", "max_s", bounds.max_s));
    bounds.max_p = static_cast<int>(ctx.cfg.get_long_or("experiment", "max_p", bounds.max_p));
    const annulus::StripPoint x{ctx.cfg.get_double_or("experiment", "t", 0.5), ctx.cfg.get_double_or("experiment", "r", 0.0)};
    const auto w = suspension::dense_orbit_check(sys, c, x, eps, bounds);
    Csv csv("found,k,s,p,eps");
    csv.row(w ? 1 : 0, w ? w->k : -1L, w ? w->s : -1L, w ? w->p : -1L, eps);
    emit(ctx, csv.text());
    if (!w) {
        ctx.out << "dense-orbit: no witness within the search bounds\n";
        return check_failed;
    }
    ctx.out << "dense-orbit: k=" << w->k << " s=" << w->s << " p=" << w->p << "\n";
    return ok;
}

int cmd_family(Context& ctx) {
    const double eps = ctx.cfg.get_double_or("experiment", "eps", 0.1);
    const long bits = ctx.cfg.get_long_or("experiment", "bits", 8);
    if (bits < 1 || bits > 20) fail(ErrorKind::config, "[experiment] bits: must be in 1..20");
    std::vector<std::pair<double, std::string>> family;
    double b_last = 0.0;
    for (long w = 0; w < (1L << bits); ++w) {
        std::vector<int> word(static_cast<std::size_t>(bits));
        std::string label;
        for (long j = 0; j < bits; ++j) {
            word[static_cast<std::size_t>(j)] = static_cast<int>((w >> (bits - 1 - j)) & 1);
            label += static_cast<char>('0' + word[static_cast<std::size_t>(j)]);
        }
        const auto fam = annulus::rotation_family(word, eps);
        b_last = fam.schedule.back();
        family.emplace_back(fam.alpha, label);
    }
    Csv csv("word,alpha");
    for (const auto& [a, label] : family) csv.row(label, a);
    emit(ctx, csv.text());
    auto sorted = family;
    std::sort(sorted.begin(), sorted.end());
    double gap = INFINITY;
    for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i].first - sorted[i - 1].first);
    ctx.out << "rotation-family: " << family.size() << " words, minimum gap " << fmt9(gap) << " vs b_" << bits << "/2 = "
            << fmt9(b_last / 2) << "\n";
    return gap >= b_last / 2 ? ok : check_failed;
}

int cmd_pattern(Context& ctx, std::optional<int> k, const std::string& values) {
    chains::Pattern p;
    if (k) {
        p = chains::kfold(*k);
    } else if (!values.empty()) {
        p = chains::pattern_validate(config::parse_int_list(values, "--values"));
    } else {
        fail(ErrorKind::config, "pattern: give --kfold K or --values LIST");
    }
    emit(ctx, horseshoe::word_string(p.values) + "\n");
    return ok;
}

int cmd_horseshoe(Context& ctx) {
    const auto g = horseshoe::PLMap::parse(ctx.cfg.get("horseshoe", "knots"));
    const auto chain = ctx.cfg.has("horseshoe", "chain") ? horseshoe::parse_chain(ctx.cfg.get("horseshoe", "chain"))
                                                         : horseshoe::uniform_chain(7);
    const int k = static_cast<int>(ctx.cfg.get_long("horseshoe", "k"));
    const int depth = static_cast<int>(ctx.cfg.get_long("horseshoe", "depth"));
    const int m_max = static_cast<int>(ctx.cfg.get_long_or("horseshoe", "m_max", 4));
    const auto cert = horseshoe::horseshoe_extract(g, chain, k, depth, m_max);
    emit(ctx, horseshoe::certificate_csv(cert));
    std::ostream& o = ctx.out;
    o << "horseshoe: k=" << k << " depth=" << depth << " m=" << cert.m << " orientation "
      << (cert.swapped ? "U3->U7,U5->U1" : "U3->U1,U5->U7") << "\n";
    for (std::size_t d = 0; d < cert.nonempty.size(); ++d)
        o << "  words of length " << d + 1 << ": " << cert.nonempty[d] << " nonempty of "
          << static_cast<long>(std::llround(std::pow(k, static_cast<double>(d + 1)))) << "\n";
    if (!cert.certified) {
        o << "horseshoe: certificate failed, empty itinerary interval for word " << horseshoe::word_string(*cert.first_empty)
          << "\n";
        return check_failed;
    }
    o << "horseshoe: certified, entropy >= log(" << k << ")/" << cert.m << " = " << fmt9(cert.bound) << "\n";
    return ok;
}

int cmd_render(Context& ctx, const std::string& levels_path, const std::string& out_path) {
    const Config lv = Config::load(levels_path);
    const int links = static_cast<int>(lv.get_long_or("render", "links", 7));
    const int levels = static_cast<int>(lv.get_long_or("render", "levels", 1));
    chains::Pattern f;
    if (lv.has("render", "kfold")) {
        f = chains::kfold(static_cast<int>(lv.get_long("render", "kfold")));
    } else if (lv.has("render", "pattern")) {
        f = chains::pattern_validate(config::parse_int_list(lv.get("render", "pattern"), "[render] pattern"));
    } else if (levels > 1) {
        fail(ErrorKind::config, "[render] kfold: missing (needed for levels > 1)");
    }
    std::vector<chains::ChainCover> chain_levels;
    if (levels > 0) chain_levels.push_back(chains::essential_chain(links));
    for (int l = 1; l < levels; ++l) chain_levels.push_back(chains::refine_chain(chain_levels.back(), f));
    const std::string svg = chains::render_chains(chain_levels);
    if (out_path.empty()) {
        ctx.out << svg;
    } else {
        std::ofstream o(out_path, std::ios::binary);
        if (!o) fail(ErrorKind::config, "--out: cannot write '" + out_path + "'");
        o << svg;
    }
    std::size_t total = 0;
    for (const auto& c : chain_levels) total += c.links.size();
    ctx.out << "render: " << chain_levels.size() << " levels, " << total << " links\n";
    return ok;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::capacity: return capacity_error;
        case ErrorKind::precondition:
        case ErrorKind::resolution: return check_failed;
        default: return config_error;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo-suspension construction and verification toolkit", "psusp"};
    app.set_version_flag("--version", std::string("psusp ") + PSUSP_VERSION + " (interface 1.0)");
    bool list = false;
    app.add_flag("--list-fixtures", list, "List the shipped fixture configs");

    std::string config_path, out_path, map_file, levels_path, values;
    std::vector<std::string> overrides;
    std::map<std::string, std::string> flags;
    std::optional<int> kfold_k;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "INI config file");
        sub->add_option("--set", overrides, "Override a config value: section.key=value");
        sub->add_option("-o,--out", out_path, "Output path (defaults to [experiment] out, else stdout)");
    };
    // Flag -> [experiment] key; given flags override the config file.
    auto experiment_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        sub->add_option_function<std::string>("--" + name, [&flags, name](const std::string& v) { flags["experiment." + name] = v; },
                                              help);
    };

    auto pipeline_flag = [&](CLI::App* sub) {
        sub->add_option_function<std::string>("--pipeline", [&flags](const std::string& v) { flags["map.map"] = v; },
                                              "Map pipeline, e.g. 'rotation:0.25 | twist:0,0;1,0.1'");
    };

    std::map<std::string, std::function<int(Context&)>> handlers;
    auto* rotation = app.add_subcommand("rotation", "Birkhoff rotation-number estimates");
    common(rotation);
    pipeline_flag(rotation);
    for (const char* k : {"n", "t", "r"}) experiment_flag(rotation, k, std::string("[experiment] ") + k);
    handlers["rotation"] = cmd_rotation;

    auto* rigidity = app.add_subcommand("rigidity", "Iterates uniformly close to the identity");
    common(rigidity);
    pipeline_flag(rigidity);
    for (const char* k : {"grid", "horizon", "eps"}) experiment_flag(rigidity, k, std::string("[experiment] ") + k);
    handlers["rigidity"] = cmd_rigidity;

    auto* hakv = app.add_subcommand("hak-verify", "Check the approximation conditions on a stage list");
    common(hakv);
    for (const char* k : {"grid", "horizon", "tail_bound", "orbit_grid"}) experiment_flag(hakv, k, std::string("[experiment] ") + k);
    handlers["hak-verify"] = cmd_hak;

    auto* entropy = app.add_subcommand("suspend-entropy", "Entropy bracket of the suspension");
    common(entropy);
    for (const char* k : {"seed", "eps", "n", "budget", "alpha", "window"}) experiment_flag(entropy, k, std::string("[experiment] ") + k);
    handlers["suspend-entropy"] = cmd_entropy;

    auto* orbit = app.add_subcommand("suspend-orbit", "Orbit of a seeded suspension point");
    common(orbit);
    for (const char* k : {"seed", "n", "t", "r", "window"}) experiment_flag(orbit, k, std::string("[experiment] ") + k);
    handlers["suspend-orbit"] = cmd_orbit;

    auto* mixing = app.add_subcommand("mixing-witness", "Search a return time meeting two balls");
    common(mixing);
    for (const char* k : {"seed", "horizon", "radius", "cloud", "window"}) experiment_flag(mixing, k, std::string("[experiment] ") + k);
    handlers["mixing-witness"] = cmd_mixing;

    auto* dense = app.add_subcommand("dense-orbit", "Search (k, s, p) for the dense-orbit conditions");
    common(dense);
    for (const char* k : {"seed", "eps", "t", "r"}) experiment_flag(dense, k, std::string("[experiment] ") + k);
    handlers["dense-orbit"] = cmd_dense;

    auto* family = app.add_subcommand("rotation-family", "Rotation numbers of all bit words of a length");
    common(family);
    for (const char* k : {"eps", "bits"}) experiment_flag(family, k, std::string("[experiment] ") + k);
    handlers["rotation-family"] = cmd_family;

    auto* pattern = app.add_subcommand("pattern", "Print a k-fold pattern or validate a pattern");
    pattern->add_option("--kfold", kfold_k, "Odd k >= 3");
    pattern->add_option("--values", values, "Comma-separated pattern to validate");
    pattern->add_option("-o,--out", out_path, "Output path");

    auto* horse = app.add_subcommand("horseshoe", "Itinerary horseshoe certificate for a PL map");
    common(horse);
    horse->add_option("--map", map_file, "INI file with a [horseshoe] section")->check(CLI::ExistingFile);
    horse->add_option_function<std::string>("--k", [&](const std::string& v) { flags["horseshoe.k"] = v; }, "Odd k >= 3");
    horse->add_option_function<std::string>("--depth", [&](const std::string& v) { flags["horseshoe.depth"] = v; },
                                            "Itinerary depth");
    handlers["horseshoe"] = cmd_horseshoe;

    auto* render = app.add_subcommand("render", "SVG of nested chain refinements");
    render->add_option("--levels", levels_path, "INI file with a [render] section")->required()->check(CLI::ExistingFile);
    render->add_option("-o,--out", out_path, "SVG output path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }

    try {
        if (list) {
            const std::string dir = fixture_dir();
            for (const auto& f : fixtures) out << (fs::path(dir) / f.file).string() << "  " << f.what << "\n";
            return ok;
        }
        if (app.get_subcommands().empty()) {
            err << app.help();
            return config_error;
        }
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        std::string source = !map_file.empty() ? map_file : config_path;
        Context ctx{source.empty() ? Config{} : Config::load(source), out};
        for (const auto& [key, value] : flags) {
            const auto dot = key.find('.');
            ctx.cfg.set(key.substr(0, dot), key.substr(dot + 1), value);
        }
        for (const auto& o : overrides) {
            const auto dot = o.find('.');
            const auto eq = o.find('=');
            if (dot == std::string::npos || eq == std::string::npos || eq < dot)
                fail(ErrorKind::config, "--set expects section.key=value, got '" + o + "'");
            ctx.cfg.set(o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
        }
        if (!out_path.empty() && name != "render") ctx.cfg.set("experiment", "out", out_path);

        if (name == "pattern") return cmd_pattern(ctx, kfold_k, values);
        if (name == "render") return cmd_render(ctx, levels_path, out_path);
        return handlers.at(name)(ctx);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    }
}

}  // namespace psusp::cli
