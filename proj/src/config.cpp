#include "psusp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>

#include "psusp/chains.hpp"
#include "psusp/error.hpp"

namespace psusp::config {

namespace {

std::vector<std::string> split_trim(const std::string& text, const char* seps) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(seps));
    for (auto& p : parts) boost::algorithm::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
    return parts;
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        v = v.substr(1, v.size() - 2);
    return v;
}

std::string qualified(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

annulus::Band parse_band(const std::string& text, const std::string& what) {
    const auto parts = split_trim(text, ",");
    if (parts.size() != 2) fail(ErrorKind::config, what + ": expected 'lo,hi'");
    return {parse_number(parts[0], what), parse_number(parts[1], what)};
}

}  // namespace

double parse_number(const std::string& raw, const std::string& what) {
    const std::string text = boost::algorithm::trim_copy(raw);
    if (text.find('/') != std::string::npos) {
        try {
            return chains::to_double(chains::parse_rational(text));
        } catch (const Error&) {
            fail(ErrorKind::config, what + ": cannot parse number '" + raw + "'");
        }
    }
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end)
        fail(ErrorKind::config, what + ": cannot parse number '" + raw + "'");
    return v;
}

long parse_integer(const std::string& raw, const std::string& what) {
    const std::string text = boost::algorithm::trim_copy(raw);
    long v = 0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end)
        fail(ErrorKind::config, what + ": cannot parse integer '" + raw + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (const auto& p : split_trim(text, ",")) out.push_back(static_cast<int>(parse_integer(p, what)));
    return out;
}

Config Config::parse(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorKind::config, source + ":" + std::to_string(lineno) + ": bad section header");
            cfg.sections_.push_back({boost::algorithm::trim_copy(line.substr(1, line.size() - 2)), {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::config, source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        if (cfg.sections_.empty())
            fail(ErrorKind::config, source + ":" + std::to_string(lineno) + ": key outside of any section");
        const std::string key = boost::algorithm::trim_copy(line.substr(0, eq));
        cfg.sections_.back().values[key] = unquote(boost::algorithm::trim_copy(line.substr(eq + 1)));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

const Section* Config::first(const std::string& name) const {
    for (const auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

bool Config::has_section(const std::string& name) const { return first(name) != nullptr; }

std::vector<const Section*> Config::sections(const std::string& name) const {
    std::vector<const Section*> out;
    for (const auto& s : sections_)
        if (s.name == name) out.push_back(&s);
    return out;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const Section* s = first(section);
    return s && s->values.count(key);
}

std::string Config::get(const std::string& section, const std::string& key) const {
    const Section* s = first(section);
    if (!s) fail(ErrorKind::config, "missing section [" + section + "] (needed for key '" + key + "')");
    auto it = s->values.find(key);
    if (it == s->values.end()) fail(ErrorKind::config, qualified(section, key) + ": missing");
    return it->second;
}

std::string Config::get_or(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return parse_number(get(section, key), qualified(section, key));
}

double Config::get_double_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_long(const std::string& section, const std::string& key) const {
    return parse_integer(get(section, key), qualified(section, key));
}

long Config::get_long_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_long(section, key) : fallback;
}

std::uint64_t Config::get_seed() const {
    const long s = get_long("experiment", "seed");
    if (s < 0) fail(ErrorKind::config, "[experiment] seed: must be non-negative");
    return static_cast<std::uint64_t>(s);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& s : sections_)
        if (s.name == section) {
            s.values[key] = value;
            return;
        }
    sections_.push_back({section, {{key, value}}});
}

annulus::LiftedAnnulusMap build_map(const Config& cfg) {
    try {
        return annulus::LiftedAnnulusMap::parse(cfg.has("map", "pipeline") ? cfg.get("map", "pipeline")
                                                                            : cfg.get("map", "map"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config && std::string(e.what()).rfind("[map]", 0) == 0) throw;
        fail(ErrorKind::config, std::string("[map] map: ") + e.what());
    }
}

cantor::CantorSystem build_cantor(const Config& cfg) {
    const std::string kind = cfg.get("cantor", "kind");
    try {
        if (kind == "fullshift") return cantor::CantorSystem::full_shift(static_cast<int>(cfg.get_long_or("cantor", "k", 2)));
        if (kind == "sft") {
            std::vector<std::vector<int>> rows;
            for (const auto& row : split_trim(cfg.get("cantor", "adjacency"), ";"))
                rows.push_back(parse_int_list(row, "[cantor] adjacency"));
            return cantor::CantorSystem::sft(std::move(rows));
        }
        if (kind == "substitution") {
            std::vector<cantor::Word> rules;
            for (const auto& rule : split_trim(cfg.get("cantor", "rules"), ";")) {
                const auto parts = split_trim(rule, ":");
                if (parts.size() != 2) fail(ErrorKind::config, "[cantor] rules: expected 'letter:image'");
                const long letter = parse_integer(parts[0], "[cantor] rules");
                if (letter != static_cast<long>(rules.size()))
                    fail(ErrorKind::config, "[cantor] rules: letters must be listed as 0,1,2,...");
                cantor::Word image;
                for (char ch : parts[1]) {
                    if (ch < '0' || ch > '9') fail(ErrorKind::config, "[cantor] rules: images must be digit strings");
                    image.push_back(ch - '0');
                }
                rules.push_back(std::move(image));
            }
            return cantor::CantorSystem::substitution(std::move(rules));
        }
        if (kind == "odometer")
            return cantor::CantorSystem::odometer(parse_int_list(cfg.get("cantor", "bases"), "[cantor] bases"),
                                                  static_cast<int>(cfg.get_long_or("cantor", "depth", 0)));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) throw;
        fail(ErrorKind::config, "[cantor] " + kind + ": " + e.what());
    }
    fail(ErrorKind::config, "[cantor] kind: unknown system '" + kind + "'");
}

std::vector<hak::HakStage> build_stages(const Config& cfg) {
    std::vector<hak::HakStage> stages;
    int idx = 0;
    for (const Section* s : cfg.sections("stage")) {
        ++idx;
        const std::string tag = "[stage " + std::to_string(idx) + "] ";
        auto need = [&](const std::string& key) -> const std::string& {
            auto it = s->values.find(key);
            if (it == s->values.end()) fail(ErrorKind::config, tag + key + ": missing");
            return it->second;
        };
        hak::HakStage st;
        st.eps = parse_number(need("eps"), tag + "eps");
        st.band = parse_band(need("band"), tag + "band");
        {
            const auto parts = split_trim(need("rot"), "/");
            if (parts.size() != 2) fail(ErrorKind::config, tag + "rot: expected 'p/q'");
            st.rot_num = parse_integer(parts[0], tag + "rot");
            st.rot_den = parse_integer(parts[1], tag + "rot");
        }
        const std::string box_key = s->values.count("alpha") ? "alpha" : "box";
        st.box_height = parse_number(need(box_key), tag + box_key);
        st.q = s->values.count("q") ? parse_integer(s->values.at("q"), tag + "q") : st.rot_den;
        if (s->values.count("collar")) st.collar = parse_band(s->values.at("collar"), tag + "collar");
        if (s->values.count("chart")) {
            try {
                st.chart_twist = annulus::PiecewiseLinear::parse(s->values.at("chart"));
            } catch (const Error& e) {
                fail(ErrorKind::config, tag + "chart: " + e.what());
            }
        }
        stages.push_back(std::move(st));
    }
    if (stages.empty()) fail(ErrorKind::config, "no [stage] sections");
    return stages;
}

hak::HakOptions build_hak_options(const Config& cfg) {
    hak::HakOptions o;
    o.grid = static_cast<int>(cfg.get_long_or("experiment", "grid", o.grid));
    o.horizon = cfg.get_long_or("experiment", "horizon", o.horizon);
    o.tail_bound = cfg.get_double("experiment", "tail_bound");
    o.orbit_grid = static_cast<int>(cfg.get_long_or("experiment", "orbit_grid", o.orbit_grid));
    o.max_boxes = static_cast<int>(cfg.get_long_or("experiment", "max_boxes", o.max_boxes));
    return o;
}

}  // namespace psusp::config
