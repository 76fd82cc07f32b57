#pragma once

/// INI-style run configuration: `[section]` headers, `key = value` lines,
/// `#` or `;` comments. A section name may repeat (`[stage]`).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psusp/annulus.hpp"
#include "psusp/cantor.hpp"
#include "psusp/hak.hpp"

namespace psusp::config {

struct Section {
    std::string name;
    std::map<std::string, std::string> values;
};

class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    const std::string& source() const noexcept { return source_; }
    bool has_section(const std::string& name) const;
    std::vector<const Section*> sections(const std::string& name) const;

    bool has(const std::string& section, const std::string& key) const;
    /// Throws a config error naming [section] key when missing.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key) const;
    long get_long_or(const std::string& section, const std::string& key, long fallback) const;
    std::uint64_t get_seed() const;

    /// Override (or add) a value in the first section of that name.
    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    const Section* first(const std::string& name) const;

    std::string source_;
    std::vector<Section> sections_;
};

double parse_number(const std::string& text, const std::string& what);
long parse_integer(const std::string& text, const std::string& what);
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

annulus::LiftedAnnulusMap build_map(const Config& cfg);
cantor::CantorSystem build_cantor(const Config& cfg);
std::vector<hak::HakStage> build_stages(const Config& cfg);
hak::HakOptions build_hak_options(const Config& cfg);

}  // namespace psusp::config
