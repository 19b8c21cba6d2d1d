#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "sideband/model.hpp"

namespace sideband {

// INI-style config file:
//
//   [mode_a]
//   frequency = 100.0
//   decay_rate = 1.0
//   bath_occupation = 0.0
//
//   [mode_b] ...
//   [drive]
//   amplitude = 10.0
//   drive_frequency = 99.0
//
//   [coupling]
//   kind = beam_splitter | full | generalized
//   f_spec = number | position | (m,n,coeff), (m,n,coeff), ...
//   g_prime = 0.01
//   f_drive = 0.5
//
//   [units]
//   system = scaled | si
//   temperature = 300.0       # SI only; fills in missing bath_occupation
//
// '#' and ';' start comments. When temperature is given, an explicitly
// provided bath_occupation must match the Bose-Einstein value.

namespace detail_cfg {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using SectionMap = std::map<std::string, std::map<std::string, Entry>>;

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline SectionMap tokenize(const std::string& text) {
    SectionMap out;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const size_t comment = raw.find_first_of("#;");
        std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigParseError("unterminated section header", line_no,
                                       int(raw.find('[')) + 1);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigParseError("empty section name", line_no, 1);
            out[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("expected 'key = value'", line_no, 1);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError("empty key", line_no, 1);
        if (section.empty())
            throw ConfigParseError("key '" + key + "' outside any [section]", line_no, 1);
        if (out[section].count(key))
            throw ConfigParseError("duplicate key '" + key + "' in [" + section + "]", line_no, 1);
        out[section][key] = {value, line_no, false};
    }
    return out;
}

inline double parse_double(const Entry& e, const std::string& name) {
    try {
        size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigParseError("invalid number for '" + name + "': '" + e.value + "'", e.line);
    }
}

inline FSpec parse_fspec(const Entry& e) {
    const std::string v = e.value;
    if (v == "number") return FSpec::number();
    if (v == "position") return FSpec::position();
    FSpec spec;
    size_t i = 0;
    auto skip_ws = [&] { while (i < v.size() && std::isspace((unsigned char)v[i])) ++i; };
    while (true) {
        skip_ws();
        if (i >= v.size()) break;
        if (v[i] != '(')
            throw ConfigParseError("f_spec: expected '(' in triple list", e.line, int(i) + 1);
        const size_t close = v.find(')', i);
        if (close == std::string::npos)
            throw ConfigParseError("f_spec: unterminated triple", e.line, int(i) + 1);
        std::istringstream triple(v.substr(i + 1, close - i - 1));
        FSpec::Monomial mono;
        char c1 = 0, c2 = 0;
        if (!(triple >> mono.m >> c1 >> mono.n >> c2 >> mono.coeff) || c1 != ',' || c2 != ',')
            throw ConfigParseError("f_spec: expected '(m, n, coeff)'", e.line, int(i) + 1);
        if (mono.m < 0 || mono.n < 0)
            throw ConfigParseError("f_spec: powers must be non-negative", e.line, int(i) + 1);
        spec.monomials.push_back(mono);
        i = close + 1;
        skip_ws();
        if (i < v.size()) {
            if (v[i] != ',')
                throw ConfigParseError("f_spec: expected ',' between triples", e.line, int(i) + 1);
            ++i;
        }
    }
    if (spec.monomials.empty()) throw ConfigParseError("f_spec: empty", e.line);
    return spec;
}

}  // namespace detail_cfg

inline SystemConfig parse_config(const std::string& text) {
    using detail_cfg::Entry;
    auto sections = detail_cfg::tokenize(text);

    auto get = [&](const std::string& sec, const std::string& key) -> Entry* {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    };
    auto require = [&](const std::string& sec, const std::string& key) -> Entry& {
        Entry* e = get(sec, key);
        if (!e) throw ConfigParseError("missing required key '" + key + "' in [" + sec + "]", 0);
        return *e;
    };

    SystemConfig cfg;
    if (Entry* sys = get("units", "system")) {
        if (sys->value == "scaled")
            cfg.unit_system = UnitSystem::Scaled;
        else if (sys->value == "si")
            cfg.unit_system = UnitSystem::SI;
        else
            throw ConfigParseError("units.system must be 'scaled' or 'si'", sys->line);
    }
    std::optional<double> temperature;
    if (Entry* t = get("units", "temperature")) {
        if (cfg.unit_system != UnitSystem::SI)
            throw ConfigParseError("units.temperature requires units.system = si", t->line);
        temperature = detail_cfg::parse_double(*t, "temperature");
        cfg.temperature = temperature;
    }

    auto read_mode = [&](const std::string& sec) {
        ModeParams m;
        m.frequency = detail_cfg::parse_double(require(sec, "frequency"), sec + ".frequency");
        m.decay_rate = detail_cfg::parse_double(require(sec, "decay_rate"), sec + ".decay_rate");
        Entry* occ = get(sec, "bath_occupation");
        if (occ) {
            m.bath_occupation = detail_cfg::parse_double(*occ, sec + ".bath_occupation");
        } else if (temperature) {
            m.bath_occupation = thermal_occupation(m.frequency, *temperature);
        } else {
            throw ConfigParseError(
                "missing '" + sec + ".bath_occupation' (or set units.temperature)", 0);
        }
        if (occ && temperature) {
            const double want = thermal_occupation(m.frequency, *temperature);
            if (std::abs(m.bath_occupation - want) > 1e-12 * std::max(1.0, std::abs(want)))
                throw ConfigParseError(sec + ".bath_occupation inconsistent with units.temperature",
                                       occ->line);
        }
        return m;
    };
    cfg.mode_a = read_mode("mode_a");
    cfg.mode_b = read_mode("mode_b");

    cfg.drive.amplitude =
        detail_cfg::parse_double(require("drive", "amplitude"), "drive.amplitude");
    cfg.drive.drive_frequency =
        detail_cfg::parse_double(require("drive", "drive_frequency"), "drive.drive_frequency");

    Entry& kind = require("coupling", "kind");
    if (kind.value == "beam_splitter") {
        cfg.coupling = CouplingKind::beam_splitter();
    } else if (kind.value == "full") {
        cfg.coupling = CouplingKind::full();
    } else if (kind.value == "generalized") {
        FSpec spec = detail_cfg::parse_fspec(require("coupling", "f_spec"));
        const double g_prime =
            detail_cfg::parse_double(require("coupling", "g_prime"), "coupling.g_prime");
        const double f_drive =
            detail_cfg::parse_double(require("coupling", "f_drive"), "coupling.f_drive");
        cfg.coupling = CouplingKind::generalized(std::move(spec), f_drive, g_prime);
    } else {
        throw ConfigParseError(
            "coupling.kind must be beam_splitter, full, or generalized (got '" + kind.value + "')",
            kind.line);
    }

    for (const auto& [sec, entries] : sections)
        for (const auto& [key, entry] : entries)
            if (!entry.used)
                throw ConfigParseError("unknown key '" + key + "' in [" + sec + "]", entry.line);

    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigParseError(e.what(), 0);
    }
    return cfg;
}

// FNV-1a over the raw file bytes; stamped into CSV metadata.
inline uint64_t config_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct LoadedConfig {
    SystemConfig config;
    uint64_t hash = 0;
};

inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError("cannot open config file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return {parse_config(text), config_hash(text)};
}

}  // namespace sideband
