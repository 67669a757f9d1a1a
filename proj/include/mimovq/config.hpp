#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Plain-text configuration: "key = value" lines grouped under "[section]"
// headers, '#' comments.  Keys before any header land in the unnamed global
// section.  Emitted manifests use the same syntax, so they reload directly.

namespace mimovq {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return true;
        return false;
    }

    std::string get(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        throw std::invalid_argument("config: missing key '" + key + "' in section [" + name + "]");
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get(key) : fallback;
    }

    long long get_int(const std::string& key) const {
        const std::string v = get(key);
        std::size_t used = 0;
        const long long out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
        return out;
    }
    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::uint64_t get_u64(const std::string& key) const {
        const std::string v = get(key);
        std::size_t used = 0;
        const unsigned long long out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
        return out;
    }
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    double get_double(const std::string& key) const {
        const std::string v = get(key);
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("config: bad number for '" + key + "': " + v);
        return out;
    }
    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    bool get_bool_or(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = get(key);
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
    }
};

struct Config {
    std::vector<ConfigSection> sections;  // sections[0] is the unnamed global section

    const ConfigSection& global() const { return sections.front(); }

    const ConfigSection* find(const std::string& name) const {
        for (const ConfigSection& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline Config parse_config(std::istream& is) {
    Config cfg;
    cfg.sections.push_back({"", {}});
    ConfigSection* current = &cfg.sections.front();
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: unterminated section header at line " +
                                            std::to_string(line_no));
            cfg.sections.push_back({detail::trim(line.substr(1, line.size() - 2)), {}});
            current = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value at line " + std::to_string(line_no));
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key at line " + std::to_string(line_no));
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return cfg;
}

inline Config parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    return parse_config(is);
}

// SNR grids: either "a,b,c" or an inclusive range "start:step:stop".
inline std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::istringstream ss(text);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw std::invalid_argument("snr grid: expected start:step:stop");
        const double start = std::stod(a), step = std::stod(b), stop = std::stod(c);
        if (!(step > 0.0)) throw std::invalid_argument("snr grid: step must be positive");
        for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    } else {
        std::istringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (!item.empty()) grid.push_back(std::stod(item));
        }
    }
    if (grid.empty()) throw std::invalid_argument("snr grid: empty");
    return grid;
}

// Comma-separated widths, e.g. "256,128,64".
inline std::vector<int> parse_width_list(const std::string& text) {
    std::vector<int> widths;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        widths.push_back(std::stoi(item));
        if (widths.back() < 1) throw std::invalid_argument("width list: widths must be positive");
    }
    return widths;
}

}  // namespace mimovq
